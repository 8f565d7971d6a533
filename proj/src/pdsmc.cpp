#include "rpds/pdsmc.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "rpds/error.hpp"

namespace rpds {

namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

// Valuations and annotation ----------------------------------------------------

void ValuationSpec::validate(std::uint32_t num_states) const {
  if (atoms.size() != automata.size())
    throw PreconditionError("valuation: one automaton per atom is required");
  if (atoms.size() > static_cast<std::size_t>(kMaxAtoms))
    throw PreconditionError("valuation: too many atoms");
  for (std::size_t i = 0; i < automata.size(); ++i) {
    automata[i].validate();
    if (automata[i].base.num_states < num_states)
      throw PreconditionError("valuation: automaton for '" + atoms[i] +
                              "' does not cover the system states");
  }
}

Annotator::Annotator(ValuationSpec v, std::size_t budget) : spec_(std::move(v)), budget_(budget) {
  if (spec_.atoms.size() != spec_.automata.size())
    throw PreconditionError("annotator: one automaton per atom is required");
  const std::size_t n = spec_.automata.size();
  rules_by_symbol_.resize(n);
  initial_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Nfa& a = spec_.automata[i];
    offset_.push_back(width_);
    width_ += a.base.num_states;
    rules_by_symbol_[i].resize(a.base.num_symbols);
    for (const PdsRule& r : a.base.rules) rules_by_symbol_[i][r.symbol].emplace_back(r.from, r.to);
    initial_[i].assign(a.base.num_states, 0);
    for (StateId q : a.initial) initial_[i][q] = 1;
  }
  Bits finals((width_ + 63) / 64, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (StateId q : spec_.automata[i].final) {
      std::size_t bit = offset_[i] + q;
      finals[bit / 64] |= std::uint64_t{1} << (bit % 64);
    }
  intern(std::move(finals));
}

Annotator::Ref Annotator::intern(Bits bits) {
  auto it = index_.find(bits);
  if (it != index_.end()) return it->second;
  if (sets_.size() >= budget_)
    throw ResourceError("annotator: more than " + std::to_string(budget_) + " states");
  const Ref r = static_cast<Ref>(sets_.size());
  index_.emplace(bits, r);
  sets_.push_back(std::move(bits));
  return r;
}

bool Annotator::contains(Ref a, std::size_t atom, StateId q) const {
  if (q >= spec_.automata[atom].base.num_states) return false;
  const std::size_t bit = offset_[atom] + q;
  return (sets_[a][bit / 64] >> (bit % 64)) & 1u;
}

Annotator::Ref Annotator::next(Ref below, SymbolId gamma) {
  auto key = std::make_pair(below, gamma);
  if (auto it = next_.find(key); it != next_.end()) return it->second;
  Bits bits((width_ + 63) / 64, 0);
  for (std::size_t i = 0; i < rules_by_symbol_.size(); ++i) {
    if (gamma >= rules_by_symbol_[i].size()) continue;
    for (auto [from, to] : rules_by_symbol_[i][gamma])
      if (contains(below, i, to)) {
        std::size_t bit = offset_[i] + from;
        bits[bit / 64] |= std::uint64_t{1} << (bit % 64);
      }
  }
  const Ref r = intern(std::move(bits));
  next_.emplace(key, r);
  return r;
}

Letter Annotator::label(StateId p, SymbolId gamma, Ref below) const {
  Letter out = 0;
  for (std::size_t i = 0; i < rules_by_symbol_.size(); ++i) {
    if (p >= initial_[i].size() || !initial_[i][p] || gamma >= rules_by_symbol_[i].size()) continue;
    for (auto [from, to] : rules_by_symbol_[i][gamma])
      if (from == p && contains(below, i, to)) {
        out |= Letter{1} << i;
        break;
      }
  }
  return out;
}

std::vector<Annotator::Ref> Annotator::annotate(const std::vector<SymbolId>& stack) {
  std::vector<Ref> out(stack.size());
  Ref a = bottom();
  for (std::size_t i = stack.size(); i-- > 0;) {
    out[i] = a;
    a = next(a, stack[i]);
  }
  return out;
}

Letter Annotator::label(const PdsId& id) {
  if (id.stack.empty()) {
    Letter out = 0;
    for (std::size_t i = 0; i < spec_.automata.size(); ++i)
      if (id.state < initial_[i].size() && initial_[i][id.state] && contains(bottom(), i, id.state))
        out |= Letter{1} << i;
    return out;
  }
  return label(id.state, id.stack.front(), annotate(id.stack).front());
}

Annotator backward_determinize(const ValuationSpec& v, std::size_t budget) {
  return Annotator(v, budget);
}

// pre* -------------------------------------------------------------------------

namespace {

// Transitions of a P-automaton indexed by (from, symbol).
class TransitionIndex {
 public:
  explicit TransitionIndex(const PAutomaton& a) : final_(a.num_states, 0) {
    for (const auto& t : a.transitions) by_head_[pair_key(t.from, t.symbol)].push_back(t.to);
    for (StateId f : a.final) final_[f] = 1;
  }

  bool accepts(StateId start, const std::vector<SymbolId>& word) const {
    if (start >= final_.size()) return false;
    std::vector<StateId> cur{start}, next;
    std::vector<char> mark(final_.size(), 0);
    for (SymbolId s : word) {
      next.clear();
      for (StateId q : cur) {
        auto it = by_head_.find(pair_key(q, s));
        if (it == by_head_.end()) continue;
        for (StateId r : it->second)
          if (!mark[r]) {
            mark[r] = 1;
            next.push_back(r);
          }
      }
      for (StateId r : next) mark[r] = 0;
      cur.swap(next);
      if (cur.empty()) return false;
    }
    return std::any_of(cur.begin(), cur.end(), [&](StateId q) { return final_[q] != 0; });
  }

 private:
  std::unordered_map<std::uint64_t, std::vector<StateId>> by_head_;
  std::vector<char> final_;
};

struct TransitionHash {
  std::size_t operator()(const PAutomaton::Transition& t) const {
    std::uint64_t h = pair_key(t.from, t.symbol) * 0x9e3779b97f4a7c15ull;
    return static_cast<std::size_t>(h ^ (static_cast<std::uint64_t>(t.to) << 1) ^ t.accepting);
  }
};

}  // namespace

bool PAutomaton::accepts(const PdsId& id) const { return TransitionIndex(*this).accepts(id.state, id.stack); }

PAutomaton prestar(const Pds& m, const PAutomaton& target, const std::vector<char>& accepting) {
  if (target.num_states < m.num_states)
    throw PreconditionError("prestar: automaton must contain the control states");
  auto acc = [&](StateId q) { return q < accepting.size() && accepting[q]; };
  using T = PAutomaton::Transition;

  // Skip and push rules indexed by the (state, symbol) they wait for.
  std::unordered_map<std::uint64_t, std::vector<const PdsRule*>> skip_by, push_by;
  for (const PdsRule& r : m.rules) {
    if (r.command.kind == Command::Kind::Skip) skip_by[pair_key(r.to, r.symbol)].push_back(&r);
    if (r.command.kind == Command::Kind::Push) push_by[pair_key(r.to, r.command.arg)].push_back(&r);
  }
  // rel: processed transitions by (from, symbol); pseudo: (q, flag) waiting at (x, gamma).
  std::unordered_map<std::uint64_t, std::vector<std::pair<StateId, bool>>> rel, pseudo;

  PAutomaton out;
  out.num_states = target.num_states;
  out.final = target.final;
  std::unordered_set<T, TransitionHash> seen;
  std::deque<T> work;
  auto add = [&](T t) {
    if (seen.insert(t).second) work.push_back(t);
  };
  for (const T& t : target.transitions) add(t);
  for (const PdsRule& r : m.rules)
    if (r.command.kind == Command::Kind::Pop) add({r.from, r.symbol, r.to, acc(r.from)});

  while (!work.empty()) {
    const T t = work.front();
    work.pop_front();
    out.transitions.push_back(t);
    rel[pair_key(t.from, t.symbol)].emplace_back(t.to, t.accepting);

    if (auto it = skip_by.find(pair_key(t.from, t.symbol)); it != skip_by.end())
      for (const PdsRule* r : it->second) add({r->from, r->symbol, t.to, acc(r->from) || t.accepting});

    if (auto it = push_by.find(pair_key(t.from, t.symbol)); it != push_by.end())
      for (const PdsRule* r : it->second) {
        const bool f = acc(r->from) || t.accepting;
        pseudo[pair_key(t.to, r->symbol)].emplace_back(r->from, f);
        if (auto jt = rel.find(pair_key(t.to, r->symbol)); jt != rel.end())
          for (auto [z, b] : jt->second) add({r->from, r->symbol, z, f || b});
      }

    if (auto it = pseudo.find(pair_key(t.from, t.symbol)); it != pseudo.end())
      for (auto [q, f] : it->second) add({q, t.symbol, t.to, f || t.accepting});
  }
  return out;
}

// Model checking -----------------------------------------------------------------

std::string to_string(Verdict::Outcome o) {
  switch (o) {
    case Verdict::Outcome::Holds: return "holds";
    case Verdict::Outcome::Violated: return "violated";
    case Verdict::Outcome::ResourceExceeded: return "resource-exceeded";
  }
  return "?";
}

namespace {

// The annotated system times the Buchi automaton, restricted to the control
// states and annotated symbols reachable under the states x symbols
// over-approximation.
struct Product {
  std::vector<StateId> base_states;                        // index -> PDS state
  std::unordered_map<StateId, std::uint32_t> state_index;  // PDS state -> index
  std::vector<std::pair<SymbolId, Annotator::Ref>> symbols;
  std::map<std::pair<SymbolId, Annotator::Ref>, std::uint32_t> symbol_index;
  std::size_t buchi_size = 0;
  Pds pds;
  std::vector<std::size_t> origin;  // product rule -> PDS rule
  std::vector<char> accepting;      // product state -> Buchi accepting
  std::unordered_map<std::uint64_t, Letter> letters;  // (state index, symbol) -> label

  StateId product_state(std::uint32_t state_index_, std::uint32_t s) const {
    return static_cast<StateId>(state_index_ * buchi_size + s);
  }
  StateId base_of(StateId q) const { return base_states[q / buchi_size]; }
};

Product build_product(const Pds& m, Annotator& ann, const BuchiAutomaton& buchi, const PdsId& c0,
                      std::size_t rule_budget) {
  Product pr;
  pr.buchi_size = buchi.size();
  const PdsRuleIndex index(m);
  std::deque<std::pair<bool, std::uint32_t>> work;
  auto add_state = [&](StateId p) {
    auto [it, inserted] = pr.state_index.emplace(p, static_cast<std::uint32_t>(pr.base_states.size()));
    if (inserted) {
      pr.base_states.push_back(p);
      work.emplace_back(true, it->second);
    }
    return it->second;
  };
  auto add_symbol = [&](SymbolId g, Annotator::Ref a) {
    auto [it, inserted] =
        pr.symbol_index.emplace(std::make_pair(g, a), static_cast<std::uint32_t>(pr.symbols.size()));
    if (inserted) {
      pr.symbols.emplace_back(g, a);
      work.emplace_back(false, it->second);
    }
    return it->second;
  };
  auto expand = [&](std::uint32_t pi, std::uint32_t si) {
    const StateId p = pr.base_states[pi];
    const auto [g, a] = pr.symbols[si];
    for (std::uint32_t r : index.rules(p, g)) {
      const PdsRule& rule = m.rules[r];
      add_state(rule.to);
      if (rule.command.kind == Command::Kind::Push) add_symbol(rule.command.arg, ann.next(a, g));
    }
  };

  add_state(c0.state);
  const auto annotation = ann.annotate(c0.stack);
  for (std::size_t i = 0; i < c0.stack.size(); ++i) add_symbol(c0.stack[i], annotation[i]);
  while (!work.empty()) {
    auto [is_state, id] = work.front();
    work.pop_front();
    if (is_state) {
      for (std::uint32_t si = 0; si < pr.symbols.size(); ++si) expand(id, si);
    } else {
      for (std::uint32_t pi = 0; pi < pr.base_states.size(); ++pi) expand(pi, id);
    }
  }

  const std::size_t nb = buchi.size();
  pr.pds.num_states = static_cast<std::uint32_t>(pr.base_states.size() * nb);
  pr.pds.num_symbols = static_cast<std::uint32_t>(pr.symbols.size());
  pr.accepting.resize(pr.pds.num_states);
  for (std::uint32_t pi = 0; pi < pr.base_states.size(); ++pi)
    for (std::uint32_t s = 0; s < nb; ++s) pr.accepting[pr.product_state(pi, s)] = buchi.accepting[s];

  for (std::uint32_t pi = 0; pi < pr.base_states.size(); ++pi)
    for (std::uint32_t si = 0; si < pr.symbols.size(); ++si) {
      const StateId p = pr.base_states[pi];
      const auto [g, a] = pr.symbols[si];
      auto rules = index.rules(p, g);
      if (rules.empty()) continue;
      const Letter letter = ann.label(p, g, a);
      pr.letters[pair_key(pi, si)] = letter;
      for (std::uint32_t r : rules) {
        const PdsRule& rule = m.rules[r];
        const std::uint32_t to = pr.state_index.at(rule.to);
        Command cmd = rule.command;
        if (cmd.kind == Command::Kind::Push)
          cmd.arg = pr.symbol_index.at({cmd.arg, ann.next(a, g)});
        for (std::uint32_t s = 0; s < nb; ++s) {
          if (!buchi.reads(s, letter)) continue;
          for (std::uint32_t s2 : buchi.succ[s]) {
            pr.pds.rules.push_back({pr.product_state(pi, s), si, pr.product_state(to, s2), cmd});
            pr.origin.push_back(r);
          }
        }
        if (pr.pds.rules.size() > rule_budget)
          throw ResourceError("product: more than " + std::to_string(rule_budget) + " rules");
      }
    }
  return pr;
}

// Strongly connected components (iterative Tarjan).
std::vector<std::uint32_t> scc_ids(const std::vector<std::vector<std::pair<std::uint32_t, bool>>>& edges) {
  const std::uint32_t n = static_cast<std::uint32_t>(edges.size());
  const std::uint32_t unset = 0xffffffffu;
  std::vector<std::uint32_t> index(n, unset), low(n, 0), comp(n, unset), stack;
  std::vector<char> on_stack(n, 0);
  std::uint32_t counter = 0, comps = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> call;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != unset) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i < edges[v].size()) {
        const std::uint32_t w = edges[v][i++].first;
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
      const std::uint32_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  return comp;
}

struct Conf {
  StateId state;
  std::vector<SymbolId> stack;
  bool flag = false;
  friend bool operator==(const Conf&, const Conf&) = default;
};

struct ConfHash {
  std::size_t operator()(const Conf& c) const {
    std::size_t h = c.state * 2 + c.flag;
    for (SymbolId s : c.stack) h = h * 1000003u ^ s;
    return h;
  }
};

struct SearchNode {
  Conf conf;
  std::size_t parent;
  std::size_t rule;  // product rule that led here
};

// Breadth-first search over product configurations; returns the path of
// nodes (root first) to the first goal, or nothing when the budget runs out.
template <typename Expand, typename Goal>
std::optional<std::vector<SearchNode>> bfs(const std::vector<Conf>& roots, Expand&& expand, Goal&& goal,
                                           std::size_t budget) {
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<SearchNode> nodes;
  std::unordered_set<Conf, ConfHash> seen;
  for (const Conf& c : roots)
    if (seen.insert(c).second) nodes.push_back({c, none, none});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes.size() > budget) return std::nullopt;
    bool found = false;
    std::size_t hit = 0;
    const Conf cur = nodes[i].conf;  // nodes grows while expanding
    expand(cur, [&](std::size_t rule, Conf next) {
      if (found) return;
      if (goal(next)) {
        nodes.push_back({std::move(next), i, rule});
        found = true;
        hit = nodes.size() - 1;
        return;
      }
      if (seen.insert(next).second) nodes.push_back({std::move(next), i, rule});
    });
    if (found) {
      std::vector<SearchNode> path;
      for (std::size_t j = hit; j != none; j = nodes[j].parent) path.push_back(nodes[j]);
      std::reverse(path.begin(), path.end());
      return path;
    }
  }
  return std::nullopt;
}

}  // namespace

Verdict model_check_pds(const Pds& m, const ValuationSpec& v, const Formula& f, const PdsId& c0,
                        const McOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  if (c0.stack.empty()) throw PreconditionError("model_check_pds: the start stack must not be empty");
  m.validate();
  v.validate(m.num_states);
  if (c0.state >= m.num_states) throw PreconditionError("model_check_pds: start state out of range");
  for (SymbolId s : c0.stack)
    if (s >= m.num_symbols) throw PreconditionError("model_check_pds: start symbol out of range");
  if (f.atom_bound() > static_cast<int>(v.atoms.size()))
    throw PreconditionError("model_check_pds: formula uses an atom without a valuation");

  Verdict verdict;
  auto finish = [&] {
    verdict.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return verdict;
  };

  try {
    const BuchiAutomaton buchi = to_buchi(Formula::neg(f));
    verdict.stats.buchi_states = buchi.size();
    Annotator ann(v, options.annotator_budget);
    Product pr = build_product(m, ann, buchi, c0, options.rule_budget);
    verdict.stats.product_states = pr.pds.num_states;
    verdict.stats.product_rules = pr.pds.rules.size();
    verdict.stats.annotated_symbols = pr.symbols.size();
    verdict.stats.annotator_states = ann.size();
    const std::uint32_t ns = pr.pds.num_states;

    // Pop summaries: (q, gamma) ->* (q', empty), flagged when passing an
    // accepting state.
    PAutomaton empty_target;
    empty_target.num_states = ns;
    const PAutomaton summaries = prestar(pr.pds, empty_target, pr.accepting);
    verdict.stats.prestar_transitions = summaries.transitions.size();
    std::unordered_map<std::uint64_t, std::vector<std::pair<StateId, bool>>> summary_by;
    for (const auto& t : summaries.transitions)
      summary_by[pair_key(t.from, t.symbol)].emplace_back(t.to, t.accepting);

    // Head graph: nodes are rule heads; edges follow skips, pushes and
    // push-then-return summaries.
    std::unordered_map<std::uint64_t, std::uint32_t> head_id;
    std::vector<std::pair<StateId, SymbolId>> heads;
    for (const PdsRule& r : pr.pds.rules)
      if (head_id.emplace(pair_key(r.from, r.symbol), static_cast<std::uint32_t>(heads.size())).second)
        heads.emplace_back(r.from, r.symbol);
    std::vector<std::vector<std::pair<std::uint32_t, bool>>> edges(heads.size());
    auto link = [&](std::uint32_t from, StateId q, SymbolId g, bool flag) {
      auto it = head_id.find(pair_key(q, g));
      if (it != head_id.end()) edges[from].emplace_back(it->second, flag);
    };
    for (const PdsRule& r : pr.pds.rules) {
      const std::uint32_t h = head_id.at(pair_key(r.from, r.symbol));
      const bool acc = pr.accepting[r.from];
      switch (r.command.kind) {
        case Command::Kind::Pop: break;
        case Command::Kind::Skip: link(h, r.to, r.symbol, acc); break;
        case Command::Kind::Push:
          link(h, r.to, r.command.arg, acc);
          if (auto it = summary_by.find(pair_key(r.to, r.command.arg)); it != summary_by.end())
            for (auto [q, b] : it->second) link(h, q, r.symbol, acc || b);
          break;
      }
    }
    const auto comp = scc_ids(edges);
    std::vector<char> repeating_comp(heads.size(), 0);
    for (std::uint32_t u = 0; u < edges.size(); ++u)
      for (auto [w, flag] : edges[u])
        if (flag && comp[u] == comp[w]) repeating_comp[comp[u]] = 1;
    std::vector<char> repeating(heads.size(), 0);
    for (std::uint32_t u = 0; u < heads.size(); ++u) {
      repeating[u] = repeating_comp[comp[u]];
      verdict.stats.repeating_heads += repeating[u];
    }

    // Start configurations of the product.
    std::vector<SymbolId> start_stack;
    {
      const auto annotation = ann.annotate(c0.stack);
      for (std::size_t i = 0; i < c0.stack.size(); ++i)
        start_stack.push_back(pr.symbol_index.at({c0.stack[i], annotation[i]}));
    }
    const std::uint32_t start_index = pr.state_index.at(c0.state);

    if (verdict.stats.repeating_heads == 0) {
      verdict.outcome = Verdict::Outcome::Holds;
      return finish();
    }

    // pre*(Rep Gamma*): a sink state reached from every repeating head.
    PAutomaton rep;
    rep.num_states = ns + 1;
    rep.final = {ns};
    for (std::uint32_t u = 0; u < heads.size(); ++u)
      if (repeating[u]) rep.transitions.push_back({heads[u].first, heads[u].second, ns, false});
    for (SymbolId g = 0; g < pr.symbols.size(); ++g) rep.transitions.push_back({ns, g, ns, false});
    const PAutomaton reach = prestar(pr.pds, rep);
    verdict.stats.prestar_transitions += reach.transitions.size();
    const TransitionIndex reach_index(reach);

    std::vector<Conf> roots;
    for (std::uint32_t s0 : buchi.initial) {
      const StateId q = pr.product_state(start_index, s0);
      if (reach_index.accepts(q, start_stack)) roots.push_back({q, start_stack, false});
    }
    if (roots.empty()) {
      verdict.outcome = Verdict::Outcome::Holds;
      return finish();
    }
    verdict.outcome = Verdict::Outcome::Violated;
    if (!options.witness) return finish();

    // Witness: shortest stem to a repeating head inside pre*(Rep Gamma*),
    // then a cycle that stays above that head's cell.
    const PdsRuleIndex prod_index(pr.pds);
    auto is_repeating = [&](const Conf& c) {
      auto it = head_id.find(pair_key(c.state, c.stack.front()));
      return it != head_id.end() && repeating[it->second];
    };
    auto stem_expand = [&](const Conf& c, auto&& emit) {
      for (std::uint32_t r : prod_index.rules(c.state, c.stack.front())) {
        PdsId next = apply_rule(pr.pds.rules[r], PdsId{c.state, c.stack});
        if (next.stack.empty() || !reach_index.accepts(next.state, next.stack)) continue;
        emit(r, Conf{next.state, std::move(next.stack), false});
      }
    };
    std::optional<std::vector<SearchNode>> stem;
    for (const Conf& root : roots)
      if (is_repeating(root)) stem = std::vector<SearchNode>{{root, 0, 0}};
    if (!stem) stem = bfs(roots, stem_expand, is_repeating, options.witness_budget);
    if (!stem) {
      verdict.message = "no witness: stem search budget exhausted";
      return finish();
    }

    const Conf head = stem->back().conf;
    const StateId hq = head.state;
    const SymbolId hg = head.stack.front();
    const std::size_t max_rel = 64;
    auto cycle_expand = [&](const Conf& c, auto&& emit) {
      for (std::uint32_t r : prod_index.rules(c.state, c.stack.front())) {
        const PdsRule& rule = pr.pds.rules[r];
        if (rule.command.kind == Command::Kind::Pop && c.stack.size() == 1) continue;
        if (rule.command.kind == Command::Kind::Push && c.stack.size() >= max_rel) continue;
        PdsId next = apply_rule(rule, PdsId{c.state, c.stack});
        emit(r, Conf{next.state, std::move(next.stack), c.flag || pr.accepting[c.state] != 0});
      }
    };
    auto closes = [&](const Conf& c) { return c.flag && c.state == hq && c.stack.front() == hg; };
    auto cycle = bfs({Conf{hq, {hg}, false}}, cycle_expand, closes, options.witness_budget);
    if (!cycle) {
      verdict.message = "no witness: cycle search budget exhausted";
      return finish();
    }

    Lasso lasso;
    const std::vector<SymbolId> below(head.stack.begin() + 1, head.stack.end());
    auto to_pds = [&](StateId q, const std::vector<SymbolId>& stack, bool extend) {
      PdsId id{pr.base_of(q), {}};
      for (SymbolId s : stack) id.stack.push_back(pr.symbols[s].first);
      if (extend)
        for (SymbolId s : below) id.stack.push_back(pr.symbols[s].first);
      return id;
    };
    auto letter = [&](StateId q, SymbolId s) {
      return pr.letters.at(pair_key(static_cast<std::uint32_t>(q / pr.buchi_size), s));
    };
    for (std::size_t i = 0; i + 1 < stem->size(); ++i) {
      const Conf& c = (*stem)[i].conf;
      lasso.stem.push_back(to_pds(c.state, c.stack, false));
      lasso.stem_letters.push_back(letter(c.state, c.stack.front()));
      lasso.stem_rules.push_back(pr.origin[(*stem)[i + 1].rule]);
    }
    for (std::size_t i = 0; i + 1 < cycle->size(); ++i) {
      const Conf& c = (*cycle)[i].conf;
      lasso.cycle.push_back(to_pds(c.state, c.stack, true));
      lasso.cycle_letters.push_back(letter(c.state, c.stack.front()));
      lasso.cycle_rules.push_back(pr.origin[(*cycle)[i + 1].rule]);
    }
    verdict.witness = std::move(lasso);
    return finish();
  } catch (const ResourceError& e) {
    verdict.outcome = Verdict::Outcome::ResourceExceeded;
    verdict.witness.reset();
    verdict.message = e.what();
    return finish();
  }
}

bool deadlock_reachable(const Pds& m, const PdsId& c0) {
  PAutomaton dead;
  const StateId sink = m.num_states;
  dead.num_states = m.num_states + 1;
  const PdsRuleIndex index(m);
  for (StateId p = 0; p < m.num_states; ++p) {
    dead.final.push_back(p);
    for (SymbolId g = 0; g < m.num_symbols; ++g)
      if (index.rules(p, g).empty()) dead.transitions.push_back({p, g, sink});
  }
  for (SymbolId g = 0; g < m.num_symbols; ++g) dead.transitions.push_back({sink, g, sink});
  dead.final.push_back(sink);
  return prestar(m, dead).accepts(c0);
}

}  // namespace rpds
