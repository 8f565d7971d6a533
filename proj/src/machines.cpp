#include "rpds/machines.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

namespace rpds {

// Rpds / Ra ------------------------------------------------------------------

std::optional<StateId> Rpds::find_state(const std::string& name) const {
  auto it = std::find(states.begin(), states.end(), name);
  if (it == states.end()) return std::nullopt;
  return static_cast<StateId>(it - states.begin());
}

StateId Rpds::state(const std::string& name) const {
  if (auto s = find_state(name)) return *s;
  throw PreconditionError("unknown state '" + name + "'");
}

void Rpds::validate() const {
  if (k < 1 || k > kMaxRegisters)
    throw PreconditionError("register count " + std::to_string(k) + " out of range");
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const RpdsRule& rule = rules[r];
    const std::string where = "rule " + std::to_string(r + 1) + ": ";
    if (rule.from >= states.size() || rule.to >= states.size())
      throw PreconditionError(where + "state out of range");
    if (rule.guard.registers() != k)
      throw PreconditionError(where + "guard has " + std::to_string(rule.guard.registers()) +
                              " registers, expected " + std::to_string(k));
    if (rule.command.kind == Command::Kind::Push &&
        (rule.command.arg < 1 || rule.command.arg > static_cast<std::uint32_t>(k)))
      throw PreconditionError(where + "push register " + std::to_string(rule.command.arg) +
                              " out of range");
  }
}

bool Ra::is_initial(StateId q) const {
  return std::find(initial.begin(), initial.end(), q) != initial.end();
}

void Ra::validate() const {
  base.validate();
  for (std::size_t r = 0; r < base.rules.size(); ++r)
    if (base.rules[r].command.kind != Command::Kind::Pop)
      throw PreconditionError("rule " + std::to_string(r + 1) +
                              ": register automata have pop rules only");
  for (StateId q : initial)
    if (q >= base.states.size()) throw PreconditionError("initial state out of range");
  for (const auto& [q, psi] : accept) {
    if (q >= base.states.size()) throw PreconditionError("accepting state out of range");
    if (psi.registers() != base.k)
      throw PreconditionError("accepting condition has the wrong register count");
  }
}

std::size_t RpdsIdHash::operator()(const RpdsId& id) const {
  std::size_t h = id.state;
  auto mix = [&h](std::uint32_t v) { h = h * 1000003u ^ v; };
  for (const auto& d : id.theta.values) mix(d.id);
  for (const auto& cell : id.stack) {
    mix(cell.value.id + 0x9e3779b9u);
    for (const auto& d : cell.saved.values) mix(d.id);
  }
  return h;
}

// Freshness semantics --------------------------------------------------------

bool frsp(const Assignment& theta2, DataValue d, const Assignment& theta,
          std::span<const Assignment> saved) {
  for (const DataValue& v : theta2.values) {
    if (v == d || theta.contains(v)) continue;
    for (const Assignment& s : saved)
      if (s.contains(v)) return false;
  }
  return true;
}

bool is_proper(const RpdsId& id) {
  const std::size_t m = id.stack.size();
  const int k = id.theta.size();
  // hist[0..m-1] are the saved assignments bottom-up, hist[m] is theta.
  std::vector<const Assignment*> hist;
  hist.reserve(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const Assignment& s = id.stack[m - 1 - i].saved;
    if (s.size() != k) return false;
    hist.push_back(&s);
  }
  hist.push_back(&id.theta);

  // Once a value tracked from hist[i] is missing from some later hist[j], it
  // must stay missing.
  auto never_returns = [&](DataValue v, std::size_t i) {
    bool gone = false;
    for (std::size_t j = i + 1; j <= m; ++j) {
      bool present = hist[j]->contains(v);
      if (gone && present) return false;
      gone = gone || !present;
    }
    return true;
  };

  for (std::size_t i = 0; i < m; ++i) {
    DataValue d = id.stack[m - 1 - i].value;
    if (!hist[i]->contains(d)) return false;
    if (!never_returns(d, i)) return false;
    for (const DataValue& v : hist[i]->values)
      if (!never_returns(v, i)) return false;
  }
  return true;
}

namespace {

void collect_values(const RpdsId& id, std::vector<std::uint32_t>& out) {
  for (const auto& v : id.theta.values) out.push_back(v.id);
  for (const auto& cell : id.stack) {
    out.push_back(cell.value.id);
    for (const auto& v : cell.saved.values) out.push_back(v.id);
  }
}

}  // namespace

std::optional<RpdsId> apply_rule(const RpdsRule& rule, const RpdsId& id) {
  if (id.stack.empty() || rule.from != id.state) return std::nullopt;
  const Partition& phi = rule.guard;
  const int k = phi.registers();
  if (id.theta.size() != k)
    throw PreconditionError("ID has " + std::to_string(id.theta.size()) +
                            " registers, rule expects " + std::to_string(k));
  const int top = 2 * k;
  const DataValue d = id.stack.front().value;
  auto before = [&](int slot) { return slot == top ? d : id.theta[slot]; };

  // The guard's restriction to x1..xk, top must match (theta, d) exactly.
  auto before_slot = [&](int i) { return i < k ? i : top; };
  for (int a = 0; a <= k; ++a)
    for (int b = a + 1; b <= k; ++b) {
      int sa = before_slot(a), sb = before_slot(b);
      if ((before(sa) == before(sb)) != phi.related_slots(sa, sb)) return std::nullopt;
    }

  std::vector<std::uint32_t> used;
  collect_values(id, used);
  std::sort(used.begin(), used.end());
  std::uint32_t candidate = 0;
  std::size_t cursor = 0;
  auto next_fresh = [&] {
    while (cursor < used.size() && used[cursor] <= candidate) {
      if (used[cursor] == candidate) ++candidate;
      ++cursor;
    }
    return DataValue{candidate++};
  };

  Assignment theta2;
  theta2.values.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const int slot = k + j;
    const int rep = phi.representative(slot);
    if (rep < k) {
      theta2[j] = id.theta[rep];
    } else if (rep < slot) {
      theta2[j] = theta2[rep - k];  // earlier primed register of the same block
    } else if (phi.related_slots(slot, top)) {
      theta2[j] = d;
    } else {
      theta2[j] = next_fresh();
    }
  }

  RpdsId next;
  next.state = rule.to;
  switch (rule.command.kind) {
    case Command::Kind::Pop:
      next.stack.assign(id.stack.begin() + 1, id.stack.end());
      break;
    case Command::Kind::Skip:
      next.stack = id.stack;
      break;
    case Command::Kind::Push:
      next.stack.reserve(id.stack.size() + 1);
      next.stack.push_back(StackCell{theta2[static_cast<int>(rule.command.arg) - 1], theta2});
      next.stack.insert(next.stack.end(), id.stack.begin(), id.stack.end());
      break;
  }
  next.theta = std::move(theta2);
  return next;
}

std::vector<RpdsStep> rpds_successors_unchecked(const Rpds& m, const RpdsId& id) {
  std::vector<RpdsStep> out;
  if (id.stack.empty()) return out;
  for (std::size_t r = 0; r < m.rules.size(); ++r)
    if (auto next = apply_rule(m.rules[r], id)) out.push_back({r, std::move(*next)});
  return out;
}

std::vector<RpdsStep> rpds_successors(const Rpds& m, const RpdsId& id) {
  if (id.theta.size() != m.k)
    throw PreconditionError("ID arity does not match k=" + std::to_string(m.k));
  if (!is_proper(id)) throw PreconditionError("rpds_successors: ID is not proper");
  return rpds_successors_unchecked(m, id);
}

bool ra_accepts(const Ra& a, const RpdsId& id) {
  if (id.theta.size() != a.base.k)
    throw PreconditionError("ID arity does not match k=" + std::to_string(a.base.k));
  if (!is_proper(id)) throw PreconditionError("ra_accepts: ID is not proper");
  if (!a.is_initial(id.state)) return false;

  // Pop-only runs: the remaining stack is a suffix of the original one, so
  // (state, theta, depth) identifies a search node.
  std::set<std::tuple<StateId, Assignment, std::size_t>> seen;
  std::vector<RpdsId> work{id};
  while (!work.empty()) {
    RpdsId cur = std::move(work.back());
    work.pop_back();
    if (!seen.emplace(cur.state, cur.theta, cur.stack.size()).second) continue;
    if (cur.stack.empty()) {
      for (const auto& [q, psi] : a.accept)
        if (q == cur.state && models_reg(cur.theta, psi)) return true;
      continue;
    }
    for (auto& step : rpds_successors_unchecked(a.base, cur)) work.push_back(std::move(step.next));
  }
  return false;
}

// Pds / Nfa ------------------------------------------------------------------

void Pds::validate() const {
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const PdsRule& rule = rules[r];
    if (rule.from >= num_states || rule.to >= num_states)
      throw PreconditionError("pds rule " + std::to_string(r) + ": state out of range");
    if (rule.symbol >= num_symbols ||
        (rule.command.kind == Command::Kind::Push && rule.command.arg >= num_symbols))
      throw PreconditionError("pds rule " + std::to_string(r) + ": symbol out of range");
  }
}

void Nfa::validate() const {
  base.validate();
  for (const PdsRule& rule : base.rules)
    if (rule.command.kind != Command::Kind::Pop)
      throw PreconditionError("nfa rules must be pop rules");
  for (StateId q : initial)
    if (q >= base.num_states) throw PreconditionError("nfa initial state out of range");
  for (StateId q : final)
    if (q >= base.num_states) throw PreconditionError("nfa final state out of range");
}

std::size_t PdsIdHash::operator()(const PdsId& id) const {
  std::size_t h = id.state;
  for (SymbolId s : id.stack) h = h * 1000003u ^ s;
  return h;
}

namespace {
std::uint64_t head_key(StateId p, SymbolId gamma) {
  return (static_cast<std::uint64_t>(p) << 32) | gamma;
}
}  // namespace

PdsRuleIndex::PdsRuleIndex(const Pds& m) {
  for (std::size_t r = 0; r < m.rules.size(); ++r)
    by_head_[head_key(m.rules[r].from, m.rules[r].symbol)].push_back(static_cast<std::uint32_t>(r));
}

std::span<const std::uint32_t> PdsRuleIndex::rules(StateId p, SymbolId gamma) const {
  auto it = by_head_.find(head_key(p, gamma));
  if (it == by_head_.end()) return {};
  return it->second;
}

PdsId apply_rule(const PdsRule& rule, const PdsId& id) {
  PdsId next;
  next.state = rule.to;
  switch (rule.command.kind) {
    case Command::Kind::Pop:
      next.stack.assign(id.stack.begin() + 1, id.stack.end());
      break;
    case Command::Kind::Skip:
      next.stack = id.stack;
      break;
    case Command::Kind::Push:
      next.stack.reserve(id.stack.size() + 1);
      next.stack.push_back(rule.command.arg);
      next.stack.insert(next.stack.end(), id.stack.begin(), id.stack.end());
      break;
  }
  return next;
}

std::vector<PdsStep> pds_successors(const Pds& m, const PdsId& id) {
  std::vector<PdsStep> out;
  if (id.stack.empty()) return out;
  for (std::size_t r = 0; r < m.rules.size(); ++r) {
    const PdsRule& rule = m.rules[r];
    if (rule.from == id.state && rule.symbol == id.stack.front())
      out.push_back({r, apply_rule(rule, id)});
  }
  return out;
}

std::vector<PdsStep> pds_successors(const Pds& m, const PdsRuleIndex& index, const PdsId& id) {
  std::vector<PdsStep> out;
  if (id.stack.empty()) return out;
  for (std::uint32_t r : index.rules(id.state, id.stack.front()))
    out.push_back({r, apply_rule(m.rules[r], id)});
  return out;
}

bool nfa_accepts(const Nfa& a, const PdsId& id) {
  if (std::find(a.initial.begin(), a.initial.end(), id.state) == a.initial.end()) return false;
  std::vector<char> current(a.base.num_states, 0), next;
  current[id.state] = 1;
  for (SymbolId gamma : id.stack) {
    next.assign(a.base.num_states, 0);
    bool any = false;
    for (const PdsRule& rule : a.base.rules)
      if (rule.symbol == gamma && current[rule.from]) {
        next[rule.to] = 1;
        any = true;
      }
    if (!any) return false;
    current.swap(next);
  }
  for (StateId f : a.final)
    if (current[f]) return true;
  return false;
}

// Rendering ------------------------------------------------------------------

std::string to_string(DataValue d) { return "d" + std::to_string(d.id); }

std::string to_string(const Assignment& theta) {
  std::string out = "[";
  for (int i = 0; i < theta.size(); ++i) {
    if (i) out += ',';
    out += to_string(theta[i]);
  }
  return out + "]";
}

std::string to_string(const RpdsId& id, std::span<const std::string> state_names) {
  std::string out = "(";
  out += id.state < state_names.size() ? state_names[id.state] : "s" + std::to_string(id.state);
  out += ',' + to_string(id.theta) + ',';
  for (const auto& cell : id.stack) out += '(' + to_string(cell.value) + ',' + to_string(cell.saved) + ')';
  return out + ')';
}

std::string stack_values(const RpdsId& id) {
  std::string out;
  for (std::size_t i = 0; i < id.stack.size(); ++i) {
    if (i) out += ' ';
    out += to_string(id.stack[i].value);
  }
  return out;
}

}  // namespace rpds
