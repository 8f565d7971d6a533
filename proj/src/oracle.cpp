#include "rpds/oracle.hpp"

#include <map>
#include <unordered_map>

#include "rpds/error.hpp"

namespace rpds {

std::size_t KripkeGraph::deadlocks() const {
  std::size_t n = 0;
  for (const auto& s : succ) n += s.empty();
  return n;
}

RpdsId normalize(const RpdsId& id) {
  std::map<std::uint32_t, std::uint32_t> names;
  auto rename = [&](DataValue& d) {
    auto [it, _] = names.emplace(d.id, static_cast<std::uint32_t>(names.size()));
    d.id = it->second;
  };
  RpdsId out = id;
  for (auto& v : out.theta.values) rename(v);
  for (auto& cell : out.stack) {
    rename(cell.value);
    for (auto& v : cell.saved.values) rename(v);
  }
  return out;
}

KripkeGraph explore(const Rpds& m, const RaValuation& v, const RpdsId& c0, const ExploreOptions& options) {
  m.validate();
  if (c0.stack.empty()) throw PreconditionError("explore: the start stack must not be empty");
  if (c0.theta.size() != m.k) throw PreconditionError("explore: start ID has the wrong register count");
  if (!is_proper(c0)) throw PreconditionError("explore: start ID is not proper");
  if (v.atoms.size() != v.automata.size())
    throw PreconditionError("explore: one automaton per atom is required");

  // System state -> automaton state, per atom.
  std::vector<std::vector<StateId>> state_map(v.automata.size());
  for (std::size_t i = 0; i < v.automata.size(); ++i) {
    const Ra& a = v.automata[i];
    a.validate();
    if (a.base.k != m.k) throw PreconditionError("explore: automaton for '" + v.atoms[i] + "' has the wrong k");
    for (const auto& name : m.states) {
      auto q = a.base.find_state(name);
      if (!q) throw PreconditionError("explore: automaton for '" + v.atoms[i] + "' lacks state " + name);
      state_map[i].push_back(*q);
    }
  }

  KripkeGraph g;
  g.atoms = v.atoms;
  g.state_names = m.states;
  std::unordered_map<RpdsId, std::uint32_t, RpdsIdHash> index;
  auto intern = [&](RpdsId id) {
    auto [it, inserted] = index.emplace(id, static_cast<std::uint32_t>(g.nodes.size()));
    if (inserted) {
      if (g.nodes.size() >= options.max_nodes)
        throw ExploreLimit(ExploreLimit::Bound::Nodes,
                           "explore: more than " + std::to_string(options.max_nodes) + " nodes");
      g.nodes.push_back(std::move(id));
    }
    return it->second;
  };
  intern(normalize(c0));
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    std::vector<std::pair<std::size_t, std::uint32_t>> out;
    for (auto& step : rpds_successors_unchecked(m, g.nodes[i])) {
      if (step.next.stack.size() > options.max_stack) {
        if (options.truncate) {
          g.truncated = true;
          continue;
        }
        throw ExploreLimit(ExploreLimit::Bound::Stack,
                           "explore: stack deeper than " + std::to_string(options.max_stack));
      }
      out.emplace_back(step.rule, intern(normalize(step.next)));
    }
    g.succ.push_back(std::move(out));
  }

  g.labels.resize(g.nodes.size(), 0);
  for (std::size_t n = 0; n < g.nodes.size(); ++n)
    for (std::size_t i = 0; i < v.automata.size(); ++i) {
      RpdsId id = g.nodes[n];
      id.state = state_map[i][id.state];
      if (ra_accepts(v.automata[i], id)) g.labels[n] |= Letter{1} << i;
    }
  return g;
}

OracleVerdict check_finite(const Rpds& m, const KripkeGraph& g, const Formula& f, const RpdsId& c0) {
  if (g.nodes.empty() || normalize(c0) != g.nodes.front())
    throw PreconditionError("check_finite: the start ID is not the graph's start node");
  if (g.truncated) throw PreconditionError("check_finite: the graph is truncated");
  if (f.atom_bound() > static_cast<int>(g.atoms.size()))
    throw PreconditionError("check_finite: formula uses an atom without a valuation");
  const BuchiAutomaton b = to_buchi(Formula::neg(f));
  const std::size_t nb = b.size();
  const std::size_t total = g.nodes.size() * nb;

  struct Edge {
    std::size_t to;
    std::size_t rule;
  };
  auto edges = [&](std::size_t x) {
    std::vector<Edge> out;
    const std::size_t c = x / nb;
    const auto s = static_cast<std::uint32_t>(x % nb);
    if (!b.reads(s, g.labels[c])) return out;
    for (auto [rule, c2] : g.succ[c])
      for (std::uint32_t s2 : b.succ[s]) out.push_back({c2 * nb + s2, rule});
    return out;
  };
  struct Frame {
    std::size_t node;
    std::size_t rule_in;
    std::vector<Edge> out;
    std::size_t next = 0;
  };

  std::vector<char> outer_seen(total, 0), inner_seen(total, 0);
  std::vector<Frame> outer, inner;
  std::optional<std::size_t> closing_rule;

  auto inner_search = [&](std::size_t seed) {
    inner.clear();
    inner.push_back({seed, 0, edges(seed)});
    while (!inner.empty()) {
      Frame& fr = inner.back();
      if (fr.next == fr.out.size()) {
        inner.pop_back();
        continue;
      }
      const Edge e = fr.out[fr.next++];
      if (e.to == seed) {
        closing_rule = e.rule;
        return true;
      }
      if (!inner_seen[e.to]) {
        inner_seen[e.to] = 1;
        inner.push_back({e.to, e.rule, edges(e.to)});
      }
    }
    return false;
  };

  bool found = false;
  for (std::uint32_t s0 : b.initial) {
    if (found || outer_seen[s0]) continue;
    outer_seen[s0] = 1;
    outer.push_back({s0, 0, edges(s0)});
    while (!outer.empty() && !found) {
      Frame& fr = outer.back();
      if (fr.next < fr.out.size()) {
        const Edge e = fr.out[fr.next++];
        if (!outer_seen[e.to]) {
          outer_seen[e.to] = 1;
          outer.push_back({e.to, e.rule, edges(e.to)});
        }
        continue;
      }
      if (b.accepting[fr.node % nb] && inner_search(fr.node)) {
        found = true;
        break;
      }
      outer.pop_back();
    }
  }

  OracleVerdict verdict;
  if (!found) return verdict;
  verdict.holds = false;

  // outer: root .. seed; inner: seed .. last node before returning.
  RpdsLasso lasso;
  std::vector<std::size_t> rules;
  std::vector<std::size_t> path;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    path.push_back(outer[i].node / nb);
    if (i) rules.push_back(outer[i].rule_in);
  }
  const std::size_t stem_len = outer.size() - 1;
  for (std::size_t i = 1; i < inner.size(); ++i) {
    path.push_back(inner[i].node / nb);
    rules.push_back(inner[i].rule_in);
  }
  rules.push_back(*closing_rule);

  RpdsId cur = c0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const bool in_stem = i < stem_len;
    (in_stem ? lasso.stem : lasso.cycle).push_back(cur);
    (in_stem ? lasso.stem_letters : lasso.cycle_letters).push_back(g.labels[path[i]]);
    (in_stem ? lasso.stem_rules : lasso.cycle_rules).push_back(rules[i]);
    auto next = apply_rule(m.rules[rules[i]], cur);
    if (!next) throw Error("check_finite: witness replay failed");
    cur = std::move(*next);
  }
  verdict.witness = std::move(lasso);
  return verdict;
}

void dump_graph(const KripkeGraph& g, std::ostream& out) {
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    out << n << ' ' << to_string(g.nodes[n], g.state_names) << " {";
    bool first = true;
    for (std::size_t i = 0; i < g.atoms.size(); ++i)
      if ((g.labels[n] >> i) & 1u) {
        out << (first ? "" : ",") << g.atoms[i];
        first = false;
      }
    out << "} ->";
    for (auto [rule, to] : g.succ[n]) out << ' ' << to << ":r" << rule + 1;
    out << '\n';
  }
}

}  // namespace rpds
