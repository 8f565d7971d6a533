#include "rpds/reduction.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rpds {

// ReducedSystem --------------------------------------------------------------

StateId ReducedSystem::state_of(StateId base, std::uint32_t acc) const {
  return static_cast<StateId>(base * phis->size() + acc);
}

StateId ReducedSystem::state_of(StateId base, const Partition& acc) const {
  return state_of(base, phis->index_of(acc));
}

ReducedState ReducedSystem::decode(StateId s) const {
  const auto n = static_cast<StateId>(phis->size());
  return {s / n, s % n};
}

std::string ReducedSystem::state_name(StateId s) const {
  ReducedState rs = decode(s);
  const std::string& base =
      rs.base < base_states.size() ? base_states[rs.base] : "q" + std::to_string(rs.base);
  return "(" + base + "," + to_string((*phis)[rs.acc]) + ")";
}

std::string ReducedSystem::symbol_name(SymbolId s) const { return to_string((*phis)[s]); }

std::string ReducedSystem::rule_text(std::size_t r) const {
  const PdsRule& rule = pds.rules[r];
  std::string out = "rule " + state_name(rule.from) + " " + symbol_name(rule.symbol) + " -> " +
                    state_name(rule.to) + " ";
  switch (rule.command.kind) {
    case Command::Kind::Pop: return out + "pop";
    case Command::Kind::Skip: return out + "skip";
    case Command::Kind::Push: return out + "push " + symbol_name(rule.command.arg);
  }
  return out;
}

// Construction kernel --------------------------------------------------------

namespace {

struct SourceRule {
  StateId from;  // already in the target numbering of base states
  std::uint32_t guard;
  StateId to;
  Command command;
};

struct Emitted {
  PdsRule rule;
  Provenance why;
};

// Precomputed structure of Phi_k shared by all tasks: phi1 (.) phi2 holds iff
// the primed block structure of phi1 equals the register block structure of
// phi2, so phi1 candidates are grouped by their primed structure.
class Kernel {
 public:
  Kernel(const PhiTable& phis) : phis_(phis) {
    const int k = phis.registers();
    std::map<RegPartition, std::uint32_t> key_index;
    primed_key_.resize(phis.size());
    reg_key_.resize(phis.size());
    auto key_of = [&](const RegPartition& p) {
      auto [it, inserted] = key_index.emplace(p, static_cast<std::uint32_t>(key_index.size()));
      if (inserted) by_primed_key_.emplace_back();
      return it->second;
    };
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const Partition& phi = phis[i];
      primed_key_[i] = key_of(lat(phi));
      by_primed_key_[primed_key_[i]].push_back(static_cast<std::uint32_t>(i));
    }
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const Partition& phi = phis[i];
      RegPartition regs =
          RegPartition::closure_of(k, [&](int a, int b) { return phi.related_slots(a, b); });
      auto it = key_index.find(regs);
      reg_key_[i] = it == key_index.end() ? kNoKey : it->second;
    }
  }

  bool composable(std::uint32_t phi1, std::uint32_t phi2) const {
    return primed_key_[phi1] == reg_key_[phi2];
  }

  /// phi1 candidates with phi1 (.) phi2.
  const std::vector<std::uint32_t>& left_partners(std::uint32_t phi2) const {
    static const std::vector<std::uint32_t> none;
    return reg_key_[phi2] == kNoKey ? none : by_primed_key_[reg_key_[phi2]];
  }

  /// Rules derived from source rule `r` with the given phi2, restricted to
  /// phi1 values accepted by `keep`.
  template <typename Keep>
  void expand(const SourceRule& src, std::uint32_t r, std::uint32_t phi2, Keep&& keep,
              std::vector<Emitted>& out) const {
    const Partition& p2 = phis_[phi2];
    const Partition& p3 = phis_[src.guard];
    if (!composable_top(p2, p3)) return;
    const Partition acc = compose_top(p2, p3);
    const std::uint32_t acc_index = phis_.index_of(acc);
    const auto n = static_cast<StateId>(phis_.size());
    const StateId from = src.from * n + phi2;
    std::uint32_t pushed_state = 0;
    if (src.command.kind == Command::Kind::Push)
      pushed_state = phis_.index_of(eqj(p3, static_cast<int>(src.command.arg)));

    for (std::uint32_t phi1 : left_partners(phi2)) {
      if (!keep(phi1)) continue;
      PdsRule rule;
      rule.from = from;
      rule.symbol = phi1;
      switch (src.command.kind) {
        case Command::Kind::Skip:
          rule.to = src.to * n + acc_index;
          rule.command = Command::skip();
          break;
        case Command::Kind::Pop:
          // phi1 (.) phi2 implies phi1 (.) (phi2 o_T phi3); compose() asserts it.
          rule.to = src.to * n + phis_.index_of(compose(phis_[phi1], acc));
          rule.command = Command::pop();
          break;
        case Command::Kind::Push:
          rule.to = src.to * n + pushed_state;
          rule.command = Command::push(acc_index);
          break;
      }
      out.push_back({rule, Provenance{r, phi1, phi2}});
    }
  }

 private:
  static constexpr std::uint32_t kNoKey = 0xffffffffu;
  const PhiTable& phis_;
  std::vector<std::uint32_t> primed_key_;
  std::vector<std::uint32_t> reg_key_;
  std::vector<std::vector<std::uint32_t>> by_primed_key_;
};

// Sorts by rule and merges the provenance of duplicates.
void finish(std::vector<Emitted>& emitted, ReducedSystem& out) {
  std::stable_sort(emitted.begin(), emitted.end(),
                   [](const Emitted& a, const Emitted& b) { return a.rule < b.rule; });
  for (const Emitted& e : emitted) {
    if (!out.pds.rules.empty() && out.pds.rules.back() == e.rule) {
      out.provenance.back().push_back(e.why);
    } else {
      out.pds.rules.push_back(e.rule);
      out.provenance.push_back({e.why});
    }
  }
}

std::vector<SourceRule> source_rules(const Rpds& m, const PhiTable& phis,
                                     const std::vector<StateId>& renumber) {
  std::vector<SourceRule> out;
  out.reserve(m.rules.size());
  for (const RpdsRule& r : m.rules)
    out.push_back({renumber[r.from], phis.index_of(r.guard), renumber[r.to], r.command});
  return out;
}

std::shared_ptr<const PhiTable> table_for(int k, const ReduceOptions& options) {
  if (options.phis) {
    if (options.phis->registers() != k)
      throw PreconditionError("reduce: partition table has the wrong register count");
    return options.phis;
  }
  return std::make_shared<const PhiTable>(k, options.max_k);
}

ReducedSystem empty_system(const Rpds& m, std::shared_ptr<const PhiTable> phis) {
  ReducedSystem out;
  out.phis = std::move(phis);
  out.base_states = m.states;
  out.pds.num_states = static_cast<std::uint32_t>(m.states.size() * out.phis->size());
  out.pds.num_symbols = static_cast<std::uint32_t>(out.phis->size());
  return out;
}

std::vector<StateId> identity_numbering(std::size_t n) {
  std::vector<StateId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<StateId>(i);
  return ids;
}

// Keeps only rules whose head is reachable under the states x symbols
// over-approximation, growing both sets to a fixpoint.
ReducedSystem reduce_reachable(const Rpds& m, std::shared_ptr<const PhiTable> phis,
                               const PdsId& start) {
  ReducedSystem out = empty_system(m, phis);
  const Kernel kernel(*phis);
  const auto rules = source_rules(m, *phis, identity_numbering(m.states.size()));
  const auto n = static_cast<StateId>(phis->size());
  if (start.state >= out.pds.num_states)
    throw PreconditionError("reduce: start state out of range");

  std::vector<char> state_seen(out.pds.num_states, 0), symbol_seen(n, 0);
  std::vector<StateId> states;
  std::vector<SymbolId> symbols;
  std::deque<std::pair<bool, std::uint32_t>> work;  // (is_state, id)
  auto reach_state = [&](StateId s) {
    if (!state_seen[s]) {
      state_seen[s] = 1;
      work.emplace_back(true, s);
    }
  };
  auto reach_symbol = [&](SymbolId g) {
    if (g >= n) throw PreconditionError("reduce: start symbol out of range");
    if (!symbol_seen[g]) {
      symbol_seen[g] = 1;
      work.emplace_back(false, g);
    }
  };
  reach_state(start.state);
  for (SymbolId g : start.stack) reach_symbol(g);

  std::vector<Emitted> emitted, batch;
  auto absorb = [&] {
    for (const Emitted& e : batch) {
      reach_state(e.rule.to);
      if (e.rule.command.kind == Command::Kind::Push) reach_symbol(e.rule.command.arg);
    }
    emitted.insert(emitted.end(), batch.begin(), batch.end());
    batch.clear();
  };

  while (!work.empty()) {
    auto [is_state, id] = work.front();
    work.pop_front();
    if (is_state) {
      states.push_back(id);
      const StateId base = id / n;
      const std::uint32_t phi2 = id % n;
      for (std::uint32_t r = 0; r < rules.size(); ++r)
        if (rules[r].from == base)
          kernel.expand(rules[r], r, phi2, [&](std::uint32_t phi1) { return symbol_seen[phi1] != 0; },
                        batch);
    } else {
      symbols.push_back(id);
      for (StateId s : states) {
        const StateId base = s / n;
        const std::uint32_t phi2 = s % n;
        if (!kernel.composable(id, phi2)) continue;
        for (std::uint32_t r = 0; r < rules.size(); ++r)
          if (rules[r].from == base)
            kernel.expand(rules[r], r, phi2, [&](std::uint32_t phi1) { return phi1 == id; }, batch);
      }
    }
    absorb();
  }
  finish(emitted, out);
  return out;
}

ReducedSystem reduce_full(const Rpds& m, std::shared_ptr<const PhiTable> phis, bool parallel) {
  ReducedSystem out = empty_system(m, phis);
  const Kernel kernel(*phis);
  const auto rules = source_rules(m, *phis, identity_numbering(m.states.size()));
  const auto n = static_cast<std::uint32_t>(phis->size());
  const std::size_t tasks = rules.size() * n;
  std::vector<std::vector<Emitted>> per_task(tasks);
  auto all = [](std::uint32_t) { return true; };

  if (parallel) {
    std::string failure;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(tasks); ++t) {
      try {
        const auto r = static_cast<std::uint32_t>(t / n);
        kernel.expand(rules[r], r, static_cast<std::uint32_t>(t % n), all, per_task[t]);
      } catch (const std::exception& e) {
#pragma omp critical
        failure = e.what();
      }
    }
    if (!failure.empty()) throw Error("reduce_rpds: " + failure);
  } else {
    for (std::size_t t = 0; t < tasks; ++t) {
      const auto r = static_cast<std::uint32_t>(t / n);
      kernel.expand(rules[r], r, static_cast<std::uint32_t>(t % n), all, per_task[t]);
    }
  }

  std::vector<Emitted> emitted;
  for (auto& chunk : per_task) emitted.insert(emitted.end(), chunk.begin(), chunk.end());
  finish(emitted, out);
  return out;
}

ReducedSystem reduce_impl(const Rpds& m, const ReduceOptions& options, bool parallel) {
  m.validate();
  auto phis = table_for(m.k, options);
  ReducedSystem out = options.reachable_from ? reduce_reachable(m, phis, *options.reachable_from)
                                             : reduce_full(m, phis, parallel);
  const std::size_t bound = m.rules.size() * phis->size() * phis->size();
  if (out.pds.rules.size() > bound)
    throw Error("reduce_rpds: rule count exceeds |Delta| * |Phi_k|^2");
  return out;
}

}  // namespace

ReducedSystem reduce_rpds(const Rpds& m, const ReduceOptions& options) {
  return reduce_impl(m, options, true);
}

ReducedSystem reduce_rpds_serial(const Rpds& m, const ReduceOptions& options) {
  return reduce_impl(m, options, false);
}

Nfa reduce_ra(const Ra& a, const std::vector<std::string>& rpds_states,
              std::shared_ptr<const PhiTable> phis) {
  a.validate();
  {
    std::vector<std::string> init;
    for (StateId q : a.initial) init.push_back(a.base.states[q]);
    std::vector<std::string> expected = rpds_states;
    std::sort(init.begin(), init.end());
    init.erase(std::unique(init.begin(), init.end()), init.end());
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    if (init != expected)
      throw PreconditionError("reduce_ra: initial states of the RA must equal the system states");
  }
  if (!phis) phis = std::make_shared<const PhiTable>(a.base.k);
  if (phis->registers() != a.base.k)
    throw PreconditionError("reduce_ra: partition table has the wrong register count");

  // System states first, in the system's order, then the remaining RA states.
  std::vector<StateId> renumber(a.base.states.size());
  std::vector<char> placed(a.base.states.size(), 0);
  for (std::size_t i = 0; i < rpds_states.size(); ++i) {
    StateId q = a.base.state(rpds_states[i]);
    renumber[q] = static_cast<StateId>(i);
    placed[q] = 1;
  }
  StateId next = static_cast<StateId>(rpds_states.size());
  for (std::size_t q = 0; q < a.base.states.size(); ++q)
    if (!placed[q]) renumber[q] = next++;

  const auto n = static_cast<std::uint32_t>(phis->size());
  Nfa out;
  out.base.num_states = static_cast<std::uint32_t>(a.base.states.size() * n);
  out.base.num_symbols = n;

  const Kernel kernel(*phis);
  const auto rules = source_rules(a.base, *phis, renumber);
  std::vector<Emitted> emitted;
  auto all = [](std::uint32_t) { return true; };
  for (std::uint32_t r = 0; r < rules.size(); ++r)
    for (std::uint32_t phi2 = 0; phi2 < n; ++phi2) kernel.expand(rules[r], r, phi2, all, emitted);
  ReducedSystem scratch;
  finish(emitted, scratch);
  out.base.rules = std::move(scratch.pds.rules);

  for (StateId s = 0; s < rpds_states.size() * n; ++s) out.initial.push_back(s);
  for (std::size_t q = 0; q < a.base.states.size(); ++q)
    for (std::uint32_t phi = 0; phi < n; ++phi) {
      const RegPartition after = lat((*phis)[phi]);
      for (const auto& [aq, psi] : a.accept)
        if (aq == q && psi == after) {
          out.final.push_back(renumber[q] * n + phi);
          break;
        }
    }
  std::sort(out.final.begin(), out.final.end());
  return out;
}

// R ----------------------------------------------------------------------------

PdsId map_id(const RpdsId& c, const StackCell& bottom, const PhiTable& phis) {
  if (!is_proper(c)) throw PreconditionError("map_id: ID is not proper");
  if (!c.stack.empty() && c.stack.back() != bottom)
    throw PreconditionError("map_id: stack does not end in the given bottom cell");
  const std::size_t m = c.stack.size();
  const auto n = static_cast<StateId>(phis.size());

  // Cells bottom-up are (d_1, theta_1) .. (d_m, theta_m); theta_{m+1} is the
  // current assignment and (d_0, theta_0) is the bottom cell.
  auto cell = [&](std::size_t i) -> const StackCell& {
    return i == 0 ? bottom : c.stack[m - i];
  };
  auto theta = [&](std::size_t i) -> const Assignment& {
    return i == m + 1 ? c.theta : cell(i).saved;
  };

  PdsId out;
  out.stack.resize(m);
  for (std::size_t i = 1; i <= m; ++i)
    out.stack[m - i] = phis.index_of(induced(theta(i - 1), cell(i - 1).value, theta(i)));
  out.state = c.state * n + phis.index_of(induced(theta(m), cell(m).value, c.theta));
  return out;
}

PdsId map_id(const RpdsId& c, const PhiTable& phis) {
  if (c.stack.empty()) throw PreconditionError("map_id: the stack must not be empty");
  return map_id(c, c.stack.back(), phis);
}

// Bisimulation probe ---------------------------------------------------------

BisimReport bisim_probe(const Rpds& m, const ReducedSystem& rm, const RpdsId& c,
                        std::size_t depth) {
  if (c.stack.empty()) throw PreconditionError("bisim_probe: the stack must not be empty");
  if (!is_proper(c)) throw PreconditionError("bisim_probe: ID is not proper");
  BisimReport report;
  const StackCell bottom = c.stack.back();
  const PdsRuleIndex index(rm.pds);
  std::unordered_set<RpdsId, RpdsIdHash> seen{c};
  std::deque<std::pair<RpdsId, std::size_t>> work{{c, 0}};

  while (!work.empty()) {
    auto [cur, level] = std::move(work.front());
    work.pop_front();
    if (level >= depth) continue;
    ++report.ids_checked;
    const PdsId image = map_id(cur, bottom, *rm.phis);
    const auto steps = rpds_successors_unchecked(m, cur);
    const auto psteps = pds_successors(rm.pds, index, image);

    std::vector<PdsId> images;
    for (const auto& step : steps) images.push_back(map_id(step.next, bottom, *rm.phis));

    auto describe = [&](const RpdsId& id) { return to_string(id, m.states); };
    for (std::size_t i = 0; i < steps.size(); ++i) {
      ++report.transitions_checked;
      bool matched = std::any_of(psteps.begin(), psteps.end(),
                                 [&](const PdsStep& ps) { return ps.next == images[i]; });
      if (!matched) {
        report.clean = false;
        report.violation = "clause 1: " + describe(cur) + " --r" +
                           std::to_string(steps[i].rule + 1) + "--> " + describe(steps[i].next) +
                           " has no matching reduced step";
        return report;
      }
    }
    for (const auto& ps : psteps) {
      ++report.transitions_checked;
      if (std::find(images.begin(), images.end(), ps.next) == images.end()) {
        report.clean = false;
        report.violation = "clause 2: reduced rule " + rm.rule_text(ps.rule) + " from the image of " +
                           describe(cur) + " has no matching register step";
        return report;
      }
    }
    for (const auto& step : steps)
      if (seen.insert(step.next).second) work.emplace_back(step.next, level + 1);
  }
  return report;
}

}  // namespace rpds
