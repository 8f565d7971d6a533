#include "rpds/instance.hpp"

#include <algorithm>
#include <chrono>
#include <memory>

#include "rpds/error.hpp"
#include "rpds/text_format.hpp"

namespace rpds {

void Instance::validate() const {
  system.validate();
  const auto& v = valuation;
  if (v.atoms.size() != v.automata.size()) throw PreconditionError("one automaton per atom is required");
  if (v.atoms.size() > static_cast<std::size_t>(kMaxAtoms))
    throw PreconditionError("at most " + std::to_string(kMaxAtoms) + " atoms");
  std::vector<std::string> want = system.states;
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < v.automata.size(); ++i) {
    const Ra& a = v.automata[i];
    a.validate();
    if (a.base.k != system.k)
      throw PreconditionError("automaton for '" + v.atoms[i] + "' has k=" + std::to_string(a.base.k) +
                              ", the system has k=" + std::to_string(system.k));
    std::vector<std::string> init;
    for (StateId q : a.initial) init.push_back(a.base.states[q]);
    std::sort(init.begin(), init.end());
    init.erase(std::unique(init.begin(), init.end()), init.end());
    if (init != want)
      throw PreconditionError("automaton for '" + v.atoms[i] +
                              "': initial states must be exactly the system states");
  }
  if (formula.atom_bound() > static_cast<int>(v.atoms.size()))
    throw PreconditionError("formula uses an atom without a valuation");
  if (start.state >= system.states.size()) throw PreconditionError("start state out of range");
  if (start.theta.size() != system.k) throw PreconditionError("start ID has the wrong register count");
  if (start.stack.empty()) throw PreconditionError("start ID has an empty stack");
  for (const auto& cell : start.stack)
    if (cell.saved.size() != system.k) throw PreconditionError("start ID has the wrong register count");
  if (!is_proper(start)) throw PreconditionError("start ID is not proper");
}

namespace {

template <class F>
auto in_file(const std::string& path, F&& f) {
  try {
    return f(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(path + ": " + e.what());
  }
}

}  // namespace

Instance load_instance(const std::string& system_path,
                       const std::vector<std::pair<std::string, std::string>>& valuations,
                       const std::string& formula_text, const std::string& start_path) {
  Instance inst;
  inst.system = in_file(system_path, [](const std::string& t) { return parse_rpds(t); });
  for (const auto& [atom, path] : valuations) {
    if (std::find(inst.valuation.atoms.begin(), inst.valuation.atoms.end(), atom) != inst.valuation.atoms.end())
      throw PreconditionError("atom '" + atom + "' is bound twice");
    inst.valuation.atoms.push_back(atom);
    inst.valuation.automata.push_back(in_file(path, [](const std::string& t) { return parse_ra(t); }));
  }
  std::vector<std::string> atoms = inst.valuation.atoms;
  inst.formula = parse_ltl(formula_text, atoms);
  if (atoms.size() > inst.valuation.atoms.size())
    throw PreconditionError("formula atom '" + atoms[inst.valuation.atoms.size()] + "' has no --val binding");
  inst.start = in_file(start_path, [&](const std::string& t) { return parse_id(t, inst.system.states, inst.system.k); });
  inst.validate();
  return inst;
}

std::optional<RpdsLasso> concretize(const Instance& inst, const ReducedSystem& rm, const Lasso& lasso) {
  const StackCell bottom = inst.start.stack.back();
  std::vector<std::vector<StateId>> state_map(inst.valuation.automata.size());
  for (std::size_t i = 0; i < state_map.size(); ++i)
    for (const auto& name : inst.system.states) state_map[i].push_back(inst.valuation.automata[i].base.state(name));
  auto letter = [&](const RpdsId& c) {
    Letter l = 0;
    for (std::size_t i = 0; i < state_map.size(); ++i) {
      RpdsId id = c;
      id.state = state_map[i][c.state];
      if (ra_accepts(inst.valuation.automata[i], id)) l |= Letter{1} << i;
    }
    return l;
  };

  std::vector<const PdsId*> path;
  std::vector<std::size_t> rules;
  for (std::size_t i = 0; i < lasso.stem.size(); ++i) path.push_back(&lasso.stem[i]), rules.push_back(lasso.stem_rules[i]);
  for (std::size_t i = 0; i < lasso.cycle.size(); ++i) path.push_back(&lasso.cycle[i]), rules.push_back(lasso.cycle_rules[i]);
  if (path.empty() || *path.front() != map_id(inst.start, bottom, *rm.phis)) return std::nullopt;

  RpdsLasso out;
  RpdsId cur = inst.start;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const bool in_stem = i < lasso.stem.size();
    const PdsId want = apply_rule(rm.pds.rules[rules[i]], *path[i]);
    std::optional<std::pair<std::size_t, RpdsId>> found;
    for (const auto& p : rm.provenance[rules[i]]) {
      auto next = apply_rule(inst.system.rules[p.source_rule], cur);
      if (next && map_id(*next, bottom, *rm.phis) == want) {
        found.emplace(p.source_rule, std::move(*next));
        break;
      }
    }
    if (!found) return std::nullopt;
    (in_stem ? out.stem : out.cycle).push_back(cur);
    (in_stem ? out.stem_rules : out.cycle_rules).push_back(found->first);
    (in_stem ? out.stem_letters : out.cycle_letters).push_back(letter(cur));
    cur = std::move(found->second);
  }
  return out;
}

CheckReport run_check(const Instance& inst, const CheckOptions& options) {
  inst.validate();
  CheckReport report;
  const auto t0 = std::chrono::steady_clock::now();
  auto phis = std::make_shared<const PhiTable>(inst.system.k);
  report.start = map_id(inst.start, *phis);
  ReduceOptions ro;
  ro.phis = phis;
  if (options.reachable) ro.reachable_from = report.start;
  report.reduced = std::make_shared<const ReducedSystem>(reduce_rpds(inst.system, ro));
  const ReducedSystem& rm = *report.reduced;
  ValuationSpec spec;
  spec.atoms = inst.valuation.atoms;
  for (const Ra& a : inst.valuation.automata) spec.automata.push_back(reduce_ra(a, inst.system.states, phis));
  report.reduce_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report.phi_count = phis->size();
  report.reduced_states = rm.pds.num_states;
  report.reduced_rules = rm.pds.rules.size();

  report.deadlock = deadlock_reachable(rm.pds, report.start);
  report.verdict = model_check_pds(rm.pds, spec, inst.formula, report.start, options.mc);
  if (options.concretize && report.verdict.witness) {
    report.concrete = concretize(inst, rm, *report.verdict.witness);
    if (!report.concrete) report.verdict.message += (report.verdict.message.empty() ? "" : "; ") +
                                                    std::string("witness could not be concretized");
  }
  return report;
}

OracleVerdict run_oracle(const Instance& inst, const ExploreOptions& options) {
  inst.validate();
  const KripkeGraph g = explore(inst.system, inst.valuation, inst.start, options);
  return check_finite(inst.system, g, inst.formula, inst.start);
}

}  // namespace rpds
