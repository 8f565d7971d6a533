// rpdsmc: LTL model checking of register pushdown systems.
//
// Exit codes: 0 holds / clean, 1 violated / violation found, 2 error or
// resource limit.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "rpds/error.hpp"
#include "rpds/instance.hpp"
#include "rpds/text_format.hpp"

using namespace rpds;
using nlohmann::json;

namespace {

struct InstanceArgs {
  std::string system, start, ltl, ltl_file;
  std::vector<std::string> vals;

  void add(CLI::App* cmd, bool need_start, bool need_formula) {
    cmd->add_option("system", system, "system file (.rpds)")->required()->check(CLI::ExistingFile);
    auto* s = cmd->add_option("--start", start, "start ID file (.id)")->check(CLI::ExistingFile);
    if (need_start) s->required();
    cmd->add_option("--val", vals, "atom valuation <atom>=<file.ra>, repeatable");
    if (need_formula) {
      auto* group = cmd->add_option_group("formula");
      group->add_option("--ltl", ltl, "LTL formula");
      group->add_option("--ltl-file", ltl_file, "file holding the LTL formula")->check(CLI::ExistingFile);
      group->require_option(1);
    }
  }

  std::vector<std::pair<std::string, std::string>> bindings() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : vals) {
      auto eq = v.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == v.size())
        throw PreconditionError("--val expects <atom>=<file.ra>, got '" + v + "'");
      out.emplace_back(v.substr(0, eq), v.substr(eq + 1));
    }
    return out;
  }

  Instance load() const {
    std::string formula = ltl;
    if (!ltl_file.empty()) {
      formula = read_file(ltl_file);
      while (!formula.empty() && std::isspace(static_cast<unsigned char>(formula.back()))) formula.pop_back();
    }
    if (formula.empty()) formula = "tt";
    return load_instance(system, bindings(), formula, start);
  }
};

std::string letter_text(Letter l, const std::vector<std::string>& atoms) {
  std::string out = "{";
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if ((l >> i) & 1u) out += (out.size() > 1 ? "," : "") + atoms[i];
  return out + "}";
}

std::string pds_id_text(const PdsId& id, const ReducedSystem& rm) {
  std::string out = rm.state_name(id.state) + " [";
  for (std::size_t i = 0; i < id.stack.size(); ++i) out += (i ? " " : "") + rm.symbol_name(id.stack[i]);
  return out + "]";
}

json lasso_json(const std::vector<std::string>& ids, const std::vector<std::size_t>& rules,
                const std::vector<Letter>& letters, const std::vector<std::string>& atoms) {
  json out = json::array();
  for (std::size_t i = 0; i < ids.size(); ++i)
    out.push_back({{"id", ids[i]}, {"rule", rules[i] + 1}, {"label", letter_text(letters[i], atoms)}});
  return out;
}

void print_steps(std::ostream& out, const char* title, const std::vector<std::string>& ids,
                 const std::vector<std::size_t>& rules, const std::vector<Letter>& letters,
                 const std::vector<std::string>& atoms, const char* prefix) {
  out << "  " << title << ":\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    out << "    " << ids[i] << ' ' << letter_text(letters[i], atoms) << "  --" << prefix << rules[i] + 1 << "-->\n";
}

// Commands ----------------------------------------------------------------------

int cmd_check(const InstanceArgs& args, const CheckOptions& options, bool as_json) {
  const Instance inst = args.load();
  const CheckReport r = run_check(inst, options);
  const Verdict& v = r.verdict;
  const auto& atoms = inst.valuation.atoms;
  const ReducedSystem& rm = *r.reduced;

  std::vector<std::string> stem, cycle, cstem, ccycle;
  if (v.witness) {
    for (const auto& id : v.witness->stem) stem.push_back(pds_id_text(id, rm));
    for (const auto& id : v.witness->cycle) cycle.push_back(pds_id_text(id, rm));
  }
  if (r.concrete) {
    for (const auto& id : r.concrete->stem) cstem.push_back(format_id(id, inst.system.states));
    for (const auto& id : r.concrete->cycle) ccycle.push_back(format_id(id, inst.system.states));
  }

  if (as_json) {
    json j{{"verdict", to_string(v.outcome)},
           {"formula", to_string(inst.formula, atoms)},
           {"message", v.message},
           {"deadlock_reachable", r.deadlock},
           {"reduced", {{"partitions", r.phi_count}, {"states", r.reduced_states}, {"rules", r.reduced_rules}}},
           {"stats",
            {{"product_states", v.stats.product_states},
             {"product_rules", v.stats.product_rules},
             {"annotated_symbols", v.stats.annotated_symbols},
             {"annotator_states", v.stats.annotator_states},
             {"buchi_states", v.stats.buchi_states},
             {"repeating_heads", v.stats.repeating_heads},
             {"prestar_transitions", v.stats.prestar_transitions},
             {"reduce_seconds", r.reduce_seconds},
             {"check_seconds", v.stats.seconds}}}};
    if (v.witness)
      j["witness"] = {{"stem", lasso_json(stem, v.witness->stem_rules, v.witness->stem_letters, atoms)},
                      {"cycle", lasso_json(cycle, v.witness->cycle_rules, v.witness->cycle_letters, atoms)}};
    if (r.concrete)
      j["concrete_witness"] = {
          {"stem", lasso_json(cstem, r.concrete->stem_rules, r.concrete->stem_letters, atoms)},
          {"cycle", lasso_json(ccycle, r.concrete->cycle_rules, r.concrete->cycle_letters, atoms)}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "verdict: " << to_string(v.outcome) << '\n'
              << "formula: " << to_string(inst.formula, atoms) << '\n'
              << "reduced system: " << r.reduced_states << " states, " << r.reduced_rules << " rules, "
              << r.phi_count << " partitions (" << r.reduce_seconds << " s)\n"
              << "product: " << v.stats.product_states << " states, " << v.stats.product_rules << " rules, "
              << v.stats.buchi_states << " automaton states, " << v.stats.annotator_states
              << " stack annotations, " << v.stats.repeating_heads << " repeating heads (" << v.stats.seconds
              << " s)\n";
    if (r.deadlock) std::cout << "note: a deadlock is reachable; finite runs are not checked\n";
    if (!v.message.empty()) std::cout << "note: " << v.message << '\n';
    if (v.witness) {
      std::cout << "witness (reduced system):\n";
      print_steps(std::cout, "stem", stem, v.witness->stem_rules, v.witness->stem_letters, atoms, "r'");
      print_steps(std::cout, "cycle", cycle, v.witness->cycle_rules, v.witness->cycle_letters, atoms, "r'");
    }
    if (r.concrete) {
      std::cout << "witness (concrete):\n";
      print_steps(std::cout, "stem", cstem, r.concrete->stem_rules, r.concrete->stem_letters, atoms, "r");
      print_steps(std::cout, "cycle", ccycle, r.concrete->cycle_rules, r.concrete->cycle_letters, atoms, "r");
    }
  }
  switch (v.outcome) {
    case Verdict::Outcome::Holds: return 0;
    case Verdict::Outcome::Violated: return 1;
    case Verdict::Outcome::ResourceExceeded: return 2;
  }
  return 2;
}

int cmd_reduce(const InstanceArgs& args, bool reachable, bool provenance) {
  const Rpds m = parse_rpds(read_file(args.system));
  ReduceOptions ro;
  ro.phis = std::make_shared<const PhiTable>(m.k);
  if (reachable) {
    if (args.start.empty()) throw PreconditionError("--reachable needs --start");
    ro.reachable_from = map_id(parse_id(read_file(args.start), m.states, m.k), *ro.phis);
  }
  const ReducedSystem rm = reduce_rpds(m, ro);
  std::cout << format_reduced(rm, provenance);
  for (const auto& [atom, path] : args.bindings()) {
    const Ra a = parse_ra(read_file(path));
    const Nfa n = reduce_ra(a, m.states, rm.phis);
    std::cout << "\n# automaton for " << atom << '\n' << format_reduced_nfa(n, a, m.states, *rm.phis);
  }
  return 0;
}

int cmd_simulate(const InstanceArgs& args, std::size_t steps, const std::string& path, bool as_json) {
  const Rpds m = parse_rpds(read_file(args.system));
  RpdsId cur = parse_id(read_file(args.start), m.states, m.k);
  if (!is_proper(cur)) throw PreconditionError("start ID is not proper");

  std::vector<std::size_t> chosen;
  if (!path.empty()) {
    std::stringstream ss(path);
    for (std::string r; std::getline(ss, r, ',');) {
      if (!r.empty() && r[0] == 'r') r.erase(0, 1);
      std::size_t n = 0;
      try {
        n = std::stoul(r);
      } catch (const std::exception&) {
        throw PreconditionError("--path expects rule numbers like r1,r2");
      }
      if (n < 1 || n > m.rules.size()) throw PreconditionError("--path: no rule r" + std::to_string(n));
      chosen.push_back(n - 1);
    }
    steps = chosen.size();
  }

  json trace = json::array();
  auto emit = [&](const RpdsId& id, std::optional<std::size_t> rule) {
    const std::string text = to_string(id, m.states);
    if (as_json) {
      json e{{"id", text}, {"text", format_id(id, m.states)}, {"depth", id.stack.size()}};
      if (rule) e["rule"] = *rule + 1;
      trace.push_back(e);
    } else {
      std::cout << (rule ? "r" + std::to_string(*rule + 1) : std::string("  ")) << "\t" << text << '\n';
    }
  };
  emit(cur, std::nullopt);
  int status = 0;
  for (std::size_t i = 0; i < steps; ++i) {
    std::optional<RpdsId> next;
    std::size_t rule = 0;
    if (!chosen.empty()) {
      rule = chosen[i];
      next = apply_rule(m.rules[rule], cur);
      if (!next) {
        std::cerr << "r" << rule + 1 << " does not apply at step " << i + 1 << '\n';
        status = 1;
        break;
      }
    } else {
      auto succ = rpds_successors(m, cur);
      if (succ.empty()) {
        if (!as_json) std::cout << "deadlock after " << i << " steps\n";
        break;
      }
      rule = succ.front().rule;
      next = std::move(succ.front().next);
    }
    cur = std::move(*next);
    emit(cur, rule);
  }
  if (as_json) std::cout << json{{"trace", trace}}.dump(2) << '\n';
  return status;
}

int cmd_bisim(const InstanceArgs& args, std::size_t depth, bool as_json) {
  const Rpds m = parse_rpds(read_file(args.system));
  const RpdsId c = parse_id(read_file(args.start), m.states, m.k);
  const ReducedSystem rm = reduce_rpds(m);
  const BisimReport r = bisim_probe(m, rm, c, depth);
  if (as_json) {
    std::cout << json{{"clean", r.clean},
                      {"violation", r.violation},
                      {"ids_checked", r.ids_checked},
                      {"transitions_checked", r.transitions_checked}}
                     .dump(2)
              << '\n';
  } else {
    std::cout << (r.clean ? "clean" : "violation") << ": " << r.ids_checked << " IDs, " << r.transitions_checked
              << " transitions to depth " << depth << '\n';
    if (!r.clean) std::cout << r.violation << '\n';
  }
  return r.clean ? 0 : 1;
}

int cmd_oracle(const InstanceArgs& args, const ExploreOptions& options, const std::string& dump, bool as_json) {
  const Instance inst = args.load();
  const KripkeGraph g = explore(inst.system, inst.valuation, inst.start, options);
  if (!dump.empty()) {
    std::ofstream out(dump);
    if (!out) throw Error("cannot write " + dump);
    dump_graph(g, out);
  }
  if (g.truncated) {
    std::cerr << "graph truncated at stack depth " << options.max_stack << "; no verdict\n";
    return 2;
  }
  const OracleVerdict v = check_finite(inst.system, g, inst.formula, inst.start);
  const auto& atoms = inst.valuation.atoms;
  std::vector<std::string> stem, cycle;
  if (v.witness) {
    for (const auto& id : v.witness->stem) stem.push_back(format_id(id, inst.system.states));
    for (const auto& id : v.witness->cycle) cycle.push_back(format_id(id, inst.system.states));
  }
  if (as_json) {
    json j{{"verdict", v.holds ? "holds" : "violated"},
           {"formula", to_string(inst.formula, atoms)},
           {"nodes", g.nodes.size()},
           {"deadlocks", g.deadlocks()}};
    if (v.witness)
      j["witness"] = {{"stem", lasso_json(stem, v.witness->stem_rules, v.witness->stem_letters, atoms)},
                      {"cycle", lasso_json(cycle, v.witness->cycle_rules, v.witness->cycle_letters, atoms)}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "verdict: " << (v.holds ? "holds" : "violated") << '\n'
              << "formula: " << to_string(inst.formula, atoms) << '\n'
              << "explored: " << g.nodes.size() << " IDs up to renaming, " << g.deadlocks() << " deadlocks\n";
    if (v.witness) {
      std::cout << "witness:\n";
      print_steps(std::cout, "stem", stem, v.witness->stem_rules, v.witness->stem_letters, atoms, "r");
      print_steps(std::cout, "cycle", cycle, v.witness->cycle_rules, v.witness->cycle_letters, atoms, "r");
    }
  }
  return v.holds ? 0 : 1;
}

int cmd_enum_phi(int k, bool count_only, bool as_json) {
  const auto phis = enumerate_phi(k);
  if (as_json) {
    json list = json::array();
    for (const auto& p : phis) list.push_back(to_string(p));
    std::cout << json{{"k", k}, {"count", phis.size()}, {"partitions", list}}.dump(2) << '\n';
  } else if (count_only) {
    std::cout << phis.size() << '\n';
  } else {
    for (const auto& p : phis) std::cout << to_string(p) << '\n';
    std::cout << phis.size() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LTL model checking of register pushdown systems"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  InstanceArgs check_args, reduce_args, sim_args, bisim_args, oracle_args;
  CheckOptions check_opts;
  auto* check = app.add_subcommand("check", "decide the formula through the reduced pushdown system");
  check_args.add(check, true, true);
  check->add_flag("--concretize", check_opts.concretize, "map the witness back to concrete IDs");
  check->add_flag("--reachable", check_opts.reachable, "build only the part of the reduction reachable from the start");
  check->add_option("--annotator-budget", check_opts.mc.annotator_budget, "max stack annotations");
  check->add_option("--rule-budget", check_opts.mc.rule_budget, "max product rules");
  check->add_flag("!--no-witness", check_opts.mc.witness, "skip witness extraction");

  bool reduce_reachable = false, no_provenance = false;
  auto* reduce = app.add_subcommand("reduce", "print the reduced pushdown system and automata");
  reduce_args.add(reduce, false, false);
  reduce->add_flag("--reachable", reduce_reachable, "keep only heads reachable from --start");
  reduce->add_flag("--no-provenance", no_provenance, "omit the source rule comments");

  std::size_t steps = 10;
  std::string path;
  auto* simulate = app.add_subcommand("simulate", "print canonical steps from the start ID");
  sim_args.add(simulate, true, false);
  simulate->add_option("-n,--steps", steps, "number of steps (first applicable rule each time)");
  simulate->add_option("--path", path, "comma-separated rules to apply, e.g. r1,r2,r3");

  std::size_t depth = 6;
  auto* bisim = app.add_subcommand("bisim", "probe the bisimulation between the system and its reduction");
  bisim_args.add(bisim, true, false);
  bisim->add_option("--depth", depth, "probe depth");

  ExploreOptions explore_opts;
  std::string dump;
  auto* oracle = app.add_subcommand("oracle", "decide the formula on the explicit ID graph");
  oracle_args.add(oracle, true, true);
  oracle->add_option("--max-nodes", explore_opts.max_nodes, "node limit");
  oracle->add_option("--max-stack", explore_opts.max_stack, "stack depth limit");
  oracle->add_flag("--truncate", explore_opts.truncate, "cut the graph at the stack limit instead of failing");
  oracle->add_option("--dump", dump, "write the explored graph to this file");

  int k = 2;
  bool count_only = false;
  auto* enum_phi = app.add_subcommand("enum-phi", "list the partitions of x1..xk, x1'..xk', top");
  enum_phi->add_option("-k", k, "register count")->check(CLI::Range(1, kMaxRegisters));
  enum_phi->add_flag("--count", count_only, "print the number only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*check) return cmd_check(check_args, check_opts, as_json);
    if (*reduce) return cmd_reduce(reduce_args, reduce_reachable, !no_provenance);
    if (*simulate) return cmd_simulate(sim_args, steps, path, as_json);
    if (*bisim) return cmd_bisim(bisim_args, depth, as_json);
    if (*oracle) return cmd_oracle(oracle_args, explore_opts, dump, as_json);
    if (*enum_phi) return cmd_enum_phi(k, count_only, as_json);
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
