#pragma once

// A full model checking instance and the two ways of deciding it: through
// the reduced PDS, and explicitly on the concrete ID graph.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpds/ltl.hpp"
#include "rpds/machines.hpp"
#include "rpds/oracle.hpp"
#include "rpds/pdsmc.hpp"
#include "rpds/reduction.hpp"

namespace rpds {

struct Instance {
  Rpds system;
  RaValuation valuation;
  Formula formula = Formula::tt();
  RpdsId start;

  /// Valuation automata have the system's k and exactly the system states as
  /// initial states; the formula only uses bound atoms; the start ID is
  /// proper, over the system's k, with a non-empty stack.
  void validate() const;
};

/// Builds and validates an instance from files. `valuations` pairs atom names
/// with .ra paths. Errors name the offending file.
Instance load_instance(const std::string& system_path,
                       const std::vector<std::pair<std::string, std::string>>& valuations,
                       const std::string& formula_text, const std::string& start_path);

struct CheckOptions {
  McOptions mc;
  /// Restrict the reduced system to heads reachable from the start.
  bool reachable = false;
  /// Map the witness back to concrete IDs.
  bool concretize = false;
};

struct CheckReport {
  Verdict verdict;
  std::shared_ptr<const ReducedSystem> reduced;
  std::size_t phi_count = 0;
  std::size_t reduced_states = 0;
  std::size_t reduced_rules = 0;
  double reduce_seconds = 0;
  PdsId start;
  /// Some run from the start gets stuck; such runs are finite and do not
  /// count against the formula.
  bool deadlock = false;
  /// Filled by concretize when the witness maps back.
  std::optional<RpdsLasso> concrete;
};

/// Reduces the system and the valuation, then runs model_check_pds from the
/// image of the start ID.
CheckReport run_check(const Instance& inst, const CheckOptions& options = {});

/// Follows a PDS lasso of the reduced system from the concrete start: at each
/// step the unique source rule whose successor maps onto the next PDS ID.
/// Returns nullopt if some step has no such rule.
std::optional<RpdsLasso> concretize(const Instance& inst, const ReducedSystem& rm, const Lasso& lasso);

/// Explicit-state verdict; throws ExploreLimit when the bounds are hit.
OracleVerdict run_oracle(const Instance& inst, const ExploreOptions& options = {});

}  // namespace rpds
