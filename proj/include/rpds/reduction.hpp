#pragma once

// Data-free simulation of a register pushdown system.
//
// The reduced PDS keeps, instead of data values, one partition per stack
// cell describing how the assignment changed between consecutive pushes, and
// one partition in the control state describing the change since the current
// top was pushed. States are P x Phi_k and the stack alphabet is Phi_k.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rpds/eqrel.hpp"
#include "rpds/machines.hpp"

namespace rpds {

/// Which source rule and which (phi1, phi2) produced a reduced rule.
struct Provenance {
  std::uint32_t source_rule = 0;
  std::uint32_t phi1 = 0;  // indices into the PhiTable
  std::uint32_t phi2 = 0;
};

struct ReducedState {
  StateId base = 0;
  std::uint32_t acc = 0;  // index into the PhiTable
};

struct ReducedSystem {
  std::shared_ptr<const PhiTable> phis;
  std::vector<std::string> base_states;
  /// State (p, phi) is p * |Phi_k| + index(phi); symbol phi is index(phi).
  Pds pds;
  /// provenance[r] lists every derivation of pds.rules[r].
  std::vector<std::vector<Provenance>> provenance;

  int registers() const { return phis->registers(); }
  StateId state_of(StateId base, std::uint32_t acc) const;
  StateId state_of(StateId base, const Partition& acc) const;
  ReducedState decode(StateId s) const;
  std::string state_name(StateId s) const;
  std::string symbol_name(SymbolId s) const;
  /// rule r'  ((q,phi2),phi1) -> ((q',phi),com)  in the text format.
  std::string rule_text(std::size_t r) const;
};

struct ReduceOptions {
  int max_k = kDefaultMaxK;
  /// Keep only rules whose head can occur from this start (over-approximated
  /// by reachable states x reachable symbols). Off: the full closure.
  std::optional<PdsId> reachable_from;
  /// Reuse an existing table (must have the machine's k).
  std::shared_ptr<const PhiTable> phis;
};

/// The reduced PDS. The (rule, phi2) enumeration runs in parallel with
/// OpenMP; the result is identical to reduce_rpds_serial.
ReducedSystem reduce_rpds(const Rpds& m, const ReduceOptions& options = {});

/// Single-threaded reference for reduce_rpds.
ReducedSystem reduce_rpds_serial(const Rpds& m, const ReduceOptions& options = {});

/// NFA for a valuation RA whose initial states are exactly rpds_states.
/// States 0 .. |rpds_states|*|Phi_k|-1 coincide with the reduced PDS states
/// built over the same state list and table; the remaining RA states follow.
/// Throws PreconditionError when the initial states differ from rpds_states.
Nfa reduce_ra(const Ra& a, const std::vector<std::string>& rpds_states,
              std::shared_ptr<const PhiTable> phis = nullptr);

/// The bisimulation map R for a non-empty-stack proper ID; the bottom symbol
/// is induced(theta1, d1, theta1). Symbols and the state component are
/// indices into phis; the base state is kept as-is.
PdsId map_id(const RpdsId& c, const PhiTable& phis);

/// R relative to an explicit bottom cell (d0, theta0) of the starting ID;
/// also defined for empty stacks. Non-empty stacks must end in that cell.
PdsId map_id(const RpdsId& c, const StackCell& bottom, const PhiTable& phis);

struct BisimReport {
  bool clean = true;
  std::string violation;
  std::size_t ids_checked = 0;
  std::size_t transitions_checked = 0;
};

/// Depth-bounded check of both bisimulation clauses for R along the canonical
/// successor tree of c.
BisimReport bisim_probe(const Rpds& m, const ReducedSystem& rm, const RpdsId& c,
                        std::size_t depth);

}  // namespace rpds
