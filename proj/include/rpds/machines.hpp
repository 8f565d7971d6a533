#pragma once

// Machine descriptions and their one-step semantics.
//
// Register machines (Rpds, Ra) use the freshness semantics: every stack cell
// keeps the assignment current when it was pushed, and a register may only
// receive a value outside theta + {d} if that value appears nowhere in the
// saved assignments. Fresh values are chosen canonically (the least naturals
// absent from the whole ID, one per unconstrained primed block, in block
// order), so each rule yields at most one successor.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rpds/eqrel.hpp"

namespace rpds {

using StateId = std::uint32_t;
using SymbolId = std::uint32_t;

struct Command {
  enum class Kind : std::uint8_t { Pop, Skip, Push };
  Kind kind = Kind::Skip;
  /// Register index (1-based) for register machines, stack symbol for a Pds.
  std::uint32_t arg = 0;

  static Command pop() { return {Kind::Pop, 0}; }
  static Command skip() { return {Kind::Skip, 0}; }
  static Command push(std::uint32_t a) { return {Kind::Push, a}; }

  friend auto operator<=>(const Command&, const Command&) = default;
};

// Register machines ----------------------------------------------------------

struct RpdsRule {
  StateId from = 0;
  Partition guard;
  StateId to = 0;
  Command command;
};

struct Rpds {
  int k = 1;
  std::vector<std::string> states;
  std::vector<RpdsRule> rules;

  /// Throws PreconditionError if the name is unknown.
  StateId state(const std::string& name) const;
  std::optional<StateId> find_state(const std::string& name) const;
  /// Checks rule endpoints, guard arity and push arguments.
  void validate() const;
};

struct Ra {
  Rpds base;
  std::vector<StateId> initial;
  std::vector<std::pair<StateId, RegPartition>> accept;

  bool is_initial(StateId q) const;
  /// validate() of the base plus pop-only rules and in-range initial/accept.
  void validate() const;
};

struct StackCell {
  DataValue value;
  Assignment saved;
  friend auto operator<=>(const StackCell&, const StackCell&) = default;
};

/// (state, theta, stack); stack[0] is the top cell.
struct RpdsId {
  StateId state = 0;
  Assignment theta;
  std::vector<StackCell> stack;
  friend auto operator<=>(const RpdsId&, const RpdsId&) = default;
};

struct RpdsIdHash {
  std::size_t operator()(const RpdsId& id) const;
};

struct RpdsStep {
  std::size_t rule = 0;  // index into Rpds::rules
  RpdsId next;
};

/// frsp(theta2; d, theta; saved): every theta2(i) lies in theta + {d} or in
/// none of the saved assignments.
bool frsp(const Assignment& theta2, DataValue d, const Assignment& theta,
          std::span<const Assignment> saved);

/// The properness predicate on saved-assignment histories.
bool is_proper(const RpdsId& id);

/// Canonical successors, one per applicable rule. Throws PreconditionError
/// for an improper ID. Empty-stack IDs have no successors.
std::vector<RpdsStep> rpds_successors(const Rpds& m, const RpdsId& id);

/// Same, without the properness check; for callers that only feed IDs
/// reached from a proper start.
std::vector<RpdsStep> rpds_successors_unchecked(const Rpds& m, const RpdsId& id);

/// Canonical result of applying one rule, or nullopt if the guard fails.
std::optional<RpdsId> apply_rule(const RpdsRule& rule, const RpdsId& id);

/// Membership in L(a). The ID's state is a state of a. Throws
/// PreconditionError for an improper ID.
bool ra_accepts(const Ra& a, const RpdsId& id);

// Plain pushdown systems -----------------------------------------------------

struct PdsRule {
  StateId from = 0;
  SymbolId symbol = 0;
  StateId to = 0;
  Command command;
  friend auto operator<=>(const PdsRule&, const PdsRule&) = default;
};

struct Pds {
  std::uint32_t num_states = 0;
  std::uint32_t num_symbols = 0;
  std::vector<PdsRule> rules;

  void validate() const;
};

struct Nfa {
  Pds base;
  std::vector<StateId> initial;
  std::vector<StateId> final;

  void validate() const;
};

/// (state, stack); stack[0] is the top symbol.
struct PdsId {
  StateId state = 0;
  std::vector<SymbolId> stack;
  friend auto operator<=>(const PdsId&, const PdsId&) = default;
};

struct PdsIdHash {
  std::size_t operator()(const PdsId& id) const;
};

struct PdsStep {
  std::size_t rule = 0;
  PdsId next;
};

/// Rules grouped by head (state, top symbol).
class PdsRuleIndex {
 public:
  explicit PdsRuleIndex(const Pds& m);
  std::span<const std::uint32_t> rules(StateId p, SymbolId gamma) const;

 private:
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_head_;
};

std::vector<PdsStep> pds_successors(const Pds& m, const PdsId& id);
std::vector<PdsStep> pds_successors(const Pds& m, const PdsRuleIndex& index, const PdsId& id);

/// Applies one rule to an ID whose head matches it.
PdsId apply_rule(const PdsRule& rule, const PdsId& id);

/// Membership in L(a): initial state and a pop run that drains the stack
/// into a final state.
bool nfa_accepts(const Nfa& a, const PdsId& id);

// Rendering ------------------------------------------------------------------

/// d<N> for the natural N.
std::string to_string(DataValue d);
/// [d1,d0]
std::string to_string(const Assignment& theta);
/// (p1,[d2,d0],(d2,[d2,d0])(d0,[d1,d0]))
std::string to_string(const RpdsId& id, std::span<const std::string> state_names);
/// Stack word only, top first: d3 d2 d0
std::string stack_values(const RpdsId& id);

}  // namespace rpds
