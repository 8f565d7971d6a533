#pragma once

// LTL model checking of pushdown systems under regular valuations.
//
// Each atom is given by an NFA whose states 0..|P|-1 are the PDS states, so
// A holds at (p, w) iff the NFA accepts (p, w). Stack cells are annotated
// bottom-up with a determinized summary of the stack below them, which makes
// every atom a function of the control state and the annotated top cell. The
// annotated system is multiplied with a Buchi automaton for the negated
// formula and checked for accepting runs by pre* saturation.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpds/ltl.hpp"
#include "rpds/machines.hpp"

namespace rpds {

struct ValuationSpec {
  std::vector<std::string> atoms;
  std::vector<Nfa> automata;  // automata[i] decides atoms[i]

  /// Checks one automaton per atom, each covering the num_states PDS states.
  void validate(std::uint32_t num_states) const;
};

/// Backward-deterministic annotation of stacks. An annotator state is one
/// state set per atom: the NFA states that can drain the stack below a cell
/// into a final state. States are created on demand.
class Annotator {
 public:
  using Ref = std::uint32_t;

  explicit Annotator(ValuationSpec v, std::size_t budget = std::size_t{1} << 16);

  /// Annotation of the empty stack: the final states of every automaton.
  Ref bottom() const { return 0; }
  /// Annotation after reading gamma on top of a stack annotated `below`.
  /// Throws ResourceError when the budget is exhausted.
  Ref next(Ref below, SymbolId gamma);
  /// The atoms true at (p, gamma w) when w is annotated `below`.
  Letter label(StateId p, SymbolId gamma, Ref below) const;
  /// Direct label of a full ID (computes the annotations on the fly).
  Letter label(const PdsId& id);
  /// Per cell, top first, the annotation of the stack below that cell.
  std::vector<Ref> annotate(const std::vector<SymbolId>& stack);
  bool contains(Ref a, std::size_t atom, StateId q) const;

  std::size_t size() const { return sets_.size(); }
  std::size_t atoms() const { return spec_.atoms.size(); }

 private:
  using Bits = std::vector<std::uint64_t>;
  ValuationSpec spec_;
  std::size_t budget_;
  std::vector<std::size_t> offset_;  // bit offset of each atom's slot
  std::size_t width_ = 0;
  std::vector<Bits> sets_;
  std::map<Bits, Ref> index_;
  std::map<std::pair<Ref, SymbolId>, Ref> next_;
  // rules_by_symbol_[atom][gamma] lists (from, to) pop rules.
  std::vector<std::vector<std::vector<std::pair<StateId, StateId>>>> rules_by_symbol_;
  std::vector<std::vector<char>> initial_;

  Ref intern(Bits bits);
};

Annotator backward_determinize(const ValuationSpec& v, std::size_t budget = std::size_t{1} << 16);

/// Multi-automaton over a PDS: states 0..|P|-1 are the control states,
/// further states are auxiliary. (p, w) is accepted when w leads from p to a
/// final state. Transitions carry a flag recording that the pre* derivation
/// behind them passed an accepting control state.
struct PAutomaton {
  struct Transition {
    StateId from;
    SymbolId symbol;
    StateId to;
    bool accepting = false;
    friend auto operator<=>(const Transition&, const Transition&) = default;
  };
  std::uint32_t num_states = 0;
  std::vector<Transition> transitions;
  std::vector<StateId> final;

  bool accepts(const PdsId& id) const;
};

/// pre*(target): the configurations from which some target configuration is
/// reachable. `accepting` marks control states whose visits set the flag on
/// derived transitions; empty means none.
PAutomaton prestar(const Pds& m, const PAutomaton& target, const std::vector<char>& accepting = {});

/// Can c0 reach an ID without successors (a head without rules, or the
/// empty stack)?
bool deadlock_reachable(const Pds& m, const PdsId& c0);

/// A lasso of PDS IDs: the run visits stem, then cycle[0..n-1] and reaches
/// an ID with the same head as cycle[0] whose stack extends cycle[0]'s, so
/// the cycle's rules can repeat forever with the same labels.
struct Lasso {
  std::vector<PdsId> stem, cycle;
  std::vector<std::size_t> stem_rules, cycle_rules;  // rule taken out of each ID
  std::vector<Letter> stem_letters, cycle_letters;
};

struct McStats {
  std::size_t product_states = 0;
  std::size_t product_rules = 0;
  std::size_t annotated_symbols = 0;
  std::size_t annotator_states = 0;
  std::size_t buchi_states = 0;
  std::size_t repeating_heads = 0;
  std::size_t prestar_transitions = 0;
  double seconds = 0;
};

struct Verdict {
  enum class Outcome { Holds, Violated, ResourceExceeded };
  Outcome outcome = Outcome::Holds;
  std::optional<Lasso> witness;
  /// Diagnostics: why no witness was produced, which budget ran out.
  std::string message;
  McStats stats;
};

std::string to_string(Verdict::Outcome o);

struct McOptions {
  std::size_t annotator_budget = std::size_t{1} << 16;
  std::size_t rule_budget = 20'000'000;
  bool witness = true;
  std::size_t witness_budget = 200'000;
};

/// Does every infinite run from c0 satisfy f? Throws PreconditionError for an
/// empty start stack or a formula atom outside v.atoms.
Verdict model_check_pds(const Pds& m, const ValuationSpec& v, const Formula& f, const PdsId& c0,
                        const McOptions& options = {});

}  // namespace rpds
