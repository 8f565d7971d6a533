#pragma once

// Explicit-state LTL checking over the canonical concrete semantics, for
// systems whose reachable IDs (up to renaming of data values) are finite.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rpds/ltl.hpp"
#include "rpds/machines.hpp"

namespace rpds {

/// One register automaton per atom. Each automaton names the system states
/// among its own states; IDs are matched by state name.
struct RaValuation {
  std::vector<std::string> atoms;
  std::vector<Ra> automata;
};

struct ExploreOptions {
  std::size_t max_nodes = 100'000;
  std::size_t max_stack = 32;
  /// Instead of throwing at the stack bound, drop the deeper successors and
  /// mark the graph truncated (for inspection only).
  bool truncate = false;
};

/// Thrown by explore when a bound is exceeded.
class ExploreLimit : public ResourceError {
 public:
  enum class Bound { Nodes, Stack };
  ExploreLimit(Bound b, const std::string& what) : ResourceError(what), bound_(b) {}
  Bound bound() const noexcept { return bound_; }

 private:
  Bound bound_;
};

/// Reachable IDs with values renamed 0, 1, ... by first occurrence (theta,
/// then cells top-down). Node 0 is the start.
struct KripkeGraph {
  std::vector<RpdsId> nodes;
  std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>> succ;  // (rule, node)
  std::vector<Letter> labels;
  std::vector<std::string> atoms;
  std::vector<std::string> state_names;
  bool truncated = false;

  std::size_t deadlocks() const;
};

/// Renames the data values of an ID by first occurrence.
RpdsId normalize(const RpdsId& id);

/// Breadth-first exploration of the canonical successors of c0. Throws
/// ExploreLimit when a bound is hit and PreconditionError for an improper or
/// empty-stack start, or an automaton that lacks a system state.
KripkeGraph explore(const Rpds& m, const RaValuation& v, const RpdsId& c0,
                    const ExploreOptions& options = {});

/// A concrete run: the cycle's rules, applied again from the last ID, return
/// to cycle[0] up to renaming of data values.
struct RpdsLasso {
  std::vector<RpdsId> stem, cycle;
  std::vector<std::size_t> stem_rules, cycle_rules;
  std::vector<Letter> stem_letters, cycle_letters;
};

struct OracleVerdict {
  bool holds = true;
  std::optional<RpdsLasso> witness;
};

/// Does every infinite path from node 0 satisfy f? Nested depth-first search
/// on the product with the Buchi automaton for !f. `c0` is the concrete start
/// used to replay the witness. Refuses truncated graphs.
OracleVerdict check_finite(const Rpds& m, const KripkeGraph& g, const Formula& f, const RpdsId& c0);

/// One line per node: id, ID, label and successors.
void dump_graph(const KripkeGraph& g, std::ostream& out);

}  // namespace rpds
