#pragma once

// Line-oriented text formats. `#` starts a comment; blank lines are ignored.
//
//   system (.rpds)       k=2
//                        states p0 p1 p2
//                        rule p0 {x1}{x2,x2',top} -> p1 push 1
//
//   automaton (.ra)      k=2
//                        states p0 p1 q1
//                        initial p0 p1
//                        accept q1 {x1}{x2}
//                        rule p1 {x1,top}{x2,x2'} -> q1
//
//   ID (.id)             p1 [d2,d0] (d2,[d2,d0]) (d0,[d1,d0])
//
// A guard written `*` stands for every partition of Phi_k (one rule each).
// Data values are names; dN denotes N, other names get distinct unused
// numbers in order of appearance.

#include <string>
#include <string_view>
#include <vector>

#include "rpds/machines.hpp"
#include "rpds/reduction.hpp"

namespace rpds {

Rpds parse_rpds(std::string_view text);
Ra parse_ra(std::string_view text);
/// Parses an ID over the given state names and register count.
RpdsId parse_id(std::string_view text, const std::vector<std::string>& states, int k);

std::string format_rpds(const Rpds& m);
std::string format_ra(const Ra& a);
std::string format_id(const RpdsId& id, const std::vector<std::string>& states);

/// The reduced system: one rule per line, each followed by comments naming
/// the source rules and (phi1, phi2) that produce it.
std::string format_reduced(const ReducedSystem& rm, bool provenance = true);
/// The automaton reduce_ra(a, rpds_states, phis) built, with states named
/// (q,phi): the system states first, then the remaining automaton states.
std::string format_reduced_nfa(const Nfa& reduced, const Ra& a,
                               const std::vector<std::string>& rpds_states, const PhiTable& phis);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace rpds
