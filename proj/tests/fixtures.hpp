#pragma once

// Shared objects for the tests: the running example's partitions, machines
// and IDs, plus small generators.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <random>
#include <string>

#include "rpds/eqrel.hpp"
#include "rpds/ltl.hpp"
#include "rpds/machines.hpp"

namespace fx {

using namespace rpds;

inline Partition P(const char* text) { return parse_partition(text, 2); }

inline const Partition phi0 = P("{x1}{x2,x2',top}{x1'}");
inline const Partition phi1 = P("{x1,top}{x2,x2'}{x1'}");
inline const Partition phi2 = P("{x1}{x2,x2'}{x1',top}");
inline const Partition phi3 = P("{x1,x1'}{x2,top}{x2'}");
inline const Partition phi4 = P("{x1,x1'}{x2,x2'}{top}");
inline const Partition phi5 = P("{x1,x1',top}{x2,x2'}");
inline const Partition phi6 = P("{x1,x1'}{x2,x2',top}");

/// psi of the valuation example: x1 and x2 hold different values.
inline const RegPartition psi_distinct = RegPartition::discrete(2);

inline Assignment A(std::uint32_t a, std::uint32_t b) { return Assignment{a, b}; }
inline DataValue D(std::uint32_t d) { return DataValue{d}; }
inline StackCell cell(std::uint32_t d, Assignment saved) { return StackCell{D(d), std::move(saved)}; }

/// The 2-register system with rules r1..r5 over states p0, p1, p2.
inline Rpds example1() {
  Rpds m;
  m.k = 2;
  m.states = {"p0", "p1", "p2"};
  m.rules = {
      {0, phi0, 1, Command::push(1)},  // r1
      {1, phi1, 1, Command::push(1)},  // r2
      {1, phi1, 1, Command::pop()},    // r3
      {1, phi2, 1, Command::pop()},    // r4
      {1, phi3, 2, Command::push(2)},  // r5
  };
  return m;
}

/// The 2-register automaton with rules r6..r8 and accepting condition
/// (q2, x1 != x2). `initial` selects the initial states by name.
inline Ra example2(std::vector<std::string> initial = {"p1"}) {
  Ra a;
  a.base.k = 2;
  a.base.states = {"p0", "p1", "p2", "q1", "q2"};
  a.base.rules = {
      {1, phi1, 3, Command::pop()},  // r6
      {3, phi4, 3, Command::pop()},  // r7
      {3, phi3, 4, Command::pop()},  // r8
  };
  for (const auto& s : initial) a.initial.push_back(a.base.state(s));
  a.accept = {{4, psi_distinct}};
  return a;
}

/// (p0, [d1,d0], (d0,[d1,d0]))
inline RpdsId fig1_start() { return RpdsId{0, A(1, 0), {cell(0, A(1, 0))}}; }

/// The three IDs c1, c2, c3 of the saved-assignment run fragment.
inline RpdsId c1() { return RpdsId{1, A(2, 0), {cell(2, A(2, 0)), cell(0, A(1, 0))}}; }
inline RpdsId c2() {
  return RpdsId{1, A(3, 0), {cell(3, A(3, 0)), cell(2, A(2, 0)), cell(0, A(1, 0))}};
}
inline RpdsId c3() { return RpdsId{1, A(4, 0), {cell(2, A(2, 0)), cell(0, A(1, 0))}}; }

/// Start of the automaton run, lifted with the saved assignments of the
/// system run: (p1,[d3,d0],(d3,[d3,d0])(d2,[d2,d0])(d0,[d1,d0])). Same as c2.
inline RpdsId fig2_start() { return c2(); }

inline std::string instances_dir() {
  const char* dir = std::getenv("RPDS_INSTANCES");
  return dir ? dir : "instances";
}

/// Random proper ID built bottom-up under the freshness discipline: each
/// saved assignment takes values from the previous one or brand-new values,
/// and each pushed value belongs to its saved assignment.
template <typename Rng>
RpdsId random_proper_id(Rng& rng, int k, StateId state, std::size_t depth,
                        std::uint32_t spread = 3) {
  std::uint32_t next_value = 0;
  auto fresh = [&] {
    next_value += 1 + static_cast<std::uint32_t>(rng() % spread);
    return next_value;
  };
  auto step = [&](const Assignment& prev, DataValue top) {
    Assignment a;
    for (int i = 0; i < k; ++i) {
      switch (rng() % 4) {
        case 0: a.values.push_back(DataValue{fresh()}); break;
        case 1: a.values.push_back(top); break;
        default: a.values.push_back(prev[static_cast<int>(rng() % static_cast<unsigned>(k))]);
      }
    }
    return a;
  };
  Assignment theta;
  for (int i = 0; i < k; ++i)
    theta.values.push_back(rng() % 2 && i > 0 ? theta[static_cast<int>(rng() % static_cast<unsigned>(i))]
                                              : DataValue{fresh()});
  RpdsId id;
  id.state = state;
  std::vector<StackCell> bottom_up;
  for (std::size_t n = 0; n < depth; ++n) {
    DataValue d = theta[static_cast<int>(rng() % static_cast<unsigned>(k))];
    bottom_up.push_back(StackCell{d, theta});
    theta = step(theta, d);
  }
  id.theta = theta;
  id.stack.assign(bottom_up.rbegin(), bottom_up.rend());
  return id;
}

/// Random k-register system. Guards are drawn from Phi_k; about half of them
/// are made to agree with a small random (theta, d) so rules fire often.
template <typename Rng>
Rpds random_rpds(Rng& rng, int k, std::size_t states, std::size_t rules) {
  const PhiTable table(k);
  Rpds m;
  m.k = k;
  for (std::size_t s = 0; s < states; ++s) m.states.push_back("s" + std::to_string(s));
  for (std::size_t r = 0; r < rules; ++r) {
    RpdsRule rule;
    rule.from = static_cast<StateId>(rng() % states);
    rule.to = static_cast<StateId>(rng() % states);
    if (rng() % 2) {
      rule.guard = table[rng() % table.size()];
    } else {
      Assignment t, t2;
      for (int i = 0; i < k; ++i) {
        t.values.push_back(DataValue{static_cast<std::uint32_t>(rng() % 3)});
        t2.values.push_back(DataValue{static_cast<std::uint32_t>(rng() % 5)});
      }
      rule.guard = induced(t, t[static_cast<int>(rng() % static_cast<unsigned>(k))], t2);
    }
    switch (rng() % 3) {
      case 0: rule.command = Command::pop(); break;
      case 1: rule.command = Command::skip(); break;
      default: rule.command = Command::push(1 + static_cast<std::uint32_t>(rng() % static_cast<unsigned>(k)));
    }
    m.rules.push_back(rule);
  }
  return m;
}

/// Random pop-only automaton whose initial states are `system_states`, with
/// `extra` further states and one accepting condition per state on average.
template <typename Rng>
Ra random_ra(Rng& rng, int k, const std::vector<std::string>& system_states, std::size_t extra,
             std::size_t rules) {
  Rpds shape = random_rpds(rng, k, system_states.size() + extra, rules);
  Ra a;
  a.base = shape;
  a.base.states = system_states;
  for (std::size_t i = 0; i < extra; ++i) a.base.states.push_back("q" + std::to_string(i));
  for (auto& rule : a.base.rules) rule.command = Command::pop();
  for (StateId s = 0; s < system_states.size(); ++s) a.initial.push_back(s);
  const auto regs = enumerate_reg(k);
  for (StateId s = 0; s < a.base.states.size(); ++s)
    if (rng() % 2) a.accept.push_back({s, regs[rng() % regs.size()]});
  return a;
}

/// Renames data values to 0, 1, ... in order of first occurrence across the
/// given IDs (theta, then cells top-down).
inline std::vector<RpdsId> normalize_values(std::vector<RpdsId> ids) {
  std::map<std::uint32_t, std::uint32_t> names;
  auto rename = [&](DataValue& d) {
    auto [it, _] = names.emplace(d.id, static_cast<std::uint32_t>(names.size()));
    d.id = it->second;
  };
  for (auto& id : ids) {
    for (auto& v : id.theta.values) rename(v);
    for (auto& cell : id.stack) {
      rename(cell.value);
      for (auto& v : cell.saved.values) rename(v);
    }
  }
  return ids;
}

/// Random formula with about `budget` nodes over atoms 0..atoms-1.
template <typename Rng>
Formula random_formula(Rng& rng, int budget, int atoms) {
  if (budget <= 1) {
    return rng() % 5 == 0 ? Formula::tt() : Formula::atom(static_cast<int>(rng() % static_cast<unsigned>(atoms)));
  }
  switch (rng() % 8) {
    case 0: return Formula::neg(random_formula(rng, budget - 1, atoms));
    case 1: return Formula::next(random_formula(rng, budget - 1, atoms));
    case 2: return Formula::eventually(random_formula(rng, budget - 1, atoms));
    case 3: return Formula::always(random_formula(rng, budget - 1, atoms));
    default: {
      int left = 1 + static_cast<int>(rng() % static_cast<unsigned>(budget - 1));
      auto a = random_formula(rng, left, atoms);
      auto b = random_formula(rng, std::max(1, budget - 1 - left), atoms);
      switch (rng() % 3) {
        case 0: return Formula::conj(a, b);
        case 1: return Formula::disj(a, b);
        default: return Formula::until(a, b);
      }
    }
  }
}

/// Random word of length min_len..4.
template <typename Rng>
std::vector<Letter> random_word(Rng& rng, std::size_t min_len, int atoms) {
  std::vector<Letter> w(min_len + rng() % (5 - min_len));
  for (auto& a : w) a = rng() % (1u << atoms);
  return w;
}

}  // namespace fx
