#pragma once

// Equivalence relations over register symbols.
//
// A Partition is an element of Phi_k: an equivalence relation over the 2k+1
// symbols x1..xk, x1'..xk', top. It relates the registers before a step, the
// registers after it and the current stack-top value. A RegPartition is an
// equivalence over x1..xk alone and is used in accepting conditions.
//
// Both are stored canonically: every symbol maps to the least member of its
// block under x1 < .. < xk < x1' < .. < xk' < top, so equal relations compare
// equal bytewise and hash cheaply.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rpds/error.hpp"

namespace rpds {

inline constexpr int kMaxRegisters = 8;

/// Default bound on k for anything that enumerates Phi_k.
inline constexpr int kDefaultMaxK = 3;

struct DataValue {
  std::uint32_t id = 0;
  friend auto operator<=>(const DataValue&, const DataValue&) = default;
};

/// theta : [k] -> D. Stored 0-based; register j of the text syntax is values[j-1].
struct Assignment {
  std::vector<DataValue> values;

  Assignment() = default;
  explicit Assignment(std::vector<DataValue> v) : values(std::move(v)) {}
  Assignment(std::initializer_list<std::uint32_t> ids) {
    for (auto id : ids) values.push_back(DataValue{id});
  }

  int size() const { return static_cast<int>(values.size()); }
  const DataValue& operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  DataValue& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
  bool contains(DataValue d) const;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// One of x_i, x'_i (1 <= i <= k) or top.
struct Symbol {
  enum class Kind : std::uint8_t { Reg, Primed, Top };
  Kind kind = Kind::Top;
  int index = 0;  // 1-based register index; 0 for Top

  static Symbol reg(int i) { return {Kind::Reg, i}; }
  static Symbol primed(int i) { return {Kind::Primed, i}; }
  static Symbol top() { return {Kind::Top, 0}; }

  /// Position of the symbol in the fixed order, for register count k.
  int slot(int k) const;
  static Symbol from_slot(int slot, int k);

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

std::string to_string(Symbol s);

/// An element of Phi_k.
class Partition {
 public:
  static constexpr std::size_t kSlots = 2 * kMaxRegisters + 1;

  Partition() = default;

  /// Every symbol in its own block.
  static Partition discrete(int k);
  /// All 2k+1 symbols in one block.
  static Partition total(int k);
  /// make_partition: listed blocks must be disjoint; unlisted symbols become
  /// singletons. Throws PreconditionError on overlap or out-of-range index.
  static Partition from_blocks(int k, const std::vector<std::vector<Symbol>>& blocks);
  /// Smallest equivalence containing every pair (a, b) with joined(a, b);
  /// arguments are slots.
  static Partition closure_of(int k, const std::function<bool(int, int)>& joined);

  int registers() const { return k_; }
  int slots() const { return 2 * k_ + 1; }

  bool related(Symbol a, Symbol b) const { return rep_[slot(a)] == rep_[slot(b)]; }
  bool related_slots(int a, int b) const { return rep_[a] == rep_[b]; }
  int representative(int slot) const { return rep_[static_cast<std::size_t>(slot)]; }

  /// Blocks in order of their least member, each listed in symbol order.
  std::vector<std::vector<Symbol>> blocks() const;

  std::size_t hash() const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.k_ == b.k_ && a.rep_ == b.rep_;
  }
  friend std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
    if (auto c = a.k_ <=> b.k_; c != 0) return c;
    return a.rep_ <=> b.rep_;
  }

 private:
  std::size_t slot(Symbol s) const;

  std::uint8_t k_ = 0;
  std::array<std::uint8_t, kSlots> rep_{};
};

/// An element of Phi'_k: equivalence over x1..xk only.
class RegPartition {
 public:
  RegPartition() = default;

  static RegPartition discrete(int k);
  static RegPartition total(int k);
  /// Registers are 1-based.
  static RegPartition from_blocks(int k, const std::vector<std::vector<int>>& blocks);
  static RegPartition closure_of(int k, const std::function<bool(int, int)>& joined);

  int registers() const { return k_; }
  /// Registers are 1-based.
  bool related(int i, int j) const { return rep_[i - 1] == rep_[j - 1]; }
  std::vector<std::vector<int>> blocks() const;

  friend bool operator==(const RegPartition& a, const RegPartition& b) {
    return a.k_ == b.k_ && a.rep_ == b.rep_;
  }
  friend std::strong_ordering operator<=>(const RegPartition& a, const RegPartition& b) {
    if (auto c = a.k_ <=> b.k_; c != 0) return c;
    return a.rep_ <=> b.rep_;
  }

 private:
  std::uint8_t k_ = 0;
  std::array<std::uint8_t, kMaxRegisters> rep_{};
};

struct PartitionHash {
  std::size_t operator()(const Partition& p) const { return p.hash(); }
};

// Satisfaction -------------------------------------------------------------

/// (theta, d, theta2) |= phi.
bool models_triple(const Assignment& theta, DataValue d, const Assignment& theta2,
                   const Partition& phi);

/// theta |= psi.
bool models_reg(const Assignment& theta, const RegPartition& psi);

/// The unique phi with (theta, d, theta2) |= phi.
Partition induced(const Assignment& theta, DataValue d, const Assignment& theta2);

/// x_i ~lat(phi) x_j iff x'_i ~phi x'_j.
RegPartition lat(const Partition& phi);

// Algebra ------------------------------------------------------------------

/// phi1 (.) phi2: primed blocks of phi1 coincide with unprimed blocks of phi2.
bool composable(const Partition& phi1, const Partition& phi2);

/// composable() plus x'_i ~phi1 top iff x_i ~phi2 top.
bool composable_top(const Partition& phi1, const Partition& phi2);

/// phi1 o phi2. Throws PreconditionError unless composable(phi1, phi2).
Partition compose(const Partition& phi1, const Partition& phi2);

/// phi1 o_T phi2. Throws PreconditionError unless composable_top(phi1, phi2).
Partition compose_top(const Partition& phi1, const Partition& phi2);

/// <phi>_j, the relation satisfied by (theta', theta'(j), theta') whenever
/// (theta, d, theta') |= phi. j is 1-based.
Partition eqj(const Partition& phi, int j);

// Enumeration --------------------------------------------------------------

/// All of Phi_k in a fixed order (restricted-growth order over the symbol
/// order). Throws ResourceError if k > max_k.
std::vector<Partition> enumerate_phi(int k, int max_k = kDefaultMaxK);

/// All of Phi'_k in the same fixed order.
std::vector<RegPartition> enumerate_reg(int k);

/// Bell number via the Bell triangle; independent of enumerate_phi.
std::uint64_t bell_number(int n);

/// Phi_k with a dense index, shared as the stack alphabet of reduced systems.
class PhiTable {
 public:
  explicit PhiTable(int k, int max_k = kDefaultMaxK);

  int registers() const { return k_; }
  std::size_t size() const { return members_.size(); }
  const Partition& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Partition>& members() const { return members_; }
  /// Throws PreconditionError for a partition of a different k.
  std::uint32_t index_of(const Partition& p) const;

 private:
  int k_;
  std::vector<Partition> members_;
  std::unordered_map<Partition, std::uint32_t, PartitionHash> index_;
};

// Text syntax --------------------------------------------------------------

/// `{x1,top}{x2,x2'}`; whitespace is insignificant and unlisted symbols are
/// singletons. `{}` or empty text is the discrete partition.
Partition parse_partition(std::string_view text, int k);
/// Same syntax restricted to x1..xk.
RegPartition parse_reg_partition(std::string_view text, int k);

/// Lists every block, singletons included.
std::string to_string(const Partition& p);
std::string to_string(const RegPartition& p);

}  // namespace rpds

template <>
struct std::hash<rpds::Partition> {
  std::size_t operator()(const rpds::Partition& p) const { return p.hash(); }
};
