#pragma once

// LTL over a finite atom set. Letters are atom bitsets (bit i = atom i).

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace rpds {

using Letter = std::uint32_t;
inline constexpr int kMaxAtoms = 32;

class Formula {
 public:
  enum class Kind : std::uint8_t { True, Atom, Not, And, Next, Until };

  static Formula tt();
  static Formula atom(int index);
  /// Collapses double negation.
  static Formula neg(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula next(Formula f);
  static Formula until(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);  // !(!a & !b)
  static Formula eventually(Formula f);       // tt U f
  static Formula always(Formula f);           // !F!f

  Kind kind() const { return node_->kind; }
  int atom_index() const { return node_->atom; }
  const Formula& lhs() const { return node_->args[0]; }
  const Formula& rhs() const { return node_->args[1]; }
  /// Number of nodes.
  std::size_t size() const;
  /// Largest atom index + 1 (0 if no atoms).
  int atom_bound() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Kind kind;
    int atom = -1;
    std::vector<Formula> args;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Kind kind, int atom, std::vector<Formula> args);
  std::shared_ptr<const Node> node_;
};

/// Parses `f ::= tt | IDENT | !f | f & f | f | f | f -> f | X f | f U f | F f | G f | (f)`.
/// Unary operators bind tightest, then U (right-associative), then &, then |,
/// then -> (right-associative).
/// Identifiers are looked up in `atoms` and appended when new. Throws
/// ParseError with the column of the offending token.
Formula parse_ltl(std::string_view text, std::vector<std::string>& atoms);

std::string to_string(const Formula& f, const std::vector<std::string>& atoms);

/// Truth of f on stem . cycle^omega. Throws PreconditionError for an empty cycle.
bool eval_word(const Formula& f, const std::vector<Letter>& stem, const std::vector<Letter>& cycle);

/// A state-labelled Buchi automaton: a run s0 s1 ... reads w0 w1 ... when
/// each (w_i & mask[s_i]) == value[s_i].
struct BuchiAutomaton {
  std::vector<Letter> mask;
  std::vector<Letter> value;
  std::vector<std::vector<std::uint32_t>> succ;
  std::vector<std::uint32_t> initial;
  std::vector<char> accepting;

  std::size_t size() const { return succ.size(); }
  bool reads(std::uint32_t s, Letter a) const { return (a & mask[s]) == value[s]; }
};

/// Tableau over atoms, X- and U-subformulas, degeneralized with a counter.
/// Only states reachable from an initial state are kept.
BuchiAutomaton to_buchi(const Formula& f);

/// Whether the automaton accepts stem . cycle^omega.
bool accepts_lasso(const BuchiAutomaton& b, const std::vector<Letter>& stem,
                   const std::vector<Letter>& cycle);

}  // namespace rpds
