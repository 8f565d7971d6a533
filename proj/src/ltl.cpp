#include "rpds/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "rpds/error.hpp"

namespace rpds {

// Formula --------------------------------------------------------------------

Formula Formula::make(Kind kind, int atom, std::vector<Formula> args) {
  return Formula(std::make_shared<const Node>(Node{kind, atom, std::move(args)}));
}

Formula Formula::tt() {
  static const Formula t = make(Kind::True, -1, {});
  return t;
}

Formula Formula::atom(int index) {
  if (index < 0 || index >= kMaxAtoms)
    throw PreconditionError("atom index " + std::to_string(index) + " out of range");
  return make(Kind::Atom, index, {});
}

Formula Formula::neg(Formula f) {
  if (f.kind() == Kind::Not) return f.lhs();
  return make(Kind::Not, -1, {std::move(f)});
}

Formula Formula::conj(Formula a, Formula b) { return make(Kind::And, -1, {std::move(a), std::move(b)}); }
Formula Formula::next(Formula f) { return make(Kind::Next, -1, {std::move(f)}); }
Formula Formula::until(Formula a, Formula b) {
  return make(Kind::Until, -1, {std::move(a), std::move(b)});
}
Formula Formula::disj(Formula a, Formula b) { return neg(conj(neg(std::move(a)), neg(std::move(b)))); }
Formula Formula::eventually(Formula f) { return until(tt(), std::move(f)); }
Formula Formula::always(Formula f) { return neg(eventually(neg(std::move(f)))); }

std::size_t Formula::size() const {
  std::size_t n = 1;
  for (const auto& a : node_->args) n += a.size();
  return n;
}

int Formula::atom_bound() const {
  int bound = kind() == Kind::Atom ? atom_index() + 1 : 0;
  for (const auto& a : node_->args) bound = std::max(bound, a.atom_bound());
  return bound;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.atom_index() != b.atom_index()) return false;
  const auto& x = a.node_->args;
  const auto& y = b.node_->args;
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

// Parser ---------------------------------------------------------------------

namespace {

class LtlParser {
 public:
  LtlParser(std::string_view text, std::vector<std::string>& atoms) : text_(text), atoms_(atoms) {}

  Formula parse() {
    Formula f = implication();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, pos_ + 1); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string_view peek_word() {
    skip_space();
    std::size_t end = pos_;
    if (end < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      while (end < text_.size() && ident_char(text_[end])) ++end;
    return text_.substr(pos_, end - pos_);
  }

  bool eat_keyword(std::string_view kw) {
    if (peek_word() != kw) return false;
    pos_ += kw.size();
    return true;
  }

  Formula implication() {
    Formula f = disjunction();
    skip_space();
    if (text_.substr(pos_, 2) == "->") {
      pos_ += 2;
      return Formula::disj(Formula::neg(f), implication());
    }
    return f;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (eat('|')) f = Formula::disj(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = until();
    while (eat('&')) f = Formula::conj(f, until());
    return f;
  }

  Formula until() {
    Formula f = unary();
    if (eat_keyword("U")) return Formula::until(f, until());
    return f;
  }

  Formula unary() {
    if (eat('!')) return Formula::neg(unary());
    if (eat_keyword("X")) return Formula::next(unary());
    if (eat_keyword("F")) return Formula::eventually(unary());
    if (eat_keyword("G")) return Formula::always(unary());
    return primary();
  }

  Formula primary() {
    if (eat('(')) {
      Formula f = implication();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    std::string_view word = peek_word();
    if (word.empty()) {
      if (pos_ == text_.size()) fail("unexpected end of formula");
      fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    if (word == "U") fail("'U' needs a left operand");
    pos_ += word.size();
    if (word == "tt") return Formula::tt();
    auto it = std::find(atoms_.begin(), atoms_.end(), word);
    if (it == atoms_.end()) {
      if (atoms_.size() >= static_cast<std::size_t>(kMaxAtoms)) fail("too many atoms");
      atoms_.emplace_back(word);
      it = atoms_.end() - 1;
    }
    return Formula::atom(static_cast<int>(it - atoms_.begin()));
  }

  std::string_view text_;
  std::vector<std::string>& atoms_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_ltl(std::string_view text, std::vector<std::string>& atoms) {
  return LtlParser(text, atoms).parse();
}

std::string to_string(const Formula& f, const std::vector<std::string>& atoms) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return "tt";
    case K::Atom:
      return f.atom_index() < static_cast<int>(atoms.size()) ? atoms[f.atom_index()]
                                                              : "a" + std::to_string(f.atom_index());
    case K::Not: return "!" + to_string(f.lhs(), atoms);
    case K::Next: return "X " + to_string(f.lhs(), atoms);
    case K::And: return "(" + to_string(f.lhs(), atoms) + " & " + to_string(f.rhs(), atoms) + ")";
    case K::Until: return "(" + to_string(f.lhs(), atoms) + " U " + to_string(f.rhs(), atoms) + ")";
  }
  return {};
}

// Subformula table -------------------------------------------------------------

namespace {

// Distinct subformulas in post-order, children referenced by index.
struct Closure {
  struct Entry {
    Formula::Kind kind;
    int atom;
    int lhs = -1, rhs = -1;
    int basis = -1;  // bit in a tableau state, for atoms, X and U
  };
  std::vector<Entry> entries;
  std::vector<Formula> formulas;
  int basis_size = 0;

  explicit Closure(const Formula& f) { add(f); }

  int add(const Formula& f) {
    for (std::size_t i = 0; i < formulas.size(); ++i)
      if (formulas[i] == f) return static_cast<int>(i);
    using K = Formula::Kind;
    Entry e{f.kind(), f.atom_index()};
    if (f.kind() == K::Not || f.kind() == K::Next || f.kind() == K::And || f.kind() == K::Until)
      e.lhs = add(f.lhs());
    if (f.kind() == K::And || f.kind() == K::Until) e.rhs = add(f.rhs());
    if (f.kind() == K::Atom || f.kind() == K::Next || f.kind() == K::Until) e.basis = basis_size++;
    entries.push_back(e);
    formulas.push_back(f);
    return static_cast<int>(entries.size() - 1);
  }

  int root() const { return static_cast<int>(entries.size()) - 1; }
};

}  // namespace

// Lasso semantics --------------------------------------------------------------

bool eval_word(const Formula& f, const std::vector<Letter>& stem, const std::vector<Letter>& cycle) {
  if (cycle.empty()) throw PreconditionError("eval_word: the cycle must not be empty");
  const Closure cl(f);
  const std::size_t n = stem.size() + cycle.size();
  auto letter = [&](std::size_t i) { return i < stem.size() ? stem[i] : cycle[i - stem.size()]; };
  auto succ = [&](std::size_t i) { return i + 1 < n ? i + 1 : stem.size(); };

  std::vector<std::vector<char>> val(cl.entries.size(), std::vector<char>(n, 0));
  using K = Formula::Kind;
  for (std::size_t e = 0; e < cl.entries.size(); ++e) {
    const auto& en = cl.entries[e];
    auto& v = val[e];
    switch (en.kind) {
      case K::True: std::fill(v.begin(), v.end(), 1); break;
      case K::Atom:
        for (std::size_t i = 0; i < n; ++i) v[i] = (letter(i) >> en.atom) & 1u;
        break;
      case K::Not:
        for (std::size_t i = 0; i < n; ++i) v[i] = !val[en.lhs][i];
        break;
      case K::And:
        for (std::size_t i = 0; i < n; ++i) v[i] = val[en.lhs][i] && val[en.rhs][i];
        break;
      case K::Next:
        for (std::size_t i = 0; i < n; ++i) v[i] = val[en.lhs][succ(i)];
        break;
      case K::Until: {
        // Least fixpoint of v = b | (a & X v); n backward sweeps suffice.
        const auto& a = val[en.lhs];
        const auto& b = val[en.rhs];
        bool changed = true;
        while (changed) {
          changed = false;
          for (std::size_t j = n; j-- > 0;) {
            char nv = b[j] || (a[j] && v[succ(j)]);
            if (nv != v[j]) {
              v[j] = nv;
              changed = true;
            }
          }
        }
        break;
      }
    }
  }
  return val[cl.root()][0];
}

// Tableau ----------------------------------------------------------------------

BuchiAutomaton to_buchi(const Formula& f) {
  const Closure cl(f);
  if (cl.basis_size > 20) throw ResourceError("to_buchi: formula has too many temporal subformulas");
  using K = Formula::Kind;
  using Bits = std::uint32_t;

  auto eval_all = [&](Bits s) {
    std::vector<char> v(cl.entries.size());
    for (std::size_t e = 0; e < cl.entries.size(); ++e) {
      const auto& en = cl.entries[e];
      switch (en.kind) {
        case K::True: v[e] = 1; break;
        case K::Atom:
        case K::Next:
        case K::Until: v[e] = (s >> en.basis) & 1u; break;
        case K::Not: v[e] = !v[en.lhs]; break;
        case K::And: v[e] = v[en.lhs] && v[en.rhs]; break;
      }
    }
    return v;
  };

  std::vector<int> untils, nexts;
  Letter atom_mask = 0;
  for (std::size_t e = 0; e < cl.entries.size(); ++e) {
    if (cl.entries[e].kind == K::Until) untils.push_back(static_cast<int>(e));
    if (cl.entries[e].kind == K::Next) nexts.push_back(static_cast<int>(e));
    if (cl.entries[e].kind == K::Atom) atom_mask |= Letter{1} << cl.entries[e].atom;
  }

  // Locally consistent assignments: u true needs b or a now, u false needs !b.
  struct Elem {
    Bits bits;
    std::vector<char> v;
  };
  std::vector<Elem> elems;
  for (Bits s = 0; s < (Bits{1} << cl.basis_size); ++s) {
    auto v = eval_all(s);
    bool ok = true;
    for (int u : untils) {
      const auto& en = cl.entries[u];
      if (v[u] ? !(v[en.rhs] || v[en.lhs]) : v[en.rhs]) ok = false;
    }
    if (ok) elems.push_back({s, std::move(v)});
  }

  auto step_ok = [&](const Elem& s, const Elem& t) {
    for (int x : nexts)
      if (s.v[x] != t.v[cl.entries[x].lhs]) return false;
    for (int u : untils) {
      const auto& en = cl.entries[u];
      bool required = s.v[en.rhs] || (s.v[en.lhs] && t.v[u]);
      if (s.v[u] != required) return false;
    }
    return true;
  };
  auto in_f = [&](const Elem& s, std::size_t i) {
    const int u = untils[i];
    return !s.v[u] || s.v[cl.entries[u].rhs];
  };
  const std::size_t m = std::max<std::size_t>(1, untils.size());

  // Degeneralized product (elem, counter), built from the initial states.
  BuchiAutomaton out;
  std::map<std::pair<std::size_t, std::size_t>, std::uint32_t> ids;
  std::vector<std::pair<std::size_t, std::size_t>> todo;
  auto id_of = [&](std::size_t e, std::size_t c) {
    auto [it, inserted] = ids.emplace(std::make_pair(e, c), static_cast<std::uint32_t>(out.succ.size()));
    if (inserted) {
      out.succ.emplace_back();
      out.mask.push_back(atom_mask);
      Letter value = 0;
      for (const auto& en : cl.entries)
        if (en.kind == K::Atom && ((elems[e].bits >> en.basis) & 1u)) value |= Letter{1} << en.atom;
      out.value.push_back(value);
      out.accepting.push_back(c == 0 && (untils.empty() || in_f(elems[e], 0)));
      todo.emplace_back(e, c);
    }
    return it->second;
  };
  for (std::size_t e = 0; e < elems.size(); ++e)
    if (elems[e].v[cl.root()]) out.initial.push_back(id_of(e, 0));
  while (!todo.empty()) {
    auto [e, c] = todo.back();
    todo.pop_back();
    const std::uint32_t from = ids.at({e, c});
    const std::size_t nc = untils.empty() ? 0 : (in_f(elems[e], c) ? (c + 1) % m : c);
    for (std::size_t t = 0; t < elems.size(); ++t)
      if (step_ok(elems[e], elems[t])) {
        std::uint32_t to = id_of(t, nc);
        out.succ[from].push_back(to);
      }
  }
  return out;
}

bool accepts_lasso(const BuchiAutomaton& b, const std::vector<Letter>& stem,
                   const std::vector<Letter>& cycle) {
  if (cycle.empty()) throw PreconditionError("accepts_lasso: the cycle must not be empty");
  const std::size_t n = stem.size() + cycle.size();
  auto letter = [&](std::size_t i) { return i < stem.size() ? stem[i] : cycle[i - stem.size()]; };
  auto succ_pos = [&](std::size_t i) { return i + 1 < n ? i + 1 : stem.size(); };
  auto node = [&](std::uint32_t s, std::size_t p) { return s * n + p; };

  // Product nodes (s, p) where s reads letter(p).
  const std::size_t total = b.size() * n;
  auto successors = [&](std::size_t v) {
    std::vector<std::size_t> out;
    const auto s = static_cast<std::uint32_t>(v / n);
    const std::size_t p = v % n;
    const std::size_t q = succ_pos(p);
    for (std::uint32_t t : b.succ[s])
      if (b.reads(t, letter(q))) out.push_back(node(t, q));
    return out;
  };
  auto reach_from = [&](const std::vector<std::size_t>& roots) {
    std::vector<char> seen(total, 0);
    std::vector<std::size_t> stack;
    for (auto r : roots)
      if (!seen[r]) {
        seen[r] = 1;
        stack.push_back(r);
      }
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto w : successors(v))
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    return seen;
  };

  std::vector<std::size_t> roots;
  for (std::uint32_t s : b.initial)
    if (b.reads(s, letter(0))) roots.push_back(node(s, 0));
  const auto reachable = reach_from(roots);
  for (std::size_t v = 0; v < total; ++v) {
    // Accepting states are only pumped on the cycle part.
    if (!reachable[v] || !b.accepting[v / n] || v % n < stem.size()) continue;
    if (reach_from(successors(v))[v]) return true;
  }
  return false;
}

}  // namespace rpds
