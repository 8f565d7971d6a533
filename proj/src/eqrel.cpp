#include "rpds/eqrel.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace rpds {

namespace {

void check_k(int k) {
  if (k < 1 || k > kMaxRegisters)
    throw PreconditionError("register count " + std::to_string(k) + " outside [1, " +
                            std::to_string(kMaxRegisters) + "]");
}

void check_same_k(const Partition& a, const Partition& b, const char* op) {
  if (a.registers() != b.registers())
    throw PreconditionError(std::string(op) + ": arity mismatch (" +
                            std::to_string(a.registers()) + " vs " +
                            std::to_string(b.registers()) + ")");
}

// Union-find over at most 2*kMaxRegisters+1 slots; the canonical label of a
// slot is the least slot of its class.
template <std::size_t N>
std::array<std::uint8_t, N> canonical_closure(int n, const std::function<bool(int, int)>& joined) {
  std::array<int, N> parent{};
  std::iota(parent.begin(), parent.begin() + n, 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (joined(a, b)) {
        int ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
  std::array<std::uint8_t, N> rep{};
  for (int a = 0; a < n; ++a) rep[a] = static_cast<std::uint8_t>(find(a));
  return rep;
}

}  // namespace

bool Assignment::contains(DataValue d) const {
  return std::find(values.begin(), values.end(), d) != values.end();
}

int Symbol::slot(int k) const {
  switch (kind) {
    case Kind::Reg: return index - 1;
    case Kind::Primed: return k + index - 1;
    case Kind::Top: return 2 * k;
  }
  return 2 * k;
}

Symbol Symbol::from_slot(int slot, int k) {
  if (slot < k) return reg(slot + 1);
  if (slot < 2 * k) return primed(slot - k + 1);
  return top();
}

std::string to_string(Symbol s) {
  switch (s.kind) {
    case Symbol::Kind::Reg: return "x" + std::to_string(s.index);
    case Symbol::Kind::Primed: return "x" + std::to_string(s.index) + "'";
    case Symbol::Kind::Top: return "top";
  }
  return "?";
}

// Partition ----------------------------------------------------------------

Partition Partition::discrete(int k) {
  return closure_of(k, [](int, int) { return false; });
}

Partition Partition::total(int k) {
  return closure_of(k, [](int, int) { return true; });
}

Partition Partition::closure_of(int k, const std::function<bool(int, int)>& joined) {
  check_k(k);
  Partition p;
  p.k_ = static_cast<std::uint8_t>(k);
  p.rep_ = canonical_closure<kSlots>(2 * k + 1, joined);
  return p;
}

Partition Partition::from_blocks(int k, const std::vector<std::vector<Symbol>>& blocks) {
  check_k(k);
  const int n = 2 * k + 1;
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (const Symbol& s : blocks[b]) {
      if (s.kind != Symbol::Kind::Top && (s.index < 1 || s.index > k))
        throw PreconditionError("symbol " + to_string(s) + " out of range for k=" +
                                std::to_string(k));
      int slot = s.slot(k);
      if (owner[slot] != -1 && owner[slot] != static_cast<int>(b))
        throw PreconditionError("symbol " + to_string(s) + " listed in two blocks");
      owner[slot] = static_cast<int>(b);
    }
  }
  return closure_of(k, [&](int a, int b) { return owner[a] != -1 && owner[a] == owner[b]; });
}

std::size_t Partition::slot(Symbol s) const { return static_cast<std::size_t>(s.slot(k_)); }

std::vector<std::vector<Symbol>> Partition::blocks() const {
  std::vector<std::vector<Symbol>> out;
  std::vector<int> block_of(kSlots, -1);
  for (int s = 0; s < slots(); ++s) {
    int r = rep_[s];
    if (block_of[r] == -1) {
      block_of[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[block_of[r]].push_back(Symbol::from_slot(s, k_));
  }
  return out;
}

std::size_t Partition::hash() const {
  std::size_t h = k_;
  for (int s = 0; s < slots(); ++s) h = h * 31 + rep_[s];
  return h;
}

// RegPartition -------------------------------------------------------------

RegPartition RegPartition::discrete(int k) {
  return closure_of(k, [](int, int) { return false; });
}

RegPartition RegPartition::total(int k) {
  return closure_of(k, [](int, int) { return true; });
}

RegPartition RegPartition::closure_of(int k, const std::function<bool(int, int)>& joined) {
  check_k(k);
  RegPartition p;
  p.k_ = static_cast<std::uint8_t>(k);
  p.rep_ = canonical_closure<kMaxRegisters>(k, joined);
  return p;
}

RegPartition RegPartition::from_blocks(int k, const std::vector<std::vector<int>>& blocks) {
  check_k(k);
  std::vector<int> owner(static_cast<std::size_t>(k), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int r : blocks[b]) {
      if (r < 1 || r > k)
        throw PreconditionError("register x" + std::to_string(r) + " out of range for k=" +
                                std::to_string(k));
      if (owner[r - 1] != -1 && owner[r - 1] != static_cast<int>(b))
        throw PreconditionError("register x" + std::to_string(r) + " listed in two blocks");
      owner[r - 1] = static_cast<int>(b);
    }
  return closure_of(k, [&](int a, int b) { return owner[a] != -1 && owner[a] == owner[b]; });
}

std::vector<std::vector<int>> RegPartition::blocks() const {
  std::vector<std::vector<int>> out;
  std::vector<int> block_of(kMaxRegisters, -1);
  for (int s = 0; s < k_; ++s) {
    int r = rep_[s];
    if (block_of[r] == -1) {
      block_of[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[block_of[r]].push_back(s + 1);
  }
  return out;
}

// Satisfaction -------------------------------------------------------------

namespace {

DataValue value_at(int slot, int k, const Assignment& theta, DataValue d,
                   const Assignment& theta2) {
  if (slot < k) return theta[slot];
  if (slot < 2 * k) return theta2[slot - k];
  return d;
}

void check_triple_arity(const Assignment& theta, const Assignment& theta2, int k) {
  if (theta.size() != k || theta2.size() != k)
    throw PreconditionError("assignment arity does not match k=" + std::to_string(k));
}

}  // namespace

bool models_triple(const Assignment& theta, DataValue d, const Assignment& theta2,
                   const Partition& phi) {
  const int k = phi.registers();
  check_triple_arity(theta, theta2, k);
  const int n = phi.slots();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      bool equal = value_at(a, k, theta, d, theta2) == value_at(b, k, theta, d, theta2);
      if (equal != phi.related_slots(a, b)) return false;
    }
  return true;
}

bool models_reg(const Assignment& theta, const RegPartition& psi) {
  const int k = psi.registers();
  if (theta.size() != k)
    throw PreconditionError("assignment arity does not match k=" + std::to_string(k));
  for (int i = 1; i <= k; ++i)
    for (int j = i + 1; j <= k; ++j)
      if ((theta[i - 1] == theta[j - 1]) != psi.related(i, j)) return false;
  return true;
}

Partition induced(const Assignment& theta, DataValue d, const Assignment& theta2) {
  const int k = theta.size();
  check_triple_arity(theta, theta2, k);
  return Partition::closure_of(k, [&](int a, int b) {
    return value_at(a, k, theta, d, theta2) == value_at(b, k, theta, d, theta2);
  });
}

RegPartition lat(const Partition& phi) {
  const int k = phi.registers();
  return RegPartition::closure_of(k, [&](int i, int j) { return phi.related_slots(k + i, k + j); });
}

// Algebra ------------------------------------------------------------------

bool composable(const Partition& phi1, const Partition& phi2) {
  check_same_k(phi1, phi2, "composable");
  const int k = phi1.registers();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (phi1.related_slots(k + i, k + j) != phi2.related_slots(i, j)) return false;
  return true;
}

bool composable_top(const Partition& phi1, const Partition& phi2) {
  if (!composable(phi1, phi2)) return false;
  const int k = phi1.registers();
  const int top = 2 * k;
  for (int i = 0; i < k; ++i)
    if (phi1.related_slots(k + i, top) != phi2.related_slots(i, top)) return false;
  return true;
}

namespace {

// Shared body of compose and compose_top. Slots below k and 2k (top) form the
// "before" side; slots k..2k-1 are the primed registers.
Partition compose_impl(const Partition& phi1, const Partition& phi2, bool through_top) {
  const int k = phi1.registers();
  const int top = 2 * k;
  auto before = [&](int s) { return s < k || s == top; };
  return Partition::closure_of(k, [&](int a, int b) {
    if (before(a) && before(b)) return phi1.related_slots(a, b);
    if (!before(a) && !before(b)) return phi2.related_slots(a, b);
    int u = before(a) ? a : b;  // x_i or top
    int j = before(a) ? b : a;  // x'_j
    for (int l = 0; l < k; ++l)
      if (phi1.related_slots(u, k + l) && phi2.related_slots(l, j)) return true;
    return through_top && phi1.related_slots(u, top) && phi2.related_slots(top, j);
  });
}

}  // namespace

Partition compose(const Partition& phi1, const Partition& phi2) {
  if (!composable(phi1, phi2))
    throw PreconditionError("compose: " + to_string(phi1) + " and " + to_string(phi2) +
                            " are not composable");
  return compose_impl(phi1, phi2, false);
}

Partition compose_top(const Partition& phi1, const Partition& phi2) {
  if (!composable_top(phi1, phi2))
    throw PreconditionError("compose_top: " + to_string(phi1) + " and " + to_string(phi2) +
                            " are not top-composable");
  return compose_impl(phi1, phi2, true);
}

Partition eqj(const Partition& phi, int j) {
  const int k = phi.registers();
  if (j < 1 || j > k)
    throw PreconditionError("eqj: register " + std::to_string(j) + " out of range for k=" +
                            std::to_string(k));
  const int top = 2 * k;
  const int pj = k + j - 1;
  return Partition::closure_of(k, [&](int a, int b) {
    if (a < k && b < k) return phi.related_slots(k + a, k + b);
    if (a < k && b == top) return phi.related_slots(k + a, pj);
    if (a < k && b == k + a) return true;
    return false;
  });
}

// Enumeration --------------------------------------------------------------

namespace {

// Restricted growth strings of length n in lexicographic order; calls emit
// with the block label of each position.
template <typename Emit>
void for_each_rgs(int n, Emit&& emit) {
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  std::vector<int> maxprefix(static_cast<std::size_t>(n), 0);
  while (true) {
    emit(label);
    int i = n - 1;
    while (i > 0 && label[i] == maxprefix[i - 1] + 1) --i;
    if (i == 0) return;
    ++label[i];
    maxprefix[i] = std::max(maxprefix[i - 1], label[i]);
    for (int j = i + 1; j < n; ++j) {
      label[j] = 0;
      maxprefix[j] = maxprefix[i];
    }
  }
}

}  // namespace

std::vector<Partition> enumerate_phi(int k, int max_k) {
  if (k < 1) throw PreconditionError("enumerate_phi: k must be at least 1");
  if (k > max_k || k > kMaxRegisters)
    throw ResourceError("enumerate_phi: k=" + std::to_string(k) + " exceeds the bound " +
                        std::to_string(std::min(max_k, kMaxRegisters)));
  std::vector<Partition> out;
  out.reserve(static_cast<std::size_t>(bell_number(2 * k + 1)));
  for_each_rgs(2 * k + 1, [&](const std::vector<int>& label) {
    out.push_back(Partition::closure_of(k, [&](int a, int b) { return label[a] == label[b]; }));
  });
  return out;
}

std::vector<RegPartition> enumerate_reg(int k) {
  check_k(k);
  std::vector<RegPartition> out;
  for_each_rgs(k, [&](const std::vector<int>& label) {
    out.push_back(RegPartition::closure_of(k, [&](int a, int b) { return label[a] == label[b]; }));
  });
  return out;
}

std::uint64_t bell_number(int n) {
  // Bell triangle: each row starts with the last entry of the previous row.
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

PhiTable::PhiTable(int k, int max_k) : k_(k), members_(enumerate_phi(k, max_k)) {
  index_.reserve(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i)
    index_.emplace(members_[i], static_cast<std::uint32_t>(i));
}

std::uint32_t PhiTable::index_of(const Partition& p) const {
  auto it = index_.find(p);
  if (it == index_.end())
    throw PreconditionError("partition " + to_string(p) + " is not in Phi_" + std::to_string(k_));
  return it->second;
}

// Text syntax --------------------------------------------------------------

namespace {

class PartitionLexer {
 public:
  explicit PartitionLexer(std::string_view text) : text_(text) {}

  std::vector<std::vector<Symbol>> parse(int k) {
    std::vector<std::vector<Symbol>> blocks;
    skip_ws();
    while (pos_ < text_.size()) {
      expect('{');
      std::vector<Symbol> block;
      skip_ws();
      if (peek() != '}') {
        block.push_back(symbol(k));
        skip_ws();
        while (peek() == ',') {
          ++pos_;
          block.push_back(symbol(k));
          skip_ws();
        }
      }
      expect('}');
      blocks.push_back(std::move(block));
      skip_ws();
    }
    return blocks;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Symbol symbol(int k) {
    skip_ws();
    if (text_.substr(pos_, 3) == "top") {
      pos_ += 3;
      return Symbol::top();
    }
    if (peek() != 'x') fail("expected a symbol x<i>, x<i>' or top");
    const std::size_t at = pos_;
    ++pos_;
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a register index");
    int index = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (index < 1 || index > k) {
      pos_ = at;
      fail("register index " + std::to_string(index) + " out of range");
    }
    if (peek() == '\'') {
      ++pos_;
      return Symbol::primed(index);
    }
    return Symbol::reg(index);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("partition: " + what, 0, pos_ + 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Partition parse_partition(std::string_view text, int k) {
  check_k(k);
  return Partition::from_blocks(k, PartitionLexer(text).parse(k));
}

RegPartition parse_reg_partition(std::string_view text, int k) {
  check_k(k);
  std::vector<std::vector<int>> blocks;
  for (const auto& block : PartitionLexer(text).parse(k)) {
    std::vector<int> regs;
    for (const Symbol& s : block) {
      if (s.kind != Symbol::Kind::Reg)
        throw ParseError("register partition may only mention x1..x" + std::to_string(k));
      regs.push_back(s.index);
    }
    blocks.push_back(std::move(regs));
  }
  return RegPartition::from_blocks(k, blocks);
}

std::string to_string(const Partition& p) {
  std::string out;
  for (const auto& block : p.blocks()) {
    out += '{';
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (i) out += ',';
      out += to_string(block[i]);
    }
    out += '}';
  }
  return out;
}

std::string to_string(const RegPartition& p) {
  std::string out;
  for (const auto& block : p.blocks()) {
    out += '{';
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (i) out += ',';
      out += "x" + std::to_string(block[i]);
    }
    out += '}';
  }
  return out;
}

}  // namespace rpds
