#include "rpds/text_format.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "rpds/error.hpp"

namespace rpds {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

struct Line {
  std::string_view text;  // comment stripped
  std::size_t number;
  std::vector<Token> tokens;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t start = 0, number = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    std::string_view line = text.substr(start, end - start);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    Line l{line, number, {}};
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) l.tokens.push_back({line.substr(i, j - i), i + 1});
      i = j;
    }
    if (!l.tokens.empty()) out.push_back(std::move(l));
    start = end + 1;
  }
  return out;
}

[[noreturn]] void fail(const Line& l, std::size_t column, const std::string& what) {
  throw ParseError(what, l.number, column);
}

int parse_k(const Line& l) {
  std::string_view t = l.text;
  auto eq = t.find('=');
  if (eq == std::string_view::npos) fail(l, l.tokens[0].column, "expected k=<n>");
  std::string value(t.substr(eq + 1));
  value.erase(std::remove_if(value.begin(), value.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
              value.end());
  if (value.empty() || !std::all_of(value.begin(), value.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    fail(l, eq + 2, "expected a register count after k=");
  int k = std::stoi(value);
  if (k < 1 || k > kMaxRegisters) fail(l, eq + 2, "register count out of range");
  return k;
}

bool is_k_line(const Line& l) {
  return l.tokens[0].text == "k" || l.tokens[0].text.substr(0, 2) == "k=";
}

struct Header {
  std::optional<int> k;
  std::vector<std::string> states;
  bool has_states = false;
};

StateId lookup(const Line& l, const Token& t, const std::vector<std::string>& states) {
  auto it = std::find(states.begin(), states.end(), t.text);
  if (it == states.end()) fail(l, t.column, "unknown state '" + std::string(t.text) + "'");
  return static_cast<StateId>(it - states.begin());
}

void require_header(const Line& l, const Header& h) {
  if (!h.k) fail(l, 1, "k=<n> must come first");
  if (!h.has_states) fail(l, 1, "'states' must come before rules");
}

// Parses "rule <p> <partition> -> <q> [rest]" and returns the rule pieces.
struct RawRule {
  StateId from;
  std::vector<Partition> guards;
  StateId to;
  std::vector<Token> rest;
};

RawRule parse_rule(const Line& l, const Header& h) {
  require_header(l, h);
  const auto& tk = l.tokens;
  auto arrow = std::find_if(tk.begin(), tk.end(), [](const Token& t) { return t.text == "->"; });
  if (tk.size() < 2) fail(l, tk[0].column, "expected 'rule <state> <guard> -> <state> ...'");
  if (arrow == tk.end()) fail(l, tk.back().column, "expected '->'");
  if (arrow == tk.begin() + 2) fail(l, arrow->column, "missing guard");
  if (arrow + 1 == tk.end()) fail(l, arrow->column, "missing target state");
  RawRule out;
  out.from = lookup(l, tk[1], h.states);
  const std::size_t g0 = tk[2].column - 1;
  const std::size_t g1 = (arrow - 1)->column - 1 + (arrow - 1)->text.size();
  std::string_view guard = l.text.substr(g0, g1 - g0);
  if (guard == "*") {
    out.guards = enumerate_phi(*h.k);
  } else {
    try {
      out.guards.push_back(parse_partition(guard, *h.k));
    } catch (const ParseError& e) {
      fail(l, g0 + e.column(), e.what());
    } catch (const PreconditionError& e) {
      fail(l, g0 + 1, e.what());
    }
  }
  out.to = lookup(l, *(arrow + 1), h.states);
  out.rest.assign(arrow + 2, tk.end());
  return out;
}

// Shared handling of the k= and states lines; returns false for other lines.
bool header_line(const Line& l, Header& h) {
  if (is_k_line(l)) {
    if (h.k) fail(l, 1, "duplicate k=");
    h.k = parse_k(l);
    return true;
  }
  if (l.tokens[0].text == "states") {
    if (!h.k) fail(l, 1, "k=<n> must come first");
    if (h.has_states) fail(l, 1, "duplicate 'states' line");
    h.has_states = true;
    for (std::size_t i = 1; i < l.tokens.size(); ++i) {
      std::string name(l.tokens[i].text);
      if (std::find(h.states.begin(), h.states.end(), name) != h.states.end())
        fail(l, l.tokens[i].column, "duplicate state '" + name + "'");
      h.states.push_back(std::move(name));
    }
    if (h.states.empty()) fail(l, 1, "no states listed");
    return true;
  }
  return false;
}

}  // namespace

Rpds parse_rpds(std::string_view text) {
  Header h;
  Rpds m;
  for (const Line& l : split_lines(text)) {
    if (header_line(l, h)) continue;
    if (l.tokens[0].text != "rule")
      fail(l, l.tokens[0].column, "unknown directive '" + std::string(l.tokens[0].text) + "'");
    RawRule raw = parse_rule(l, h);
    Command cmd;
    if (raw.rest.empty()) fail(l, l.text.size() + 1, "expected pop, skip or push <j>");
    const Token& c = raw.rest[0];
    if (c.text == "pop" || c.text == "skip") {
      cmd = c.text == "pop" ? Command::pop() : Command::skip();
      if (raw.rest.size() != 1) fail(l, raw.rest[1].column, "unexpected text after command");
    } else if (c.text == "push") {
      if (raw.rest.size() != 2) fail(l, c.column, "expected push <j>");
      const Token& j = raw.rest[1];
      int reg = 0;
      try {
        reg = std::stoi(std::string(j.text));
      } catch (const std::exception&) {
        fail(l, j.column, "expected a register index");
      }
      if (reg < 1 || reg > *h.k) fail(l, j.column, "push register out of range");
      cmd = Command::push(static_cast<std::uint32_t>(reg));
    } else {
      fail(l, c.column, "expected pop, skip or push <j>");
    }
    for (auto& g : raw.guards) m.rules.push_back({raw.from, g, raw.to, cmd});
  }
  if (!h.k) throw ParseError("missing k=<n>", 1, 1);
  if (!h.has_states) throw ParseError("missing 'states' line", 1, 1);
  m.k = *h.k;
  m.states = h.states;
  m.validate();
  return m;
}

Ra parse_ra(std::string_view text) {
  Header h;
  Ra a;
  bool has_initial = false;
  for (const Line& l : split_lines(text)) {
    if (header_line(l, h)) continue;
    const Token& d = l.tokens[0];
    if (d.text == "initial") {
      require_header(l, h);
      has_initial = true;
      for (std::size_t i = 1; i < l.tokens.size(); ++i) a.initial.push_back(lookup(l, l.tokens[i], h.states));
    } else if (d.text == "accept") {
      require_header(l, h);
      if (l.tokens.size() < 2) fail(l, d.column, "expected accept <state> <register partition>");
      const StateId q = lookup(l, l.tokens[1], h.states);
      std::string_view rest;
      if (l.tokens.size() > 2) rest = l.text.substr(l.tokens[2].column - 1);
      try {
        a.accept.push_back({q, parse_reg_partition(rest, *h.k)});
      } catch (const ParseError& e) {
        fail(l, (l.tokens.size() > 2 ? l.tokens[2].column - 1 : 0) + e.column(), e.what());
      } catch (const PreconditionError& e) {
        fail(l, l.tokens[1].column, e.what());
      }
    } else if (d.text == "rule") {
      RawRule raw = parse_rule(l, h);
      if (!raw.rest.empty()) {
        if (raw.rest[0].text != "pop")
          fail(l, raw.rest[0].column, "register automata have pop rules only");
        if (raw.rest.size() > 1) fail(l, raw.rest[1].column, "unexpected text after pop");
      }
      for (auto& g : raw.guards) a.base.rules.push_back({raw.from, g, raw.to, Command::pop()});
    } else {
      fail(l, d.column, "unknown directive '" + std::string(d.text) + "'");
    }
  }
  if (!h.k) throw ParseError("missing k=<n>", 1, 1);
  if (!h.has_states) throw ParseError("missing 'states' line", 1, 1);
  if (!has_initial) throw ParseError("missing 'initial' line", 1, 1);
  a.base.k = *h.k;
  a.base.states = h.states;
  a.validate();
  return a;
}

// ID parser ---------------------------------------------------------------------

namespace {

class IdParser {
 public:
  IdParser(std::string_view text) {
    // Keep positions: blank out comments instead of removing them.
    buffer_.assign(text);
    bool comment = false;
    for (char& c : buffer_) {
      if (c == '\n') comment = false;
      else if (c == '#') comment = true;
      if (comment) c = ' ';
    }
    text_ = buffer_;
  }

  RpdsId parse(const std::vector<std::string>& states, int k) {
    RpdsId id;
    skip();
    const std::size_t state_at = pos_;
    std::string name = word();
    if (name.empty()) fail("expected a state name");
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) fail_at(state_at, "unknown state '" + name + "'");
    id.state = static_cast<StateId>(it - states.begin());
    id.theta = assignment(k);
    while (true) {
      skip();
      if (pos_ == text_.size()) break;
      expect('(');
      StackCell cell;
      cell.value = value();
      expect(',');
      cell.saved = assignment(k);
      expect(')');
      id.stack.push_back(std::move(cell));
    }
    // Resolve names: dN is N, the rest get unused numbers in order.
    std::uint32_t next = 0;
    for (const auto& [n, v] : numbered_) next = std::max(next, v + 1);
    std::map<std::string, std::uint32_t> assigned;
    auto resolve = [&](DataValue& d) {
      const std::string& n = names_[d.id];
      if (auto jt = numbered_.find(n); jt != numbered_.end()) {
        d.id = jt->second;
        return;
      }
      auto [kt, inserted] = assigned.emplace(n, next);
      if (inserted) {
        while (std::any_of(numbered_.begin(), numbered_.end(), [&](const auto& e) { return e.second == next; }))
          kt->second = ++next;
        ++next;
      }
      d.id = kt->second;
    };
    for (auto& d : id.theta.values) resolve(d);
    for (auto& cell : id.stack) {
      resolve(cell.value);
      for (auto& d : cell.saved.values) resolve(d);
    }
    return id;
  }

 private:
  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what, line, col);
  }
  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '\''))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  // Data values are collected by name and resolved at the end; DataValue::id
  // temporarily indexes names_.
  DataValue value() {
    skip();
    std::string n = word();
    if (n.empty()) fail("expected a data value");
    if (n.size() > 1 && n[0] == 'd' &&
        std::all_of(n.begin() + 1, n.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      try {
        numbered_.emplace(n, static_cast<std::uint32_t>(std::stoul(n.substr(1))));
      } catch (const std::exception&) {
        fail("data value index too large");
      }
    }
    auto it = std::find(names_.begin(), names_.end(), n);
    if (it == names_.end()) {
      names_.push_back(n);
      return DataValue{static_cast<std::uint32_t>(names_.size() - 1)};
    }
    return DataValue{static_cast<std::uint32_t>(it - names_.begin())};
  }

  Assignment assignment(int k) {
    expect('[');
    Assignment a;
    a.values.push_back(value());
    while (true) {
      skip();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        a.values.push_back(value());
        continue;
      }
      break;
    }
    expect(']');
    if (a.size() != k) fail("assignment has " + std::to_string(a.size()) + " values, expected " + std::to_string(k));
    return a;
  }

  std::string buffer_;
  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::string> names_;
  std::map<std::string, std::uint32_t> numbered_;
};

}  // namespace

RpdsId parse_id(std::string_view text, const std::vector<std::string>& states, int k) {
  return IdParser(text).parse(states, k);
}

// Output ------------------------------------------------------------------------

namespace {

std::string command_text(const Command& c) {
  switch (c.kind) {
    case Command::Kind::Pop: return "pop";
    case Command::Kind::Skip: return "skip";
    case Command::Kind::Push: return "push " + std::to_string(c.arg);
  }
  return {};
}

void header(std::ostringstream& out, const Rpds& m) {
  out << "k=" << m.k << "\nstates";
  for (const auto& s : m.states) out << ' ' << s;
  out << '\n';
}

}  // namespace

std::string format_rpds(const Rpds& m) {
  std::ostringstream out;
  header(out, m);
  for (const auto& r : m.rules)
    out << "rule " << m.states[r.from] << ' ' << to_string(r.guard) << " -> " << m.states[r.to] << ' '
        << command_text(r.command) << '\n';
  return out.str();
}

std::string format_ra(const Ra& a) {
  std::ostringstream out;
  header(out, a.base);
  out << "initial";
  for (StateId q : a.initial) out << ' ' << a.base.states[q];
  out << '\n';
  for (const auto& [q, psi] : a.accept) out << "accept " << a.base.states[q] << ' ' << to_string(psi) << '\n';
  for (const auto& r : a.base.rules)
    out << "rule " << a.base.states[r.from] << ' ' << to_string(r.guard) << " -> " << a.base.states[r.to] << '\n';
  return out.str();
}

std::string format_id(const RpdsId& id, const std::vector<std::string>& states) {
  std::string out = id.state < states.size() ? states[id.state] : "s" + std::to_string(id.state);
  out += ' ' + to_string(id.theta);
  for (const auto& cell : id.stack) out += " (" + to_string(cell.value) + ',' + to_string(cell.saved) + ')';
  return out;
}

std::string format_reduced(const ReducedSystem& rm, bool provenance) {
  std::ostringstream out;
  out << "# " << rm.base_states.size() << " states x " << rm.phis->size() << " partitions, "
      << rm.pds.rules.size() << " rules\n";
  for (std::size_t r = 0; r < rm.pds.rules.size(); ++r) {
    out << rm.rule_text(r) << '\n';
    if (!provenance) continue;
    for (const auto& p : rm.provenance[r])
      out << "  # r" << p.source_rule + 1 << " phi1=" << rm.symbol_name(p.phi1)
          << " phi2=" << rm.symbol_name(p.phi2) << '\n';
  }
  return out.str();
}

std::string format_reduced_nfa(const Nfa& reduced, const Ra& a, const std::vector<std::string>& rpds_states,
                               const PhiTable& phis) {
  std::vector<std::string> names = rpds_states;
  for (const auto& s : a.base.states)
    if (std::find(rpds_states.begin(), rpds_states.end(), s) == rpds_states.end()) names.push_back(s);
  const auto n = static_cast<StateId>(phis.size());
  auto state = [&](StateId s) { return "(" + names[s / n] + "," + to_string(phis[s % n]) + ")"; };
  std::ostringstream out;
  out << "# initial: every (p,phi) with p in";
  for (const auto& s : rpds_states) out << ' ' << s;
  out << "\n# " << reduced.base.rules.size() << " rules, " << reduced.final.size() << " final states\n";
  for (StateId f : reduced.final) out << "final " << state(f) << '\n';
  for (const auto& r : reduced.base.rules)
    out << "rule " << state(r.from) << ' ' << to_string(phis[r.symbol]) << " -> " << state(r.to) << '\n';
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace rpds
