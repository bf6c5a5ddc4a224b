#include <algorithm>
#include <cctype>
#include <set>

#include "rpn/ltl.hpp"

namespace rpn {

FormulaPtr Formula::make_atom(Atom a) {
  return std::make_shared<const Formula>(Formula{Op::atom, std::move(a), nullptr, nullptr});
}

FormulaPtr Formula::constant(bool value) {
  return std::make_shared<const Formula>(Formula{value ? Op::truth : Op::falsity, {}, nullptr, nullptr});
}

FormulaPtr Formula::unary(Op op, FormulaPtr operand) {
  return std::make_shared<const Formula>(Formula{op, {}, std::move(operand), nullptr});
}

FormulaPtr Formula::binary(Op op, FormulaPtr lhs, FormulaPtr rhs) {
  return std::make_shared<const Formula>(Formula{op, {}, std::move(lhs), std::move(rhs)});
}

FormulaError::FormulaError(const std::string& what, std::size_t pos)
    : Error("formula error at offset " + std::to_string(pos) + ": " + what), position(pos) {}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  FormulaPtr parse() {
    FormulaPtr f = implication();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw FormulaError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) != token) return false;
    // keywords must not run into an identifier character
    if (std::isalpha(static_cast<unsigned char>(token.back())) && pos_ + token.size() < text_.size() &&
        is_ident_char(text_[pos_ + token.size()])) {
      return false;
    }
    pos_ += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  static bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }

  FormulaPtr implication() {
    FormulaPtr lhs = disjunction();
    if (accept("->")) return Formula::binary(Formula::Op::implication, lhs, implication());
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr lhs = conjunction();
    while (accept("\\/")) lhs = Formula::binary(Formula::Op::disjunction, lhs, conjunction());
    return lhs;
  }

  FormulaPtr conjunction() {
    FormulaPtr lhs = until();
    while (accept("/\\")) lhs = Formula::binary(Formula::Op::conjunction, lhs, until());
    return lhs;
  }

  FormulaPtr until() {
    FormulaPtr lhs = unary();
    if (accept("U")) return Formula::binary(Formula::Op::until, lhs, until());
    if (accept("R")) return Formula::binary(Formula::Op::release, lhs, until());
    return lhs;
  }

  FormulaPtr unary() {
    if (accept("~")) return Formula::unary(Formula::Op::negation, unary());
    if (accept("[]")) return Formula::unary(Formula::Op::always, unary());
    if (accept("<>")) return Formula::unary(Formula::Op::eventually, unary());
    if (accept("X")) return Formula::unary(Formula::Op::next, unary());
    return primary();
  }

  FormulaPtr primary() {
    skip_space();
    if (accept("(")) {
      FormulaPtr f = implication();
      expect(")");
      return f;
    }
    if (accept("true")) return Formula::constant(true);
    if (accept("false")) return Formula::constant(false);
    if (accept("t-enabled")) return Formula::make_atom(Atom{Atom::Kind::t_enabled, {}});
    if (accept("enabled")) return Formula::make_atom(Atom{Atom::Kind::enabled, {}});
    if (accept("reachable")) {
      expect("(");
      Atom a{Atom::Kind::reachable, pattern()};
      expect(")");
      return Formula::make_atom(std::move(a));
    }
    if (pos_ == text_.size()) fail("unexpected end of formula");
    fail("expected a proposition");
  }

  std::vector<PatternEntry> pattern() {
    std::vector<PatternEntry> out;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ')') return out;
    out.push_back(entry());
    while (accept(";")) out.push_back(entry());
    return out;
  }

  std::string quoted() {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != '"') fail("expected a quoted label");
    const std::size_t close = text_.find('"', pos_ + 1);
    if (close == std::string_view::npos) fail("unterminated string");
    std::string s(text_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    return s;
  }

  std::uint64_t number() {
    skip_space();
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<unsigned>(text_[pos_] - '0');
      if (v > 0xffffffffull) fail("number out of range");
      ++pos_;
    }
    if (pos_ == start) fail("expected a number");
    return v;
  }

  PatternEntry entry() {
    skip_space();
    PatternEntry e;
    // Maude place term: p("A" | 3 | 2147483647)
    if (text_.substr(pos_, 2) == "p(" || (text_.substr(pos_, 1) == "p" && peek_after_space(pos_ + 1) == '(')) {
      ++pos_;
      expect("(");
      e.label = quoted();
      expect("|");
      e.place = PlaceId{static_cast<IdValue>(number())};
      expect("|");
      number();
      expect(")");
    } else if (pos_ < text_.size() && text_[pos_] == '"') {
      e.label = quoted();
    } else if (pos_ < text_.size() && is_ident_start(text_[pos_])) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
      e.label = std::string(text_.substr(start, pos_ - start));
    } else {
      fail("expected a place label");
    }
    if (!e.place && accept("@")) e.place = PlaceId{static_cast<IdValue>(number())};
    if (accept("*")) {
      e.count = static_cast<TokenCount>(number());
      if (e.count == 0) fail("pattern counts must be positive");
    }
    return e;
  }

  char peek_after_space(std::size_t at) const {
    while (at < text_.size() && std::isspace(static_cast<unsigned char>(text_[at]))) ++at;
    return at < text_.size() ? text_[at] : '\0';
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int precedence(Formula::Op op) {
  switch (op) {
    case Formula::Op::implication: return 1;
    case Formula::Op::disjunction: return 2;
    case Formula::Op::conjunction: return 3;
    case Formula::Op::until:
    case Formula::Op::release: return 4;
    default: return 5;
  }
}

std::string render(const Formula& f, int context) {
  using Op = Formula::Op;
  std::string s;
  switch (f.op) {
    case Op::atom: return to_string(f.atom);
    case Op::truth: return "true";
    case Op::falsity: return "false";
    case Op::negation: s = "~ " + render(*f.left, 5); break;
    case Op::next: s = "X " + render(*f.left, 5); break;
    case Op::always: s = "[] " + render(*f.left, 5); break;
    case Op::eventually: s = "<> " + render(*f.left, 5); break;
    case Op::conjunction: s = render(*f.left, 3) + " /\\ " + render(*f.right, 4); break;
    case Op::disjunction: s = render(*f.left, 2) + " \\/ " + render(*f.right, 3); break;
    case Op::implication: s = render(*f.left, 2) + " -> " + render(*f.right, 1); break;
    case Op::until: s = render(*f.left, 5) + " U " + render(*f.right, 4); break;
    case Op::release: s = render(*f.left, 5) + " R " + render(*f.right, 4); break;
  }
  return precedence(f.op) < context ? "(" + s + ")" : s;
}

}  // namespace

FormulaPtr parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Atom& a) {
  switch (a.kind) {
    case Atom::Kind::t_enabled: return "t-enabled";
    case Atom::Kind::enabled: return "enabled";
    case Atom::Kind::reachable: break;
  }
  std::string s = "reachable(";
  for (std::size_t i = 0; i < a.pattern.size(); ++i) {
    const PatternEntry& e = a.pattern[i];
    if (i) s += " ; ";
    const bool plain = !e.label.empty() && std::all_of(e.label.begin(), e.label.end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }) && std::isalpha(static_cast<unsigned char>(e.label.front()));
    s += plain ? e.label : "\"" + e.label + "\"";
    if (e.place) s += "@" + std::to_string(e.place->value);
    if (e.count != 1) s += "*" + std::to_string(e.count);
  }
  return s + ")";
}

std::string to_string(const Formula& f) { return render(f, 0); }

std::size_t depth(const Formula& f) {
  std::size_t d = 0;
  if (f.left) d = std::max(d, depth(*f.left));
  if (f.right) d = std::max(d, depth(*f.right));
  return (f.op == Formula::Op::atom || f.op == Formula::Op::truth || f.op == Formula::Op::falsity) ? 0 : d + 1;
}

std::vector<Atom> collect_atoms(const Formula& f) {
  std::vector<Atom> out;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (g.op == Formula::Op::atom && std::find(out.begin(), out.end(), g.atom) == out.end()) out.push_back(g.atom);
    if (g.left) walk(*g.left);
    if (g.right) walk(*g.right);
  };
  walk(f);
  return out;
}

void check_atom_labels(const Formula& f, const Configuration& initial) {
  std::set<std::string> known;
  auto add_labels = [&](const PetriNet& net) {
    for (const auto& [id, p] : net.places()) known.insert(p.label);
  };
  add_labels(initial.net);
  for (const Rule& r : initial.rules->rules()) {
    add_labels(r.lhs);
    add_labels(r.rhs);
  }
  for (const Atom& a : collect_atoms(f)) {
    for (const PatternEntry& e : a.pattern) {
      if (!known.contains(e.label)) throw FormulaError("unknown place label '" + e.label + "' in " + to_string(a), 0);
    }
  }
}

namespace {

bool pattern_holds(const PetriNet& net, const std::vector<PatternEntry>& pattern) {
  Marking remaining = net.marking();
  std::map<std::string, std::uint64_t> wanted_by_label;
  for (const PatternEntry& e : pattern) {
    if (!e.place) {
      wanted_by_label[e.label] += e.count;
      continue;
    }
    if (!net.has_place(*e.place) || net.place(*e.place).label != e.label) return false;
    if (remaining.count(*e.place) < e.count) return false;
    remaining.remove(*e.place, e.count);
  }
  for (const auto& [label, wanted] : wanted_by_label) {
    std::uint64_t have = 0;
    for (const auto& [p, n] : remaining) {
      if (net.place(p).label == label) have += n;
    }
    if (have < wanted) return false;
  }
  return true;
}

}  // namespace

bool eval_atom(const Configuration& config, const Atom& atom, const Semantics& sem) {
  switch (atom.kind) {
    case Atom::Kind::t_enabled: return !enabled_transitions(config.net, sem).empty();
    case Atom::Kind::enabled:
      if (!enabled_transitions(config.net, sem).empty()) return true;
      return std::any_of(config.rules->rules().begin(), config.rules->rules().end(),
                         [&](const Rule& r) { return !applicable_matches(config.net, r).empty(); });
    case Atom::Kind::reachable: return pattern_holds(config.net, atom.pattern);
  }
  return false;
}

}  // namespace rpn
