#include "lassocert/lasso.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "lassocert/linalg.hpp"

namespace lassocert {

// ---------------------------------------------------------------------------
// Transition

Transition::Transition(Index dim) : dim_(dim), lhs_(0, 2 * dim), bounds_(0) {}

Transition::Transition(Index dim, const std::vector<ConstraintRow>& rows)
    : dim_(dim),
      lhs_(static_cast<Index>(rows.size()), 2 * dim),
      bounds_(static_cast<Index>(rows.size())) {
  strict_.reserve(rows.size());
  for (Index r = 0; r < lhs_.rows(); ++r) {
    const ConstraintRow& row = rows[static_cast<std::size_t>(r)];
    if (row.coeffs_x.size() != dim || row.coeffs_xp.size() != dim) {
      throw std::invalid_argument("constraint row does not match transition dimension");
    }
    lhs_.row(r).head(dim) = row.coeffs_x.transpose();
    lhs_.row(r).tail(dim) = row.coeffs_xp.transpose();
    bounds_(r) = row.bound;
    strict_.push_back(row.strict);
  }
}

Transition::Transition(ExactMatrix lhs, ExactVector bounds, std::vector<bool> strict)
    : dim_(lhs.cols() / 2), lhs_(std::move(lhs)), bounds_(std::move(bounds)),
      strict_(std::move(strict)) {
  if (lhs_.cols() % 2 != 0 || bounds_.size() != lhs_.rows() ||
      static_cast<Index>(strict_.size()) != lhs_.rows()) {
    throw std::invalid_argument("inconsistent transition shape");
  }
}

ConstraintRow Transition::row(Index r) const {
  return ConstraintRow{lhs_.row(r).head(dim_).transpose(), lhs_.row(r).tail(dim_).transpose(),
                       bounds_(r), strict(r)};
}

std::vector<ConstraintRow> Transition::rows() const {
  std::vector<ConstraintRow> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (Index r = 0; r < size(); ++r) out.push_back(row(r));
  return out;
}

bool Transition::operator==(const Transition& other) const {
  return dim_ == other.dim_ && lhs_.rows() == other.lhs_.rows() && lhs_ == other.lhs_ &&
         bounds_ == other.bounds_ && strict_ == other.strict_;
}

namespace {

void check_dims(const Transition& t, const ExactVector& x, const ExactVector& xp) {
  if (x.size() != t.dim() || xp.size() != t.dim()) {
    throw std::invalid_argument("state dimension " + std::to_string(x.size()) + "/" +
                                std::to_string(xp.size()) + " does not match transition dimension " +
                                std::to_string(t.dim()));
  }
}

}  // namespace

ExactVector residuals(const Transition& t, const ExactVector& x, const ExactVector& xp) {
  check_dims(t, x, xp);
  return t.coeffs_x() * x + t.coeffs_xp() * xp - t.bounds();
}

std::optional<RowViolation> first_violation(const Transition& t, const ExactVector& x,
                                            const ExactVector& xp) {
  ExactVector res = residuals(t, x, xp);
  for (Index r = 0; r < res.size(); ++r) {
    if (res(r) > 0 || (t.strict(r) && res(r) == 0)) return RowViolation{r, res(r)};
  }
  return std::nullopt;
}

bool holds(const Transition& t, const ExactVector& x, const ExactVector& xp) {
  return !first_violation(t, x, xp).has_value();
}

std::optional<RowViolation> first_ray_violation(const Transition& t, const ExactVector& y,
                                                const ExactVector& yp) {
  check_dims(t, y, yp);
  ExactVector lhs = t.coeffs_x() * y + t.coeffs_xp() * yp;
  for (Index r = 0; r < lhs.size(); ++r) {
    if (lhs(r) > 0) return RowViolation{r, lhs(r)};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// LassoProgram

LassoProgram::LassoProgram(std::vector<std::string> vars_, Transition stem_, Transition loop_)
    : vars(std::move(vars_)), stem(std::move(stem_)), loop(std::move(loop_)) {
  std::set<std::string> seen;
  for (const auto& v : vars) {
    if (!seen.insert(v).second) throw std::invalid_argument("duplicate variable '" + v + "'");
  }
  if (stem.dim() != dim() || loop.dim() != dim()) {
    throw std::invalid_argument("transition dimension does not match variable count");
  }
}

// ---------------------------------------------------------------------------
// Deterministic updates

bool DeterministicUpdate::guard_holds(const ExactVector& x) const {
  ExactVector lhs = guard_G * x;
  for (Index r = 0; r < lhs.size(); ++r) {
    if (lhs(r) > guard_g(r)) return false;
    if (guard_strict[static_cast<std::size_t>(r)] && lhs(r) == guard_g(r)) return false;
  }
  return true;
}

std::optional<DeterministicUpdate> detect_deterministic(const Transition& loop) {
  const Index n = loop.dim();
  std::vector<Index> guard_rows;
  std::vector<Index> update_rows;
  for (Index r = 0; r < loop.size(); ++r) {
    if (is_zero(loop.coeffs_xp().row(r))) {
      guard_rows.push_back(r);
    } else if (loop.strict(r)) {
      return std::nullopt;
    } else {
      update_rows.push_back(r);
    }
  }

  // Pair each update row with an opposite row; the pair is one equation.
  std::vector<Index> equations;
  std::vector<bool> used(update_rows.size(), false);
  for (std::size_t i = 0; i < update_rows.size(); ++i) {
    if (used[i]) continue;
    const Index r = update_rows[i];
    bool paired = false;
    for (std::size_t j = i + 1; j < update_rows.size(); ++j) {
      const Index s = update_rows[j];
      if (used[j]) continue;
      if (loop.lhs().row(s) == -loop.lhs().row(r) && loop.bounds()(s) == -loop.bounds()(r)) {
        used[i] = used[j] = true;
        paired = true;
        break;
      }
    }
    if (!paired) return std::nullopt;
    equations.push_back(r);
  }
  if (static_cast<Index>(equations.size()) < n) return std::nullopt;

  // Columns: primed block | unprimed block | rhs. Pivot only on primed columns.
  ExactMatrix system(static_cast<Index>(equations.size()), 2 * n + 1);
  for (Index e = 0; e < system.rows(); ++e) {
    const Index r = equations[static_cast<std::size_t>(e)];
    system.row(e).head(n) = loop.coeffs_xp().row(r);
    system.row(e).segment(n, n) = loop.coeffs_x().row(r);
    system(e, 2 * n) = loop.bounds()(r);
  }
  const auto pivots = reduce_rows(system, n);
  if (static_cast<Index>(pivots.size()) < n) return std::nullopt;

  DeterministicUpdate d;
  d.update_M = ExactMatrix::Zero(n, n);
  d.update_m = ExactVector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    // x'_i + c·x = rhs
    d.update_M.row(i) = -system.row(i).segment(n, n);
    d.update_m(i) = system(i, 2 * n);
  }

  std::vector<std::pair<ExactVector, Rational>> guard;
  std::vector<bool> strict;
  for (Index r : guard_rows) {
    guard.emplace_back(loop.coeffs_x().row(r).transpose(), loop.bounds()(r));
    strict.push_back(loop.strict(r));
  }
  for (Index e = n; e < system.rows(); ++e) {
    ExactVector c = system.row(e).segment(n, n).transpose();
    Rational rhs = system(e, 2 * n);
    if (is_zero(c) && rhs == 0) continue;
    guard.emplace_back(c, rhs);
    guard.emplace_back(-c, -rhs);
    strict.push_back(false);
    strict.push_back(false);
  }

  d.guard_G = ExactMatrix::Zero(static_cast<Index>(guard.size()), n);
  d.guard_g = ExactVector::Zero(static_cast<Index>(guard.size()));
  for (Index r = 0; r < d.guard_G.rows(); ++r) {
    d.guard_G.row(r) = guard[static_cast<std::size_t>(r)].first.transpose();
    d.guard_g(r) = guard[static_cast<std::size_t>(r)].second;
  }
  d.guard_strict = std::move(strict);
  return d;
}

Transition to_transition(const DeterministicUpdate& d) {
  const Index n = d.dim();
  const Index m = d.guard_G.rows();
  ExactMatrix lhs = ExactMatrix::Zero(m + 2 * n, 2 * n);
  ExactVector bounds(m + 2 * n);
  lhs.topLeftCorner(m, n) = d.guard_G;
  bounds.head(m) = d.guard_g;
  lhs.block(m, 0, n, n) = d.update_M;
  lhs.block(m, n, n, n) = -ExactMatrix::Identity(n, n);
  bounds.segment(m, n) = -d.update_m;
  lhs.block(m + n, 0, n, n) = -d.update_M;
  lhs.block(m + n, n, n, n) = ExactMatrix::Identity(n, n);
  bounds.tail(n) = d.update_m;
  std::vector<bool> strict = d.guard_strict;
  strict.resize(static_cast<std::size_t>(m + 2 * n), false);
  return Transition(std::move(lhs), std::move(bounds), std::move(strict));
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Number, Colon, Semi, And, Le, Ge, Lt, Gt, Eq, Plus, Minus, Star, Slash, Prime, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::string describe(const Token& t) {
  return t.kind == Tok::End ? std::string("end of input") : "'" + t.text + "'";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };

  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const std::size_t start = i, tl = line, tc = col;
    auto push = [&](Tok kind, std::size_t len) {
      out.push_back(Token{kind, std::string(src.substr(start, len)), tl, tc});
      advance(len);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::Ident, j - i);
    } else if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      std::size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
      } else if (j + 1 < src.size() && src[j] == '/' && is_digit(src[j + 1])) {
        ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
      }
      push(Tok::Number, j - i);
    } else if (src.substr(i, 2) == "&&") {
      push(Tok::And, 2);
    } else if (src.substr(i, 2) == "<=") {
      push(Tok::Le, 2);
    } else if (src.substr(i, 2) == ">=") {
      push(Tok::Ge, 2);
    } else {
      switch (c) {
        case ':': push(Tok::Colon, 1); break;
        case ';': push(Tok::Semi, 1); break;
        case '<': push(Tok::Lt, 1); break;
        case '>': push(Tok::Gt, 1); break;
        case '=': push(Tok::Eq, 1); break;
        case '+': push(Tok::Plus, 1); break;
        case '-': push(Tok::Minus, 1); break;
        case '*': push(Tok::Star, 1); break;
        case '/': push(Tok::Slash, 1); break;
        case '\'': push(Tok::Prime, 1); break;
        default:
          throw ParseError(tl, tc, std::string("unexpected character '") + c + "'");
      }
    }
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "vars" || s == "stem" || s == "loop" || s == "true";
}

// Affine form over (x, x'): coeffs·z + constant.
struct Affine {
  ExactVector coeffs;
  Rational constant;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(tokenize(src)) {}

  LassoProgram program() {
    keyword("vars");
    expect(Tok::Colon, "':'");
    while (peek().kind == Tok::Ident) {
      const Token& t = next();
      if (is_keyword(t.text)) error(t, "keyword '" + t.text + "' cannot name a variable");
      if (std::find(vars_.begin(), vars_.end(), t.text) != vars_.end()) {
        error(t, "duplicate variable '" + t.text + "'");
      }
      vars_.push_back(t.text);
    }
    if (vars_.empty()) error(peek(), "expected at least one variable");
    expect(Tok::Semi, "';'");

    const Index n = static_cast<Index>(vars_.size());
    Transition stem(n);
    if (peek().kind == Tok::Ident && peek().text == "stem") {
      next();
      expect(Tok::Colon, "':'");
      stem = Transition(n, formula());
      expect(Tok::Semi, "';'");
    }
    keyword("loop");
    expect(Tok::Colon, "':'");
    Transition loop(n, formula());
    expect(Tok::Semi, "';'");
    if (peek().kind != Tok::End) error(peek(), "unexpected " + describe(peek()) + " after loop");
    return LassoProgram(vars_, std::move(stem), std::move(loop));
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void error(const Token& at, const std::string& message) const {
    throw ParseError(at.line, at.column, message);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) error(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    next();
  }

  void keyword(const char* word) {
    if (peek().kind != Tok::Ident || peek().text != word) {
      error(peek(), std::string("expected '") + word + "', found " + describe(peek()));
    }
    next();
  }

  Index dim() const { return static_cast<Index>(vars_.size()); }

  std::vector<ConstraintRow> formula() {
    std::vector<ConstraintRow> rows;
    if (peek().kind == Tok::Ident && peek().text == "true") {
      next();
      return rows;
    }
    atom(rows);
    while (peek().kind == Tok::And) {
      next();
      atom(rows);
    }
    return rows;
  }

  void atom(std::vector<ConstraintRow>& rows) {
    Affine lhs = linexpr();
    const Token rel = next();
    if (rel.kind != Tok::Le && rel.kind != Tok::Ge && rel.kind != Tok::Lt && rel.kind != Tok::Gt &&
        rel.kind != Tok::Eq) {
      error(rel, "expected relation, found " + describe(rel));
    }
    Affine rhs = linexpr();
    // lhs REL rhs  <=>  diff·z + c REL 0
    ExactVector diff = lhs.coeffs - rhs.coeffs;
    Rational c = lhs.constant - rhs.constant;
    auto make = [&](const ExactVector& coeffs, const Rational& bound, bool strict) {
      rows.push_back(ConstraintRow{coeffs.head(dim()), coeffs.tail(dim()), bound, strict});
    };
    switch (rel.kind) {
      case Tok::Le: make(diff, -c, false); break;
      case Tok::Lt: make(diff, -c, true); break;
      case Tok::Ge: make(-diff, c, false); break;
      case Tok::Gt: make(-diff, c, true); break;
      default:
        make(-diff, c, false);
        make(diff, -c, false);
        break;
    }
  }

  Affine linexpr() {
    Affine e{ExactVector::Zero(2 * dim()), Rational(0)};
    Rational sign = 1;
    if (peek().kind == Tok::Minus || peek().kind == Tok::Plus) {
      if (next().kind == Tok::Minus) sign = -1;
    }
    term(e, sign);
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      sign = next().kind == Tok::Minus ? -1 : 1;
      term(e, sign);
    }
    return e;
  }

  void term(Affine& e, const Rational& sign) {
    if (peek().kind == Tok::Number) {
      const Token& num = next();
      Rational value = sign * parse_rational(num.text);
      if (peek().kind == Tok::Star) {
        next();
        if (peek().kind != Tok::Ident) error(peek(), "expected variable after '*'");
      }
      if (peek().kind == Tok::Ident) {
        const Index v = variable();
        e.coeffs(v) += value / divisor();
      } else {
        e.constant += value;
      }
    } else if (peek().kind == Tok::Ident) {
      const Index v = variable();
      e.coeffs(v) += sign / divisor();
    } else {
      error(peek(), "expected term, found " + describe(peek()));
    }
  }

  // Optional "/ number" after a variable, as in a/2.
  Rational divisor() {
    if (peek().kind != Tok::Slash) return Rational(1);
    next();
    if (peek().kind != Tok::Number) error(peek(), "expected number after '/'");
    const Token& num = next();
    Rational d = parse_rational(num.text);
    if (d == 0) error(num, "division by zero");
    return d;
  }

  Index variable() {
    const Token& t = next();
    auto it = std::find(vars_.begin(), vars_.end(), t.text);
    if (it == vars_.end()) error(t, "unknown variable '" + t.text + "'");
    Index idx = static_cast<Index>(it - vars_.begin());
    if (peek().kind == Tok::Prime) {
      next();
      idx += dim();
    }
    return idx;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string> vars_;
};

void print_transition(std::ostream& out, const Transition& t, const std::vector<std::string>& vars) {
  if (t.is_true()) {
    out << "true";
    return;
  }
  const Index n = t.dim();
  for (Index r = 0; r < t.size(); ++r) {
    if (r) out << "\n    && ";
    bool first = true;
    for (Index j = 0; j < 2 * n; ++j) {
      const Rational& a = t.lhs()(r, j);
      if (a == 0) continue;
      Rational mag = abs(a);
      if (first) {
        if (a < 0) out << '-';
      } else {
        out << (a < 0 ? " - " : " + ");
      }
      first = false;
      if (mag != 1) out << to_string(mag) << '*';
      out << vars[static_cast<std::size_t>(j % n)] << (j >= n ? "'" : "");
    }
    if (first) out << '0';
    out << (t.strict(r) ? " < " : " <= ") << to_string(t.bounds()(r));
  }
}

}  // namespace

LassoProgram parse_lasso(std::string_view text) { return Parser(text).program(); }

std::string print_lasso(const LassoProgram& program) {
  std::ostringstream out;
  out << "vars:";
  for (const auto& v : program.vars) out << ' ' << v;
  out << ";\nstem: ";
  print_transition(out, program.stem, program.vars);
  out << ";\nloop: ";
  print_transition(out, program.loop, program.vars);
  out << ";\n";
  return out.str();
}

}  // namespace lassocert
