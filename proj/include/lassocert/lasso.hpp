#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lassocert/rational.hpp"

namespace lassocert {

/// coeffs_x·x + coeffs_xp·x' <= bound (or < bound when strict).
struct ConstraintRow {
  ExactVector coeffs_x;
  ExactVector coeffs_xp;
  Rational bound;
  bool strict = false;

  bool operator==(const ConstraintRow&) const = default;
};

/// A conjunction of linear constraints over (x, x'), stored as the polyhedron
/// A (x; x') <= b with A of width 2n. No rows means the relation "true".
class Transition {
 public:
  explicit Transition(Index dim = 0);
  Transition(Index dim, const std::vector<ConstraintRow>& rows);
  /// `lhs` has 2*dim columns: unprimed block first, primed block second.
  Transition(ExactMatrix lhs, ExactVector bounds, std::vector<bool> strict);

  Index dim() const { return dim_; }
  Index size() const { return lhs_.rows(); }
  bool is_true() const { return size() == 0; }

  const ExactMatrix& lhs() const { return lhs_; }
  const ExactVector& bounds() const { return bounds_; }
  const std::vector<bool>& strict() const { return strict_; }
  bool strict(Index row) const { return strict_[static_cast<std::size_t>(row)]; }

  auto coeffs_x() const { return lhs_.leftCols(dim_); }
  auto coeffs_xp() const { return lhs_.rightCols(dim_); }

  ConstraintRow row(Index r) const;
  std::vector<ConstraintRow> rows() const;

  bool operator==(const Transition& other) const;

 private:
  Index dim_;
  ExactMatrix lhs_;
  ExactVector bounds_;
  std::vector<bool> strict_;
};

/// A failing row together with lhs - bound at the evaluated point.
struct RowViolation {
  Index row;
  Rational residual;
};

/// A(x; xp) - b for every row.
ExactVector residuals(const Transition& t, const ExactVector& x, const ExactVector& xp);

std::optional<RowViolation> first_violation(const Transition& t, const ExactVector& x,
                                            const ExactVector& xp);

/// (x, xp) is in the relation; strict rows must hold strictly. Throws
/// std::invalid_argument on a dimension mismatch.
bool holds(const Transition& t, const ExactVector& x, const ExactVector& xp);

/// Homogeneous part only: A(y; yp) <= 0 for every row, ignoring bounds and
/// strictness. This is the recession cone of the relation.
std::optional<RowViolation> first_ray_violation(const Transition& t, const ExactVector& y,
                                                const ExactVector& yp);

struct LassoProgram {
  std::vector<std::string> vars;
  Transition stem;
  Transition loop;

  LassoProgram() = default;
  /// Checks that the names are distinct and both transitions have dimension n.
  LassoProgram(std::vector<std::string> vars, Transition stem, Transition loop);

  Index dim() const { return static_cast<Index>(vars.size()); }
};

/// Gx <= g (strict where flagged) and x' = Mx + m.
struct DeterministicUpdate {
  ExactMatrix guard_G;
  ExactVector guard_g;
  std::vector<bool> guard_strict;
  ExactMatrix update_M;
  ExactVector update_m;

  Index dim() const { return update_M.rows(); }
  ExactVector apply(const ExactVector& x) const { return update_M * x + update_m; }
  bool guard_holds(const ExactVector& x) const;
};

/// Splits a loop into guard and affine update when every primed variable is
/// pinned by opposite pairs of non-strict rows. Returns nothing otherwise.
std::optional<DeterministicUpdate> detect_deterministic(const Transition& loop);

/// Polyhedral encoding of a deterministic loop: rows (G 0), (M -I), (-M I).
Transition to_transition(const DeterministicUpdate& d);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Reads the `.lasso` text format:
///
///   vars: a b;
///   stem: a' = a && b' = 1;        (optional, defaults to true)
///   loop: a + b >= 4 && a' = 3*a + b && b' = 2*b;
///
/// Every atom is normalized to rows of the form coeffs·(x, x') <= bound;
/// `=` yields the rows (rhs - lhs <= 0) and (lhs - rhs <= 0) in that order.
/// `#` starts a comment running to the end of the line.
/// A variable may carry a divisor, as in `a/2`.
LassoProgram parse_lasso(std::string_view text);

/// Renders a program back into the `.lasso` format, one atom per row.
std::string print_lasso(const LassoProgram& program);

}  // namespace lassocert
