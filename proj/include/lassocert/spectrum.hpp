#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lassocert/lasso.hpp"
#include "lassocert/linalg.hpp"
#include "lassocert/rational.hpp"

namespace lassocert {

/// Coefficients of det(λI - M), lowest degree first; coefficients[n] == 1.
struct CharPoly {
  ExactVector coefficients;

  Index degree() const { return coefficients.size() - 1; }
  Rational operator()(const Rational& x) const;
};

/// det(λI - M) by the Faddeev-LeVerrier recurrence:
///   M_1 = I,  c_{n-k} = -tr(M·M_k) / k,  M_{k+1} = M·M_k + c_{n-k}·I.
/// Works for any exact field scalar.
template <typename Derived>
Vector<typename Derived::Scalar> char_poly_coefficients(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw std::invalid_argument("char_poly requires a square matrix");
  const Index n = m.rows();
  Vector<Scalar> c = Vector<Scalar>::Zero(n + 1);
  c(n) = Scalar(1);
  Matrix<Scalar> mk = Matrix<Scalar>::Identity(n, n);
  for (Index k = 1; k <= n; ++k) {
    Matrix<Scalar> product = m * mk;
    c(n - k) = -product.trace() / Scalar(static_cast<long>(k));
    mk = product;
    mk.diagonal().array() += c(n - k);
  }
  return c;
}

CharPoly char_poly(const ExactMatrix& m);

struct SpectrumReport {
  /// Distinct rational roots in decreasing order, with multiplicities.
  std::vector<std::pair<Rational, std::size_t>> rational_roots;
  bool all_roots_rational = false;
  /// Only meaningful when all_roots_rational.
  bool all_nonnegative = false;

  std::size_t root_count() const;
  /// Roots repeated by multiplicity, largest first.
  std::vector<Rational> roots_with_multiplicity() const;
};

/// Rational roots by the rational root theorem after clearing denominators,
/// with multiplicities found by repeated exact deflation.
SpectrumReport rational_spectrum(const CharPoly& p);

/// Smallest k >= 1 with (M - I)^k = 0, if k <= n.
std::optional<Index> nilpotent_part(const ExactMatrix& m);

struct AffineFunction {
  ExactVector coeffs;
  Rational constant;

  Rational operator()(const ExactVector& x) const { return coeffs.dot(x) + constant; }
};

/// k-nested ranking function for a loop whose update is x' = (I + N)x + m with
/// N nilpotent of index k, built from one guard row h·x <= h0 with
/// δ = h·N^(k-1)·m > 0:
///
///   f_j(x) = -h·N^(k-j)·x + c_j,   c_k = h0 + 1,   c_{j-1} = 1 - h·N^(k-j)·m.
///
/// f_1 drops by exactly δ per iteration, f_j(x') = f_j(x) + f_{j-1}(x) - 1 for
/// j > 1, and f_k > 0 wherever the guard row holds.
struct NestedRankingWitness {
  Index guard_row = 0;
  Rational guard_bound;  // h0
  Index nilpotence_index = 0;
  std::vector<AffineFunction> functions;  // f_1 .. f_k
  Rational delta;
};

/// Returns a termination witness when M - I is nilpotent and G·N^(k-1)·m has a
/// positive entry; the first such row is used.
std::optional<NestedRankingWitness> nested_ranking_check(const DeterministicUpdate& d);

struct WitnessCheck {
  bool ok = true;
  std::string failed_identity;  // empty when ok

  explicit operator bool() const { return ok; }
};

/// Exact symbolic check of the witness against the update.
WitnessCheck validate_witness(const DeterministicUpdate& d, const NestedRankingWitness& w);

}  // namespace lassocert
