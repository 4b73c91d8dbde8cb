#pragma once

#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "lassocert/certificate.hpp"
#include "lassocert/lasso.hpp"
#include "lassocert/rational.hpp"
#include "lassocert/smt.hpp"
#include "lassocert/synthesis.hpp"

namespace testing_support {

using namespace lassocert;

inline const char* kNondetGrowth =
    "vars: a b;\n"
    "stem: a' = a && b' = 1;\n"
    "loop: a + b >= 3 && a' = 3*a + 1;\n";

inline const char* kDiagonalGrowth =
    "vars: a b;\n"
    "stem: a' = a && b' = 1;\n"
    "loop: a + b >= 3 && a' = 3*a - 2 && b' = 2*b;\n";

inline const char* kCoupledGrowth =
    "vars: a b;\n"
    "stem: a' = a && b' = 1;\n"
    "loop: a + b >= 4 && a' = 3*a + b && b' = 2*b;\n";

inline const char* kExpVsLinear =
    "vars: a b;\n"
    "loop: a - b >= 0 && b >= 0 && a' = 3a && b' = b + 1;\n";

inline const char* kCountdown = "vars: x; loop: x >= 0 && x' = x - 1;";
inline const char* kCountup = "vars: x; loop: x >= 0 && x' = x + 1;";

inline Rational Q(long p, long q = 1) { return make_rational(p, q); }

inline ExactVector V(std::initializer_list<long> xs) {
  ExactVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (long x : xs) v(i++) = Q(x);
  return v;
}

inline GntaCertificate coupled_growth_certificate() {
  return make_certificate(V({3, 0}), V({3, 1}), {V({4, 0}), V({3, 1})}, V({3, 2}), V({1}));
}

inline GntaCertificate exp_vs_linear_certificate() {
  return make_certificate(V({9, 1}), V({9, 1}), {V({12, 0}), V({6, 1})}, V({3, 1}), V({1}));
}

inline GntaCertificate diagonal_growth_certificate() {
  return make_certificate(V({2, 0}), V({2, 1}), {V({2, 0}), V({0, 1})}, V({3, 2}), V({0}));
}

inline GntaCertificate nondet_growth_certificate() {
  return make_certificate(V({2, 0}), V({2, 1}), {V({5, 0})}, V({3}), ExactVector(0));
}

/// Random certificate with small integer and half-integer entries. λ, μ >= 0.
inline GntaCertificate random_certificate(std::mt19937& rng, Index n, Index k) {
  std::uniform_int_distribution<long> entry(-6, 6), nonneg(0, 6), den(1, 2);
  auto r = [&] { return Q(entry(rng), den(rng)); };
  GntaCertificate c;
  c.x0 = ExactVector(n);
  c.x1 = ExactVector(n);
  c.rays = ExactMatrix(n, k);
  c.lambdas = ExactVector(k);
  c.mus = ExactVector(k > 0 ? k - 1 : 0);
  for (Index i = 0; i < n; ++i) {
    c.x0(i) = r();
    c.x1(i) = r();
    for (Index j = 0; j < k; ++j) c.rays(i, j) = r();
  }
  for (Index j = 0; j < k; ++j) c.lambdas(j) = Q(nonneg(rng), den(rng));
  for (Index j = 0; j + 1 < k; ++j) c.mus(j) = Q(nonneg(rng), den(rng));
  return c;
}

/// States of the certified execution straight from its definition:
/// state_0 = x0, state_1 = x1, state_{t+1} = state_t + Y·U^(t-1)·1.
inline std::vector<ExactVector> reference_execution(const GntaCertificate& c, std::size_t steps) {
  const Index k = c.size();
  ExactMatrix U = ExactMatrix::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    U(j, j) = c.lambdas(j);
    if (j + 1 < k) U(j, j + 1) = c.mus(j);
  }
  std::vector<ExactVector> out;
  if (steps == 0) return out;
  out.push_back(c.x0);
  if (steps == 1) return out;
  ExactVector state = c.x1;
  out.push_back(state);
  ExactMatrix power = ExactMatrix::Identity(k, k);
  for (std::size_t t = 2; t < steps; ++t) {
    for (Index i = 0; i < c.dim(); ++i) {
      for (Index a = 0; a < k; ++a) {
        Rational weight = 0;
        for (Index b = 0; b < k; ++b) weight += power(a, b);
        state(i) += c.rays(i, a) * weight;
      }
    }
    out.push_back(state);
    power = power * U;
  }
  return out;
}

/// A random program for which `c` satisfies every condition: random rows are
/// kept when all rays satisfy their homogeneous part, and bounds are set at or
/// above the certificate's values. Some point rows are made strict.
inline LassoProgram program_admitting(std::mt19937& rng, const GntaCertificate& c, int loop_rows, int stem_rows) {
  const Index n = c.dim();
  std::uniform_int_distribution<long> coeff(-3, 3), slack(0, 2), coin(0, 3);
  auto random_row = [&] {
    ConstraintRow r{ExactVector(n), ExactVector(n), Q(0), false};
    for (Index i = 0; i < n; ++i) {
      r.coeffs_x(i) = Q(coeff(rng));
      r.coeffs_xp(i) = Q(coeff(rng));
    }
    return r;
  };
  auto value = [](const ConstraintRow& r, const ExactVector& x, const ExactVector& xp) {
    return Rational(r.coeffs_x.dot(x) + r.coeffs_xp.dot(xp));
  };
  std::vector<ConstraintRow> stem, loop;
  while (static_cast<int>(stem.size()) < stem_rows) {
    ConstraintRow r = random_row();
    r.bound = value(r, c.x0, c.x1) + Q(slack(rng));
    stem.push_back(r);
  }
  ExactVector next = c.x1;
  for (Index j = 0; j < c.size(); ++j) next += c.rays.col(j);
  for (int attempts = 0; static_cast<int>(loop.size()) < loop_rows && attempts < 10000; ++attempts) {
    ConstraintRow r = random_row();
    bool ok = true;
    for (Index j = 0; j < c.size() && ok; ++j) {
      ExactVector image = c.lambdas(j) * c.rays.col(j);
      if (j > 0) image += c.mus(j - 1) * c.rays.col(j - 1);
      ok = value(r, c.rays.col(j), image) <= 0;
    }
    if (!ok) continue;
    const Rational s = Q(slack(rng));
    r.bound = value(r, c.x1, next) + s;
    r.strict = s > 0 && coin(rng) == 0;
    loop.push_back(r);
  }
  std::vector<std::string> vars;
  for (Index i = 0; i < n; ++i) vars.push_back("v" + std::to_string(i));
  return LassoProgram(vars, Transition(n, stem), Transition(n, loop));
}

/// Determinant by Laplace expansion along the first row.
inline Rational cofactor_det(const ExactMatrix& m) {
  const Index n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  Rational det = 0;
  for (Index j = 0; j < n; ++j) {
    if (m(0, j) == 0) continue;
    ExactMatrix minor(n - 1, n - 1);
    for (Index r = 1; r < n; ++r)
      for (Index c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = m(r, c);
    const Rational term = m(0, j) * cofactor_det(minor);
    det += (j % 2 == 0) ? term : Rational(-term);
  }
  return det;
}

/// Unknown assignment that encodes `c` under the synthesis naming scheme.
inline Model model_of(const GntaCertificate& c) {
  Model m;
  for (Index i = 0; i < c.dim(); ++i) {
    m[x0_name(i)] = c.x0(i);
    m[x1_name(i)] = c.x1(i);
    for (Index j = 0; j < c.size(); ++j) m[ray_name(j + 1, i)] = c.rays(i, j);
  }
  for (Index j = 0; j < c.size(); ++j) m[lambda_name(j + 1)] = c.lambdas(j);
  for (Index j = 0; j + 1 < c.size(); ++j) m[mu_name(j + 1)] = c.mus(j);
  return m;
}

inline std::optional<SolverConfig> test_solver() { return default_solver(); }

}  // namespace testing_support
