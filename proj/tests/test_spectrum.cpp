#include <gtest/gtest.h>

#include <random>

#include "lassocert/spectrum.hpp"
#include "support.hpp"

using namespace lassocert;
using namespace testing_support;

namespace {

ExactMatrix random_matrix(std::mt19937& rng, Index n, long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  ExactMatrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = Q(d(rng));
  return m;
}

DeterministicUpdate update_of(const char* src) {
  auto d = detect_deterministic(parse_lasso(src).loop);
  if (!d) throw std::logic_error("not deterministic");
  return *d;
}

}  // namespace

TEST(CharPoly, Examples) {
  ExactMatrix m(2, 2);
  m << Q(3), Q(0), Q(0), Q(1);
  EXPECT_EQ(char_poly(m).coefficients, V({3, -4, 1}));
  m << Q(3), Q(1), Q(0), Q(2);
  EXPECT_EQ(char_poly(m).coefficients, V({6, -5, 1}));
  EXPECT_EQ(char_poly(ExactMatrix(0, 0)).coefficients, V({1}));
  EXPECT_THROW(char_poly(ExactMatrix(2, 3)), std::invalid_argument);
}

TEST(CharPoly, AgreesWithCofactorExpansion) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const ExactMatrix m = random_matrix(rng, 4, -2, 2);
    const CharPoly p = char_poly(m);
    ASSERT_EQ(p.degree(), 4);
    // Two monic quartics that agree on five points are equal.
    for (long x = -2; x <= 2; ++x) {
      const ExactMatrix shifted = Q(x) * ExactMatrix::Identity(4, 4) - m;
      ASSERT_EQ(p(Q(x)), cofactor_det(shifted)) << m;
    }
  }
}

TEST(CharPoly, WorksOverDoubleToo) {
  Eigen::Matrix2d m;
  m << 3, 0, 0, 1;
  const Eigen::VectorXd c = char_poly_coefficients(m);
  EXPECT_DOUBLE_EQ(c(0), 3.0);
  EXPECT_DOUBLE_EQ(c(1), -4.0);
  EXPECT_DOUBLE_EQ(c(2), 1.0);
}

TEST(Spectrum, RationalRootsWithMultiplicity) {
  CharPoly p{V({3, -4, 1})};
  SpectrumReport s = rational_spectrum(p);
  EXPECT_TRUE(s.all_roots_rational);
  EXPECT_TRUE(s.all_nonnegative);
  EXPECT_EQ(s.roots_with_multiplicity(), (std::vector<Rational>{Q(3), Q(1)}));

  // (x - 2)^2 x (x + 1/2) = x^4 - 7/2 x^3 + 2 x^2 + 2 x
  s = rational_spectrum(CharPoly{make_vector({Q(0), Q(2), Q(2), Q(-7, 2), Q(1)})});
  EXPECT_TRUE(s.all_roots_rational);
  EXPECT_FALSE(s.all_nonnegative);
  EXPECT_EQ(s.roots_with_multiplicity(), (std::vector<Rational>{Q(2), Q(2), Q(0), Q(-1, 2)}));
  EXPECT_EQ(s.root_count(), 4u);
}

TEST(Spectrum, IrrationalAndComplexRoots) {
  SpectrumReport s = rational_spectrum(CharPoly{V({1, 0, 1})});  // x^2 + 1
  EXPECT_FALSE(s.all_roots_rational);
  EXPECT_TRUE(s.rational_roots.empty());
  s = rational_spectrum(CharPoly{V({-2, 0, 1})});  // x^2 - 2
  EXPECT_FALSE(s.all_roots_rational);
  s = rational_spectrum(CharPoly{V({-2, -1, 1})});  // (x - 2)(x + 1)
  EXPECT_TRUE(s.all_roots_rational);
  EXPECT_FALSE(s.all_nonnegative);
}

// Property: every reported root is a root of the stated multiplicity, and
// for triangular matrices the multiset matches the diagonal.
TEST(Spectrum, TriangularMatricesRecoverTheDiagonal) {
  std::mt19937 rng(19);
  std::uniform_int_distribution<long> d(-3, 3), den(1, 2);
  for (int trial = 0; trial < 300; ++trial) {
    ExactMatrix m = random_matrix(rng, 4, -2, 2);
    std::vector<Rational> diag;
    for (Index i = 0; i < 4; ++i) {
      for (Index j = 0; j < i; ++j) m(i, j) = 0;
      m(i, i) = Q(d(rng), den(rng));
      diag.push_back(m(i, i));
    }
    std::sort(diag.rbegin(), diag.rend());
    const SpectrumReport s = rational_spectrum(char_poly(m));
    ASSERT_TRUE(s.all_roots_rational);
    ASSERT_EQ(s.roots_with_multiplicity(), diag);
  }
}

TEST(Nilpotent, Index) {
  ExactMatrix m = ExactMatrix::Identity(3, 3);
  EXPECT_EQ(nilpotent_part(m), 1);
  m(0, 1) = 1;
  EXPECT_EQ(nilpotent_part(m), 2);
  m(1, 2) = 1;
  EXPECT_EQ(nilpotent_part(m), 3);
  m(2, 2) = 2;
  EXPECT_FALSE(nilpotent_part(m));
}

TEST(NestedRankingCheck, CountdownWitness) {
  const DeterministicUpdate d = update_of(kCountdown);
  const auto w = nested_ranking_check(d);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->delta, Q(1));
  EXPECT_EQ(w->nilpotence_index, 1);
  ASSERT_EQ(w->functions.size(), 1u);
  EXPECT_EQ(w->functions[0].coeffs, V({1}));
  EXPECT_TRUE(validate_witness(d, *w));
}

TEST(NestedRankingCheck, AbsentCases) {
  EXPECT_FALSE(nested_ranking_check(update_of(kCountup)));
  EXPECT_FALSE(nested_ranking_check(update_of(kDiagonalGrowth)));
  EXPECT_FALSE(nested_ranking_check(update_of("vars: x y; loop: x >= 0 && y >= 1 && x' = x - y && y' = y;")));
}

TEST(NestedRankingCheck, NestedDepths) {
  const DeterministicUpdate two = update_of("vars: x y; loop: x >= 0 && y >= 0 && x' = x + y && y' = y - 1;");
  auto w = nested_ranking_check(two);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->nilpotence_index, 2);
  EXPECT_TRUE(validate_witness(two, *w));

  const DeterministicUpdate three = update_of("vars: x y z; loop: x >= 0 && x' = x + y && y' = y + z && z' = z - 1;");
  w = nested_ranking_check(three);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->nilpotence_index, 3);
  EXPECT_EQ(w->delta, Q(1));
  EXPECT_TRUE(validate_witness(three, *w));
}

TEST(NestedRankingCheck, TamperedWitnessesFail) {
  const DeterministicUpdate d = update_of("vars: x y; loop: x >= 0 && y >= 0 && x' = x + y && y' = y - 1;");
  const NestedRankingWitness good = *nested_ranking_check(d);

  NestedRankingWitness w = good;
  w.delta += 1;
  EXPECT_FALSE(validate_witness(d, w));
  w = good;
  w.functions[0].coeffs(0) += 1;
  EXPECT_FALSE(validate_witness(d, w));
  w = good;
  w.functions[1].constant = w.guard_bound;
  EXPECT_FALSE(validate_witness(d, w));
  w = good;
  w.functions.pop_back();
  EXPECT_FALSE(validate_witness(d, w));
  w = good;
  w.guard_row = 1;
  EXPECT_FALSE(validate_witness(d, w).ok);
  EXPECT_FALSE(validate_witness(d, w).failed_identity.empty());
}

// Property: along any run of the loop, f_1 drops by δ, each f_j changes by
// f_{j-1} - 1, and f_k stays positive; the run ends within a bound.
TEST(NestedRankingCheck, RankingFunctionsBehaveAlongRuns) {
  const std::vector<const char*> loops{
      kCountdown, "vars: x y; loop: x >= 0 && y >= 0 && x' = x + y && y' = y - 1;",
      "vars: x y z; loop: x >= 0 && x' = x + y && y' = y + z && z' = z - 1;",
      "vars: x y; loop: 2x - y <= 7 && x' = x + 1/2 && y' = y;"};
  std::mt19937 rng(23);
  std::uniform_int_distribution<long> start(-10, 10);
  for (const char* src : loops) {
    const DeterministicUpdate d = update_of(src);
    const auto w = nested_ranking_check(d);
    ASSERT_TRUE(w) << src;
    ASSERT_TRUE(validate_witness(d, *w)) << src;
    const std::size_t k = w->functions.size();
    for (int trial = 0; trial < 50; ++trial) {
      ExactVector x(d.dim());
      for (Index i = 0; i < d.dim(); ++i) x(i) = Q(start(rng));
      int steps = 0;
      while (d.guard_holds(x)) {
        ASSERT_LT(++steps, 100000) << src;
        const ExactVector next = d.apply(x);
        ASSERT_GT(w->functions[k - 1](x), 0);
        ASSERT_EQ(w->functions[0](next), w->functions[0](x) - w->delta);
        for (std::size_t j = 1; j < k; ++j)
          ASSERT_EQ(w->functions[j](next), w->functions[j](x) + w->functions[j - 1](x) - 1);
        x = next;
      }
    }
  }
}
