#include <gtest/gtest.h>

#include <random>

#include "lassocert/formula.hpp"
#include "lassocert/synthesis.hpp"
#include "support.hpp"

using namespace lassocert;
using namespace testing_support;


TEST(Polynomial, ArithmeticAndDegree) {
  ConstraintFormula f;
  const UnknownId a = f.declare("a"), b = f.declare("b");
  Polynomial p = Polynomial::variable(a, Q(2)) + Polynomial(Q(3));
  Polynomial q = Polynomial::variable(b) + Polynomial::variable(a, Q(-1));
  Polynomial prod = p * q;  // (2a + 3)(b - a) = 2ab - 2a^2 + 3b - 3a
  EXPECT_EQ(prod.degree(), 2u);
  EXPECT_EQ(prod.constant(), Q(0));
  EXPECT_EQ(prod.terms().at(Monomial{a, b}), Q(2));
  EXPECT_EQ(prod.terms().at(Monomial{a, a}), Q(-2));
  EXPECT_EQ(prod.terms().size(), 4u);

  Polynomial cancel = p + (Polynomial(p) *= Q(-1));
  EXPECT_TRUE(cancel.terms().empty());
  EXPECT_EQ(cancel.degree(), 0u);
}

TEST(Formula, DeclareEvaluateSubstitute) {
  ConstraintFormula f;
  const UnknownId x = f.declare("x"), y = f.declare("y", Sort::Int);
  EXPECT_THROW(f.declare("x"), std::invalid_argument);
  f.add(Polynomial::variable(x) + Polynomial::variable(y, Q(-1)), Relation::Lt);  // x - y < 0
  f.add(Polynomial::variable(x) * Polynomial::variable(y) + Polynomial(Q(-6)), Relation::Eq);
  EXPECT_TRUE(f.has_int_unknowns());
  EXPECT_EQ(f.degree(), 2u);
  EXPECT_TRUE(f.evaluate({{"x", Q(2)}, {"y", Q(3)}}));
  EXPECT_FALSE(f.evaluate({{"x", Q(3)}, {"y", Q(2)}}));
  EXPECT_THROW(f.evaluate({{"x", Q(2)}}), std::out_of_range);

  const ConstraintFormula g = f.substitute({{"y", Q(3)}});
  EXPECT_EQ(g.unknowns().size(), 1u);
  EXPECT_FALSE(g.find("y"));
  EXPECT_EQ(g.degree(), 1u);
  EXPECT_TRUE(g.evaluate({{"x", Q(2)}}));
  EXPECT_FALSE(g.evaluate({{"x", Q(1)}}));
}

TEST(Formula, HoldsRelation) {
  EXPECT_TRUE(holds(Relation::Le, Q(0)));
  EXPECT_FALSE(holds(Relation::Lt, Q(0)));
  EXPECT_TRUE(holds(Relation::Eq, Q(0)));
  EXPECT_TRUE(holds(Relation::Ge, Q(1)));
  EXPECT_FALSE(holds(Relation::Gt, Q(-1)));
}

TEST(Encoder, CoupledGrowthShape) {
  const ConstraintFormula f = gnta_constraints(parse_lasso(kCoupledGrowth), 2);
  EXPECT_EQ(f.unknowns().size(), 2u + 2u + 4u + 2u + 1u);
  EXPECT_EQ(f.degree(), 2u);
  EXPECT_TRUE(f.well_shaped());
  EXPECT_TRUE(f.evaluate(model_of(coupled_growth_certificate())));
  GntaCertificate bad = coupled_growth_certificate();
  bad.mus(0) = 0;
  EXPECT_FALSE(f.evaluate(model_of(bad)));
}

TEST(Encoder, SizeZeroIsLinearAndStemFreeProgramsPinX0) {
  const ConstraintFormula f = gnta_constraints(parse_lasso(kCountup), 0);
  EXPECT_LE(f.degree(), 1u);
  EXPECT_TRUE(f.evaluate({{"x0_0", Q(0)}, {"x1_0", Q(0)}}) == false);  // no fixed point of x + 1
  const ConstraintFormula g = gnta_constraints(parse_lasso("vars: x; loop: x >= 0 && x' = x;"), 0);
  EXPECT_TRUE(g.evaluate({{"x0_0", Q(4)}, {"x1_0", Q(4)}}));
  EXPECT_FALSE(g.evaluate({{"x0_0", Q(3)}, {"x1_0", Q(4)}}));
}

TEST(Encoder, CountupSizeOne) {
  const ConstraintFormula f = gnta_constraints(parse_lasso(kCountup), 1);
  EXPECT_TRUE(f.evaluate({{"x0_0", Q(0)}, {"x1_0", Q(0)}, {"y1_0", Q(1)}, {"lam1", Q(1)}}));
  EXPECT_FALSE(f.evaluate({{"x0_0", Q(0)}, {"x1_0", Q(0)}, {"y1_0", Q(1)}, {"lam1", Q(2)}}));
}

TEST(Encoder, FixingLambdaMakesItLinear) {
  const ConstraintFormula f = gnta_constraints(parse_lasso(kCoupledGrowth), 2);
  const ConstraintFormula g = f.substitute({{"lam1", Q(3)}, {"lam2", Q(2)}, {"mu1", Q(1)}});
  EXPECT_LE(g.degree(), 1u);
  EXPECT_EQ(g.unknowns().size(), 8u);
}

TEST(Encoder, IntegerSortPropagates) {
  const ConstraintFormula f = gnta_constraints(parse_lasso(kCoupledGrowth), 1, Sort::Int);
  for (const Unknown& u : f.unknowns()) EXPECT_EQ(u.sort, Sort::Int) << u.name;
}

// Property: the encoding is faithful; its truth value at a certificate
// equals the validator's verdict.
TEST(Encoder, AgreesWithValidator) {
  std::mt19937 rng(29);
  const std::vector<LassoProgram> programs{parse_lasso(kNondetGrowth), parse_lasso(kDiagonalGrowth), parse_lasso(kCoupledGrowth),
                                           parse_lasso(kExpVsLinear), parse_lasso(kCountup),
                                           parse_lasso("vars: x; loop: x > 0 && x' = 2x;")};
  std::uniform_int_distribution<std::size_t> pick(0, programs.size() - 1);
  std::uniform_int_distribution<int> size(0, 2);
  int agreements_true = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const LassoProgram& p = programs[pick(rng)];
    GntaCertificate c = random_certificate(rng, p.dim(), size(rng));
    if (trial % 5 == 0 && p.dim() == 2) c = trial % 2 ? coupled_growth_certificate() : exp_vs_linear_certificate();
    // Without a stem the encoding pins x0 to x1.
    if (p.stem.is_true()) c.x0 = c.x1;
    const ConstraintFormula f = gnta_constraints(p, static_cast<std::size_t>(c.size()));
    const bool valid = validate(p, c).passed;
    agreements_true += valid;
    ASSERT_EQ(f.evaluate(model_of(c)), valid) << serialize(c);
  }
  EXPECT_GT(agreements_true, 0);
}

TEST(Encoder, CertificateFromModelRoundTrip) {
  const LassoProgram p = parse_lasso(kCoupledGrowth);
  const GntaCertificate c = coupled_growth_certificate();
  Model m = model_of(c);
  EXPECT_EQ(certificate_from_model(p, 2, m), c);
  Model fixed{{"lam1", Q(3)}, {"lam2", Q(2)}, {"mu1", Q(1)}};
  for (const auto& [name, v] : fixed) m.erase(name);
  EXPECT_EQ(certificate_from_model(p, 2, m, fixed), c);
  m.erase("x0_0");
  EXPECT_THROW(certificate_from_model(p, 2, m, fixed), std::invalid_argument);
}

TEST(Candidates, DiagonalGrowthAndExpVsLinear) {
  auto diagonal_growth = fixed_lambda_candidates(*detect_deterministic(parse_lasso(kDiagonalGrowth).loop), 2);
  ASSERT_EQ(diagonal_growth.size(), 2u);
  EXPECT_EQ(diagonal_growth[0].lambdas, (std::vector<Rational>{Q(3), Q(2)}));
  EXPECT_EQ(diagonal_growth[0].mus, (std::vector<Rational>{Q(0)}));
  EXPECT_EQ(diagonal_growth[1].mus, (std::vector<Rational>{Q(1)}));

  auto ev = fixed_lambda_candidates(*detect_deterministic(parse_lasso(kExpVsLinear).loop), 2);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].lambdas, (std::vector<Rational>{Q(3), Q(1)}));

  auto one = fixed_lambda_candidates(*detect_deterministic(parse_lasso(kDiagonalGrowth).loop), 1);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0].lambdas, (std::vector<Rational>{Q(3)}));
  EXPECT_EQ(one[1].lambdas, (std::vector<Rational>{Q(2)}));
  EXPECT_TRUE(one[0].mus.empty());
}

TEST(Candidates, EdgeCases) {
  const DeterministicUpdate diagonal_growth = *detect_deterministic(parse_lasso(kDiagonalGrowth).loop);
  ASSERT_EQ(fixed_lambda_candidates(diagonal_growth, 0).size(), 1u);
  EXPECT_TRUE(fixed_lambda_candidates(diagonal_growth, 3).empty());
  const auto rot = detect_deterministic(parse_lasso("vars: x y; loop: x >= 1 && x' = -y && y' = x;").loop);
  EXPECT_TRUE(fixed_lambda_candidates(*rot, 1).empty());
  const auto neg = detect_deterministic(parse_lasso("vars: x y; loop: x >= 1 && x' = -x && y' = 2y;").loop);
  const auto c = fixed_lambda_candidates(*neg, 1);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].lambdas, (std::vector<Rational>{Q(2)}));
  // Repeated eigenvalues give one multiset, not one per position.
  const auto jordan = detect_deterministic(parse_lasso("vars: x y; loop: x' = 2x + y && y' = 2y;").loop);
  EXPECT_EQ(fixed_lambda_candidates(*jordan, 2).size(), 2u);
  EXPECT_EQ(fixed_lambda_candidates(*jordan, 1).size(), 1u);
}

TEST(Candidates, CertificateLambdasAreAmongTheCandidates) {
  const auto d = detect_deterministic(parse_lasso(kCoupledGrowth).loop);
  bool found = false;
  for (const auto& c : fixed_lambda_candidates(*d, 2)) {
    found |= c.lambdas == std::vector<Rational>{Q(3), Q(2)} && c.mus == std::vector<Rational>{Q(1)};
  }
  EXPECT_TRUE(found);
}

TEST(Modes, StrategyLists) {
  using S = Strategy;
  EXPECT_EQ(strategies_for(AnalysisMode::FixedPoint), (std::vector<S>{S::NestedRanking, S::FixedPoint}));
  EXPECT_EQ(strategies_for(AnalysisMode::Gnta), (std::vector<S>{S::NestedRanking, S::FixedPoint, S::Nonlinear}));
  EXPECT_EQ(strategies_for(AnalysisMode::Auto),
            (std::vector<S>{S::NestedRanking, S::FixedPoint, S::FixedLambda, S::Nonlinear}));
  EXPECT_EQ(parse_mode("gnta"), AnalysisMode::Gnta);
  EXPECT_FALSE(parse_mode("fast"));
  EXPECT_STREQ(to_string(AnalysisMode::FixedPoint), "fixedpoint");
}

TEST(Analyze, SolverFreePathsNeedNoSolver) {
  SynthesisOptions opts;
  opts.solver.reset();
  const AnalysisVerdict v = analyze(parse_lasso(kCountdown), opts);
  ASSERT_TRUE(v.terminating());
  EXPECT_EQ(v.strategy, Strategy::NestedRanking);
  EXPECT_STREQ(v.name(), "terminating");
  EXPECT_THROW(analyze(parse_lasso(kCountup), opts), SolverUnavailable);
}
