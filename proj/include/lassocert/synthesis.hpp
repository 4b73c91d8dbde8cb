#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lassocert/certificate.hpp"
#include "lassocert/formula.hpp"
#include "lassocert/lasso.hpp"
#include "lassocert/smt.hpp"
#include "lassocert/spectrum.hpp"

namespace lassocert {

/// Unknown names used by gnta_constraints, with i the 0-based variable
/// position and j the 1-based ray index:
///   x0_i, x1_i        initial state and loop entry state
///   y{j}_{i}          ray j
///   lam{j}, mu{j}     λ_j and μ_j
std::string x0_name(Index i);
std::string x1_name(Index i);
std::string ray_name(Index j, Index i);
std::string lambda_name(Index j);
std::string mu_name(Index j);

/// Existential constraints whose models are exactly the size-k nontermination
/// arguments of `program`: λ, μ >= 0; stem rows at (x0, x1); loop rows at
/// (x1, x1 + Σ y_j), strict where the row is; and for every j the homogeneous
/// loop rows at (y_j, λ_j y_j + μ_{j-1} y_{j-1}) <= 0. For a program without
/// stem, x0 = x1 is added. Linear for k = 0 and after λ, μ are fixed.
ConstraintFormula gnta_constraints(const LassoProgram& program, std::size_t k,
                                   Sort sort = Sort::Real);

/// Reads a certificate of size k back out of a model of gnta_constraints.
/// `fixed` supplies values for unknowns substituted away before solving.
GntaCertificate certificate_from_model(const LassoProgram& program, std::size_t k,
                                       const Model& model, const Model& fixed = {});

struct FixedPointResult {
  std::optional<GntaCertificate> certificate;
  SolverOutcome outcome;
};

/// Searches for x* with (x0, x*) in the stem and (x*, x*) in the loop.
FixedPointResult fixed_point(const LassoProgram& program, const SolverConfig& solver,
                             Sort sort = Sort::Real);

/// A λ assignment with one μ pattern.
struct LambdaCandidate {
  std::vector<Rational> lambdas;
  std::vector<Rational> mus;

  /// lam{j} / mu{j} values, ready for ConstraintFormula::substitute.
  Model as_model() const;
};

/// Size-k λ candidates from the update's rational eigenvalues: every
/// sub-multiset of k nonnegative eigenvalues in nonincreasing order, each with
/// every μ pattern in {0,1}^(k-1). Empty unless all eigenvalues are rational;
/// a single empty candidate for k = 0.
std::vector<LambdaCandidate> fixed_lambda_candidates(const DeterministicUpdate& d, std::size_t k);

enum class Strategy { NestedRanking, FixedPoint, FixedLambda, Nonlinear };

const char* to_string(Strategy s);

enum class AnalysisMode { Auto, FixedPoint, Gnta };

/// Strategy order for a mode:
///   fixedpoint:  nested-ranking, fixed-point
///   gnta:        nested-ranking, fixed-point, nonlinear
///   auto:        nested-ranking, fixed-point, fixed-lambda, nonlinear
std::vector<Strategy> strategies_for(AnalysisMode mode);

std::optional<AnalysisMode> parse_mode(std::string_view name);
const char* to_string(AnalysisMode mode);

struct SynthesisOptions {
  std::optional<std::size_t> max_size;  // defaults to the number of variables
  std::vector<Strategy> strategies = strategies_for(AnalysisMode::Auto);
  bool integer_mode = false;
  std::chrono::milliseconds timeout{12000};
  std::optional<SolverConfig> solver;  // required once a solver strategy runs
};

struct StrategyAttempt {
  Strategy strategy;
  std::size_t k = 0;
  std::string detail;
  std::optional<SolverStatus> status;
  std::chrono::milliseconds solver_time{0};
};

struct NonterminatingVerdict {
  GntaCertificate certificate;
};

struct TerminatingVerdict {
  NestedRankingWitness witness;
  DeterministicUpdate update;
};

struct UnknownVerdict {
  std::string reason;
};

struct AnalysisVerdict {
  std::variant<NonterminatingVerdict, TerminatingVerdict, UnknownVerdict> result;
  std::optional<Strategy> strategy;  // the strategy that produced the verdict
  std::vector<StrategyAttempt> log;

  bool nonterminating() const { return std::holds_alternative<NonterminatingVerdict>(result); }
  bool terminating() const { return std::holds_alternative<TerminatingVerdict>(result); }
  bool unknown() const { return std::holds_alternative<UnknownVerdict>(result); }
  const char* name() const;
  std::chrono::milliseconds solver_time() const;
};

class SolverUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The solver failed to run or answered outside the protocol.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A produced certificate or witness failed exact re-validation.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Runs the strategies in order; the first success wins, and within a
/// strategy the smallest size wins. Every certificate and witness is
/// re-validated exactly before it is returned.
AnalysisVerdict analyze(const LassoProgram& program, const SynthesisOptions& opts);

}  // namespace lassocert
