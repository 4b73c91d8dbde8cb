#include "lassocert/synthesis.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace lassocert {

std::string x0_name(Index i) { return "x0_" + std::to_string(i); }
std::string x1_name(Index i) { return "x1_" + std::to_string(i); }
std::string ray_name(Index j, Index i) { return "y" + std::to_string(j) + "_" + std::to_string(i); }
std::string lambda_name(Index j) { return "lam" + std::to_string(j); }
std::string mu_name(Index j) { return "mu" + std::to_string(j); }

namespace {

using Affine = std::vector<Polynomial>;  // one polynomial per state coordinate

// Σ_r coeffs_x(row)·x + coeffs_xp(row)·xp - bound (bound omitted when homogeneous).
Polynomial apply_row(const Transition& t, Index row, const Affine& x, const Affine& xp,
                     bool homogeneous) {
  Polynomial p(homogeneous ? Rational(0) : Rational(-t.bounds()(row)));
  for (Index i = 0; i < t.dim(); ++i) {
    const Rational& a = t.coeffs_x()(row, i);
    const Rational& b = t.coeffs_xp()(row, i);
    if (a != 0) {
      Polynomial term = x[static_cast<std::size_t>(i)];
      p += (term *= a);
    }
    if (b != 0) {
      Polynomial term = xp[static_cast<std::size_t>(i)];
      p += (term *= b);
    }
  }
  return p;
}

Relation row_relation(const Transition& t, Index row) {
  return t.strict(row) ? Relation::Lt : Relation::Le;
}

}  // namespace

ConstraintFormula gnta_constraints(const LassoProgram& program, std::size_t k, Sort sort) {
  const Index n = program.dim();
  const Index size = static_cast<Index>(k);
  ConstraintFormula f;

  Affine x0, x1;
  std::vector<Affine> rays(k);
  std::vector<Polynomial> lambdas, mus;
  for (Index i = 0; i < n; ++i) x0.push_back(Polynomial::variable(f.declare(x0_name(i), sort, UnknownRole::State)));
  for (Index i = 0; i < n; ++i) x1.push_back(Polynomial::variable(f.declare(x1_name(i), sort, UnknownRole::State)));
  for (Index j = 1; j <= size; ++j) {
    for (Index i = 0; i < n; ++i) {
      rays[static_cast<std::size_t>(j - 1)].push_back(
          Polynomial::variable(f.declare(ray_name(j, i), sort, UnknownRole::Ray)));
    }
  }
  for (Index j = 1; j <= size; ++j) {
    lambdas.push_back(Polynomial::variable(f.declare(lambda_name(j), sort, UnknownRole::Coefficient)));
  }
  for (Index j = 1; j < size; ++j) {
    mus.push_back(Polynomial::variable(f.declare(mu_name(j), sort, UnknownRole::Coefficient)));
  }

  // (domain)
  for (const auto& l : lambdas) f.add(l, Relation::Ge);
  for (const auto& m : mus) f.add(m, Relation::Ge);

  // (initiation)
  for (Index r = 0; r < program.stem.size(); ++r) {
    f.add(apply_row(program.stem, r, x0, x1, false), row_relation(program.stem, r));
  }
  if (program.stem.is_true()) {
    for (Index i = 0; i < n; ++i) {
      Polynomial diff = x0[static_cast<std::size_t>(i)];
      Polynomial neg = x1[static_cast<std::size_t>(i)];
      f.add(diff + (neg *= Rational(-1)), Relation::Eq);
    }
  }

  // (point)
  Affine next = x1;
  for (const auto& y : rays) {
    for (Index i = 0; i < n; ++i) next[static_cast<std::size_t>(i)] += y[static_cast<std::size_t>(i)];
  }
  for (Index r = 0; r < program.loop.size(); ++r) {
    f.add(apply_row(program.loop, r, x1, next, false), row_relation(program.loop, r));
  }

  // (ray): A (y_j ; λ_j y_j + μ_{j-1} y_{j-1}) <= 0, never strict
  for (std::size_t j = 0; j < k; ++j) {
    Affine image;
    for (Index i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      Polynomial coord = lambdas[j] * rays[j][ii];
      if (j > 0) coord += mus[j - 1] * rays[j - 1][ii];
      image.push_back(std::move(coord));
    }
    for (Index r = 0; r < program.loop.size(); ++r) {
      f.add(apply_row(program.loop, r, rays[j], image, true), Relation::Le);
    }
  }
  return f;
}

GntaCertificate certificate_from_model(const LassoProgram& program, std::size_t k,
                                       const Model& model, const Model& fixed) {
  auto value = [&](const std::string& name) -> Rational {
    if (auto it = model.find(name); it != model.end()) return it->second;
    if (auto it = fixed.find(name); it != fixed.end()) return it->second;
    throw std::invalid_argument("model has no value for '" + name + "'");
  };
  const Index n = program.dim();
  const Index size = static_cast<Index>(k);
  GntaCertificate c;
  c.x0 = ExactVector(n);
  c.x1 = ExactVector(n);
  c.rays = ExactMatrix(n, size);
  c.lambdas = ExactVector(size);
  c.mus = ExactVector(std::max<Index>(size - 1, 0));
  for (Index i = 0; i < n; ++i) {
    c.x0(i) = value(x0_name(i));
    c.x1(i) = value(x1_name(i));
  }
  for (Index j = 1; j <= size; ++j) {
    for (Index i = 0; i < n; ++i) c.rays(i, j - 1) = value(ray_name(j, i));
    c.lambdas(j - 1) = value(lambda_name(j));
    if (j < size) c.mus(j - 1) = value(mu_name(j));
  }
  return c;
}

FixedPointResult fixed_point(const LassoProgram& program, const SolverConfig& solver, Sort sort) {
  FixedPointResult result;
  result.outcome = solve(gnta_constraints(program, 0, sort), solver);
  if (result.outcome.status == SolverStatus::Sat) {
    result.certificate = certificate_from_model(program, 0, *result.outcome.model);
  }
  return result;
}

Model LambdaCandidate::as_model() const {
  Model m;
  for (std::size_t j = 0; j < lambdas.size(); ++j) m[lambda_name(static_cast<Index>(j + 1))] = lambdas[j];
  for (std::size_t j = 0; j < mus.size(); ++j) m[mu_name(static_cast<Index>(j + 1))] = mus[j];
  return m;
}

std::vector<LambdaCandidate> fixed_lambda_candidates(const DeterministicUpdate& d, std::size_t k) {
  if (k == 0) return {LambdaCandidate{}};
  const SpectrumReport spectrum = rational_spectrum(char_poly(d.update_M));
  if (!spectrum.all_roots_rational) return {};

  std::vector<Rational> roots;
  for (const Rational& r : spectrum.roots_with_multiplicity()) {
    if (r >= 0) roots.push_back(r);  // (domain) rules out negative λ
  }
  if (k > roots.size()) return {};

  // Sub-multisets of size k, kept in nonincreasing order, without repeats.
  std::vector<std::vector<Rational>> choices;
  std::set<std::vector<Rational>> seen;
  std::vector<bool> pick(roots.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  do {
    std::vector<Rational> chosen;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (pick[i]) chosen.push_back(roots[i]);
    }
    if (seen.insert(chosen).second) choices.push_back(std::move(chosen));
  } while (std::prev_permutation(pick.begin(), pick.end()));

  std::vector<LambdaCandidate> out;
  const std::size_t patterns = std::size_t{1} << (k - 1);
  for (const auto& lambdas : choices) {
    for (std::size_t bits = 0; bits < patterns; ++bits) {
      LambdaCandidate c{lambdas, {}};
      for (std::size_t j = 0; j + 1 < k; ++j) c.mus.push_back(Rational((bits >> j) & 1u));
      out.push_back(std::move(c));
    }
  }
  return out;
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::NestedRanking: return "nested-ranking";
    case Strategy::FixedPoint: return "fixed-point";
    case Strategy::FixedLambda: return "fixed-lambda";
    case Strategy::Nonlinear: return "nonlinear";
  }
  return "?";
}

std::vector<Strategy> strategies_for(AnalysisMode mode) {
  switch (mode) {
    case AnalysisMode::FixedPoint:
      return {Strategy::NestedRanking, Strategy::FixedPoint};
    case AnalysisMode::Gnta:
      return {Strategy::NestedRanking, Strategy::FixedPoint, Strategy::Nonlinear};
    case AnalysisMode::Auto:
      break;
  }
  return {Strategy::NestedRanking, Strategy::FixedPoint, Strategy::FixedLambda, Strategy::Nonlinear};
}

std::optional<AnalysisMode> parse_mode(std::string_view name) {
  if (name == "auto") return AnalysisMode::Auto;
  if (name == "fixedpoint") return AnalysisMode::FixedPoint;
  if (name == "gnta") return AnalysisMode::Gnta;
  return std::nullopt;
}

const char* to_string(AnalysisMode mode) {
  switch (mode) {
    case AnalysisMode::Auto: return "auto";
    case AnalysisMode::FixedPoint: return "fixedpoint";
    case AnalysisMode::Gnta: return "gnta";
  }
  return "?";
}

const char* AnalysisVerdict::name() const {
  if (nonterminating()) return "nonterminating";
  if (terminating()) return "terminating";
  return "unknown";
}

std::chrono::milliseconds AnalysisVerdict::solver_time() const {
  std::chrono::milliseconds total{0};
  for (const auto& a : log) total += a.solver_time;
  return total;
}

namespace {

class Analysis {
 public:
  Analysis(const LassoProgram& program, const SynthesisOptions& opts)
      : program_(program),
        opts_(opts),
        sort_(opts.integer_mode ? Sort::Int : Sort::Real),
        max_size_(opts.max_size.value_or(static_cast<std::size_t>(program.dim()))),
        update_(detect_deterministic(program.loop)) {}

  AnalysisVerdict run() {
    for (Strategy s : opts_.strategies) {
      std::optional<AnalysisVerdict> v;
      switch (s) {
        case Strategy::NestedRanking: v = nested_ranking(); break;
        case Strategy::FixedPoint: v = query(s, 0, gnta_constraints(program_, 0, sort_), {}); break;
        case Strategy::FixedLambda: v = fixed_lambda(); break;
        case Strategy::Nonlinear: v = nonlinear(); break;
      }
      if (v) {
        v->strategy = s;
        v->log = std::move(log_);
        return *std::move(v);
      }
    }
    std::ostringstream reason;
    reason << "no strategy succeeded (";
    for (std::size_t i = 0; i < log_.size(); ++i) {
      const auto& a = log_[i];
      reason << (i ? "; " : "") << to_string(a.strategy) << " k=" << a.k << ": "
             << (a.status ? to_string(*a.status) : a.detail.c_str());
    }
    reason << ")";
    return AnalysisVerdict{UnknownVerdict{reason.str()}, std::nullopt, std::move(log_)};
  }

 private:
  std::optional<AnalysisVerdict> nested_ranking() {
    if (!update_) {
      log_.push_back({Strategy::NestedRanking, 0, "loop is not deterministic", std::nullopt, {}});
      return std::nullopt;
    }
    auto witness = nested_ranking_check(*update_);
    if (!witness) {
      log_.push_back({Strategy::NestedRanking, 0, "not applicable", std::nullopt, {}});
      return std::nullopt;
    }
    if (auto check = validate_witness(*update_, *witness); !check) {
      throw InternalError("nested ranking witness failed re-validation: " + check.failed_identity);
    }
    log_.push_back({Strategy::NestedRanking, static_cast<std::size_t>(witness->nilpotence_index),
                    "witness found", std::nullopt, {}});
    return AnalysisVerdict{TerminatingVerdict{*witness, *update_}, {}, {}};
  }

  std::optional<AnalysisVerdict> fixed_lambda() {
    if (!update_) {
      log_.push_back({Strategy::FixedLambda, 0, "loop is not deterministic", std::nullopt, {}});
      return std::nullopt;
    }
    const SpectrumReport spectrum = rational_spectrum(char_poly(update_->update_M));
    if (!spectrum.all_roots_rational || !spectrum.all_nonnegative) {
      log_.push_back({Strategy::FixedLambda, 0, "spectrum not rational and nonnegative", std::nullopt, {}});
      return std::nullopt;
    }
    for (std::size_t k = 1; k <= max_size_; ++k) {
      const ConstraintFormula full = gnta_constraints(program_, k, sort_);
      for (const LambdaCandidate& c : fixed_lambda_candidates(*update_, k)) {
        if (auto v = query(Strategy::FixedLambda, k, full.substitute(c.as_model()), c.as_model())) {
          return v;
        }
      }
    }
    return std::nullopt;
  }

  std::optional<AnalysisVerdict> nonlinear() {
    for (std::size_t k = 1; k <= max_size_; ++k) {
      if (auto v = query(Strategy::Nonlinear, k, gnta_constraints(program_, k, sort_), {})) return v;
    }
    return std::nullopt;
  }

  std::optional<AnalysisVerdict> query(Strategy s, std::size_t k, const ConstraintFormula& f,
                                       const Model& fixed) {
    SolverConfig cfg = solver();
    cfg.timeout = opts_.timeout;
    SolverOutcome outcome = solve(f, cfg);
    std::string detail;
    if (!fixed.empty()) {
      for (const auto& [name, value] : fixed) detail += (detail.empty() ? "" : " ") + name + "=" + to_string(value);
    }
    log_.push_back({s, k, detail, outcome.status, outcome.elapsed});
    if (outcome.status == SolverStatus::ProcessError) {
      throw SolverError("solver failure during " + std::string(to_string(s)) + " k=" +
                        std::to_string(k) + "\n" + outcome.transcript);
    }
    if (outcome.status != SolverStatus::Sat) return std::nullopt;

    GntaCertificate cert = certificate_from_model(program_, k, *outcome.model, fixed);
    const ValidationReport report = validate(program_, cert);
    if (!report.passed) {
      throw InternalError("certificate from " + std::string(to_string(s)) + " k=" +
                          std::to_string(k) + " failed re-validation:\n" + report.summary());
    }
    return AnalysisVerdict{NonterminatingVerdict{std::move(cert)}, {}, {}};
  }

  const SolverConfig& solver() const {
    if (!opts_.solver) throw SolverUnavailable("no SMT solver configured (set LASSOCERT_SMT or --solver)");
    return *opts_.solver;
  }

  const LassoProgram& program_;
  const SynthesisOptions& opts_;
  Sort sort_;
  std::size_t max_size_;
  std::optional<DeterministicUpdate> update_;
  std::vector<StrategyAttempt> log_;
};

}  // namespace

AnalysisVerdict analyze(const LassoProgram& program, const SynthesisOptions& opts) {
  return Analysis(program, opts).run();
}

}  // namespace lassocert
