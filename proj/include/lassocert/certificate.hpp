#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lassocert/lasso.hpp"
#include "lassocert/rational.hpp"

namespace lassocert {

/// A geometric nontermination argument (x0, x1, y1..yk, λ1..λk, μ1..μ(k-1)).
///
/// The certified execution is
///   x0, x1, x1 + Y·1, x1 + Y·1 + Y·U·1, x1 + Y·1 + Y·U·1 + Y·U²·1, ...
/// where Y holds the rays as columns and U is the upper bidiagonal matrix with
/// the λ on its diagonal and the μ on its superdiagonal.
struct GntaCertificate {
  ExactVector x0;
  ExactVector x1;
  ExactMatrix rays;  // n × k, one ray per column
  ExactVector lambdas;
  ExactVector mus;

  Index size() const { return rays.cols(); }
  Index dim() const { return x1.size(); }
  auto ray(Index i) const { return rays.col(i); }

  bool operator==(const GntaCertificate& other) const;
};

/// Size-0 certificate: x0 = x0, x1 = point, no rays.
GntaCertificate fixed_point_certificate(const ExactVector& x0, const ExactVector& point);

GntaCertificate make_certificate(ExactVector x0, ExactVector x1,
                                 const std::vector<ExactVector>& rays, ExactVector lambdas,
                                 ExactVector mus);

/// Upper bidiagonal U with the given diagonal and superdiagonal. Throws
/// std::invalid_argument when |mus| != max(|lambdas| - 1, 0) or an entry is
/// negative.
ExactMatrix build_U(const ExactVector& lambdas, const ExactVector& mus);

struct ConditionResult {
  std::string name;  // "domain", "initiation", "point", "ray_1", ...
  bool passed = true;
  std::optional<Index> row;  // violated row (or λ/μ index for "domain")
  Rational residual;         // lhs - bound of the violated row, or the negative entry
  std::string detail;
};

struct ValidationReport {
  bool passed = true;
  std::vector<ConditionResult> conditions;

  const ConditionResult* first_failure() const;
  std::string summary() const;
};

/// Checks every condition exactly. Failed conditions are reported, not thrown;
/// only dimension mismatches throw std::invalid_argument.
///
/// (point) is checked strictly on strict rows. (ray) uses only the homogeneous
/// part of each row and is never strict: adding a nonnegative combination of
/// rays to a point that satisfies a strict row keeps it strict.
ValidationReport validate(const LassoProgram& program, const GntaCertificate& cert);

/// The first `steps` states of the certified execution, starting at x0.
std::vector<ExactVector> unroll(const LassoProgram& program, const GntaCertificate& cert,
                                std::size_t steps);

/// state_t of the certified execution (state_1 = x1) computed from closed-form
/// entries of U^j rather than by iteration. Requires t >= 1.
ExactVector closed_form_state(const GntaCertificate& cert, std::size_t t);

/// JSON certificate document:
///   {"kind":"gnta","vars":[...],"x0":[...],"x1":[...],
///    "rays":[[...],...],"lambda":[...],"mu":[...]}
/// Rationals are strings ("3", "-1/2"); rays are listed one per inner array.
std::string serialize(const GntaCertificate& cert, std::span<const std::string> vars = {});

struct CertificateDocument {
  std::vector<std::string> vars;  // empty when the document omits them
  GntaCertificate certificate;
};

/// Throws std::invalid_argument on a malformed or inconsistent document.
CertificateDocument deserialize(std::string_view text);

}  // namespace lassocert
