#include "lassocert/certificate.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lassocert {

bool GntaCertificate::operator==(const GntaCertificate& other) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return same(x0, other.x0) && same(x1, other.x1) && same(rays, other.rays) &&
         same(lambdas, other.lambdas) && same(mus, other.mus);
}

GntaCertificate fixed_point_certificate(const ExactVector& x0, const ExactVector& point) {
  return GntaCertificate{x0, point, ExactMatrix(point.size(), 0), ExactVector(0), ExactVector(0)};
}

GntaCertificate make_certificate(ExactVector x0, ExactVector x1,
                                 const std::vector<ExactVector>& rays, ExactVector lambdas,
                                 ExactVector mus) {
  ExactMatrix y(x1.size(), static_cast<Index>(rays.size()));
  for (Index i = 0; i < y.cols(); ++i) {
    const ExactVector& r = rays[static_cast<std::size_t>(i)];
    if (r.size() != x1.size()) throw std::invalid_argument("ray dimension mismatch");
    y.col(i) = r;
  }
  return GntaCertificate{std::move(x0), std::move(x1), std::move(y), std::move(lambdas),
                         std::move(mus)};
}

ExactMatrix build_U(const ExactVector& lambdas, const ExactVector& mus) {
  const Index k = lambdas.size();
  if (mus.size() != std::max<Index>(k - 1, 0)) {
    throw std::invalid_argument("expected " + std::to_string(std::max<Index>(k - 1, 0)) +
                                " mu entries, got " + std::to_string(mus.size()));
  }
  ExactMatrix u = ExactMatrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    if (lambdas(i) < 0) throw std::invalid_argument("negative lambda");
    u(i, i) = lambdas(i);
    if (i + 1 < k) {
      if (mus(i) < 0) throw std::invalid_argument("negative mu");
      u(i, i + 1) = mus(i);
    }
  }
  return u;
}

const ConditionResult* ValidationReport::first_failure() const {
  for (const auto& c : conditions) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& c : conditions) {
    out << (c.passed ? "  ok    " : "  FAIL  ") << c.name;
    if (!c.passed) {
      if (c.row) out << " row " << *c.row;
      out << " residual " << to_string(c.residual);
      if (!c.detail.empty()) out << " (" << c.detail << ")";
    }
    out << '\n';
  }
  out << (passed ? "PASS" : "FAIL") << '\n';
  return out.str();
}

namespace {

void check_shape(const LassoProgram& program, const GntaCertificate& cert) {
  const Index n = program.dim();
  const Index k = cert.size();
  if (cert.x0.size() != n || cert.x1.size() != n || cert.rays.rows() != n) {
    throw std::invalid_argument("certificate dimension does not match program dimension " +
                                std::to_string(n));
  }
  if (cert.lambdas.size() != k || cert.mus.size() != std::max<Index>(k - 1, 0)) {
    throw std::invalid_argument("certificate has " + std::to_string(k) + " rays but " +
                                std::to_string(cert.lambdas.size()) + " lambdas and " +
                                std::to_string(cert.mus.size()) + " mus");
  }
}

ConditionResult from_violation(std::string name, const std::optional<RowViolation>& v) {
  ConditionResult c;
  c.name = std::move(name);
  if (v) {
    c.passed = false;
    c.row = v->row;
    c.residual = v->residual;
  }
  return c;
}

}  // namespace

ValidationReport validate(const LassoProgram& program, const GntaCertificate& cert) {
  check_shape(program, cert);
  const Index k = cert.size();
  ValidationReport report;

  ConditionResult domain;
  domain.name = "domain";
  for (Index i = 0; i < k && domain.passed; ++i) {
    if (cert.lambdas(i) < 0) {
      domain = ConditionResult{"domain", false, i, cert.lambdas(i),
                               "lambda_" + std::to_string(i + 1) + " is negative"};
    }
  }
  for (Index i = 0; i < cert.mus.size() && domain.passed; ++i) {
    if (cert.mus(i) < 0) {
      domain = ConditionResult{"domain", false, i, cert.mus(i),
                               "mu_" + std::to_string(i + 1) + " is negative"};
    }
  }
  report.conditions.push_back(domain);

  report.conditions.push_back(
      from_violation("initiation", first_violation(program.stem, cert.x0, cert.x1)));

  ExactVector next = cert.x1 + cert.rays.rowwise().sum();
  report.conditions.push_back(from_violation("point", first_violation(program.loop, cert.x1, next)));

  for (Index i = 0; i < k; ++i) {
    ExactVector image = cert.lambdas(i) * cert.ray(i);
    if (i > 0) image += cert.mus(i - 1) * cert.ray(i - 1);
    report.conditions.push_back(from_violation(
        "ray_" + std::to_string(i + 1), first_ray_violation(program.loop, cert.ray(i), image)));
  }

  for (const auto& c : report.conditions) report.passed = report.passed && c.passed;
  return report;
}

std::vector<ExactVector> unroll(const LassoProgram& program, const GntaCertificate& cert,
                                std::size_t steps) {
  check_shape(program, cert);
  std::vector<ExactVector> states;
  states.reserve(steps);
  if (steps == 0) return states;
  states.push_back(cert.x0);
  if (steps == 1) return states;

  const ExactMatrix u = build_U(cert.lambdas, cert.mus);
  ExactVector weights = ExactVector::Ones(cert.size());  // U^j · 1
  ExactVector state = cert.x1;
  states.push_back(state);
  while (states.size() < steps) {
    state += cert.rays * weights;
    weights = u * weights;
    states.push_back(state);
  }
  return states;
}

ExactVector closed_form_state(const GntaCertificate& cert, std::size_t t) {
  if (t == 0) throw std::invalid_argument("closed_form_state requires t >= 1");
  const Index k = cert.size();
  if (k == 0 || t == 1) return cert.x1;

  // For bidiagonal U, (U^j)_{a,b} = (μ_a ⋯ μ_{b-1}) · h_{j-(b-a)}(λ_a, …, λ_b),
  // where h_d is the complete homogeneous symmetric polynomial of degree d.
  // When λ_a = … = λ_b this is the binomial term C(j, b-a) λ^{j-(b-a)}.
  const std::size_t max_degree = t - 2;
  ExactVector coefficient_sum = ExactVector::Zero(k);  // Σ_{j=0}^{t-2} U^j · 1
  for (Index a = 0; a < k; ++a) {
    // h[d] = h_d(λ_a, …, λ_b), extended one variable at a time.
    std::vector<Rational> h(max_degree + 1, Rational(0));
    h[0] = 1;
    Rational mu_product = 1;
    for (Index b = a; b < k; ++b) {
      if (b > a) mu_product *= cert.mus(b - 1);
      // Adding variable λ_b: h'_d = Σ_e λ_b^e h_{d-e} = h_d + λ_b h'_{d-1}.
      for (std::size_t d = 1; d <= max_degree; ++d) h[d] += cert.lambdas(b) * h[d - 1];
      if (mu_product == 0) break;
      const std::size_t offset = static_cast<std::size_t>(b - a);
      for (std::size_t j = offset; j <= max_degree; ++j) {
        coefficient_sum(a) += mu_product * h[j - offset];
      }
    }
  }
  return cert.x1 + cert.rays * coefficient_sum;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

json to_json(const ExactVector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(to_string(v(i)));
  return arr;
}

Rational scalar_from_json(const json& value, const char* field) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<long long>());
  throw std::invalid_argument(std::string("field '") + field + "' must hold rationals as strings");
}

ExactVector vector_from_json(const json& doc, const char* field) {
  if (!doc.contains(field) || !doc.at(field).is_array()) {
    throw std::invalid_argument(std::string("missing array field '") + field + "'");
  }
  const json& arr = doc.at(field);
  ExactVector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Index>(i)) = scalar_from_json(arr[i], field);
  return v;
}

}  // namespace

std::string serialize(const GntaCertificate& cert, std::span<const std::string> vars) {
  json doc;
  doc["kind"] = "gnta";
  doc["vars"] = json(std::vector<std::string>(vars.begin(), vars.end()));
  doc["x0"] = to_json(cert.x0);
  doc["x1"] = to_json(cert.x1);
  json rays = json::array();
  for (Index i = 0; i < cert.size(); ++i) rays.push_back(to_json(cert.ray(i)));
  doc["rays"] = rays;
  doc["lambda"] = to_json(cert.lambdas);
  doc["mu"] = to_json(cert.mus);
  return doc.dump(2) + "\n";
}

CertificateDocument deserialize(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed certificate document: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("certificate document must be an object");
  if (doc.value("kind", std::string()) != "gnta") {
    throw std::invalid_argument("certificate document kind must be \"gnta\"");
  }

  CertificateDocument out;
  if (doc.contains("vars")) {
    for (const auto& v : doc.at("vars")) {
      if (!v.is_string()) throw std::invalid_argument("vars must be strings");
      out.vars.push_back(v.get<std::string>());
    }
  }
  GntaCertificate& c = out.certificate;
  c.x0 = vector_from_json(doc, "x0");
  c.x1 = vector_from_json(doc, "x1");
  c.lambdas = vector_from_json(doc, "lambda");
  c.mus = doc.contains("mu") ? vector_from_json(doc, "mu") : ExactVector(0);
  const Index n = c.x1.size();
  if (c.x0.size() != n) throw std::invalid_argument("x0 and x1 differ in dimension");
  if (!out.vars.empty() && static_cast<Index>(out.vars.size()) != n) {
    throw std::invalid_argument("vars and x1 differ in dimension");
  }

  if (!doc.contains("rays") || !doc.at("rays").is_array()) {
    throw std::invalid_argument("missing array field 'rays'");
  }
  const json& rays = doc.at("rays");
  c.rays = ExactMatrix(n, static_cast<Index>(rays.size()));
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (!rays[i].is_array() || static_cast<Index>(rays[i].size()) != n) {
      throw std::invalid_argument("ray " + std::to_string(i + 1) + " does not have dimension " +
                                  std::to_string(n));
    }
    for (std::size_t j = 0; j < rays[i].size(); ++j) {
      c.rays(static_cast<Index>(j), static_cast<Index>(i)) = scalar_from_json(rays[i][j], "rays");
    }
  }
  const Index k = c.size();
  if (c.lambdas.size() != k) {
    throw std::invalid_argument("lambda list has " + std::to_string(c.lambdas.size()) +
                                " entries for " + std::to_string(k) + " rays");
  }
  if (c.mus.size() != std::max<Index>(k - 1, 0)) {
    throw std::invalid_argument("mu list has " + std::to_string(c.mus.size()) + " entries for " +
                                std::to_string(k) + " rays");
  }
  return out;
}

}  // namespace lassocert
