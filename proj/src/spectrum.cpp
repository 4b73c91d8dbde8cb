#include "lassocert/spectrum.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace lassocert {

Rational CharPoly::operator()(const Rational& x) const {
  Rational acc = 0;
  for (Index i = coefficients.size() - 1; i >= 0; --i) acc = acc * x + coefficients(i);
  return acc;
}

CharPoly char_poly(const ExactMatrix& m) { return CharPoly{char_poly_coefficients(m)}; }

std::size_t SpectrumReport::root_count() const {
  std::size_t total = 0;
  for (const auto& [r, mult] : rational_roots) total += mult;
  return total;
}

std::vector<Rational> SpectrumReport::roots_with_multiplicity() const {
  std::vector<Rational> out;
  for (const auto& [r, mult] : rational_roots) out.insert(out.end(), mult, r);
  return out;
}

namespace {

std::vector<Integer> positive_divisors(Integer value) {
  value = abs(value);
  std::vector<Integer> small, large;
  for (Integer d = 1; d * d <= value; ++d) {
    if (value % d == 0) {
      small.push_back(d);
      if (d * d != value) large.push_back(value / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

Rational evaluate(const std::vector<Rational>& coeffs, const Rational& x) {
  Rational acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Divides by (x - root); the remainder is known to be zero.
std::vector<Rational> deflate(const std::vector<Rational>& coeffs, const Rational& root) {
  const std::size_t n = coeffs.size() - 1;
  std::vector<Rational> quotient(n);
  Rational carry = 0;
  for (std::size_t i = n; i-- > 0;) {
    carry = coeffs[i + 1] + carry * root;
    quotient[i] = carry;
  }
  return quotient;
}

}  // namespace

SpectrumReport rational_spectrum(const CharPoly& p) {
  const Index n = p.degree();
  std::vector<Rational> coeffs(p.coefficients.begin(), p.coefficients.end());
  const Integer scale = denominator_lcm(coeffs);
  for (auto& c : coeffs) c *= scale;

  std::map<Rational, std::size_t, std::greater<>> found;
  while (coeffs.size() > 1 && coeffs.front() == 0) {
    coeffs.erase(coeffs.begin());
    ++found[Rational(0)];
  }

  if (coeffs.size() > 1) {
    std::set<Rational> candidates;
    for (const Integer& num : positive_divisors(numerator(coeffs.front()))) {
      for (const Integer& den : positive_divisors(numerator(coeffs.back()))) {
        candidates.insert(Rational(num, den));
        candidates.insert(Rational(-num, den));
      }
    }
    for (const Rational& r : candidates) {
      while (coeffs.size() > 1 && evaluate(coeffs, r) == 0) {
        coeffs = deflate(coeffs, r);
        ++found[r];
      }
    }
  }

  SpectrumReport report;
  report.rational_roots.assign(found.begin(), found.end());
  report.all_roots_rational = static_cast<Index>(report.root_count()) == n;
  report.all_nonnegative =
      std::all_of(found.begin(), found.end(), [](const auto& e) { return e.first >= 0; });
  return report;
}

std::optional<Index> nilpotent_part(const ExactMatrix& m) {
  const Index n = m.rows();
  const ExactMatrix nil = m - ExactMatrix::Identity(n, n);
  ExactMatrix power = nil;
  for (Index i = 1; i <= n; ++i) {
    if (is_zero(power)) return i;
    power = power * nil;
  }
  return std::nullopt;
}

std::optional<NestedRankingWitness> nested_ranking_check(const DeterministicUpdate& d) {
  const auto k = nilpotent_part(d.update_M);
  if (!k) return std::nullopt;
  const Index n = d.dim();
  const ExactMatrix nil = d.update_M - ExactMatrix::Identity(n, n);
  const ExactVector drift = d.guard_G * (matrix_power(nil, static_cast<unsigned>(*k - 1)) * d.update_m);

  // Rows are scanned in order, so the smallest index achieving a positive entry wins.
  Index row = -1;
  for (Index r = 0; r < drift.size(); ++r) {
    if (drift(r) > 0) {
      row = r;
      break;
    }
  }
  if (row < 0) return std::nullopt;

  NestedRankingWitness w;
  w.guard_row = row;
  w.guard_bound = d.guard_g(row);
  w.nilpotence_index = *k;
  w.delta = drift(row);
  const ExactVector h = d.guard_G.row(row).transpose();
  for (Index j = 1; j <= *k; ++j) {
    const ExactMatrix power = matrix_power(nil, static_cast<unsigned>(*k - j));
    const ExactVector hn = power.transpose() * h;  // (h^T N^(k-j))^T
    AffineFunction f{-hn, Rational(0)};
    w.functions.push_back(std::move(f));
  }
  w.functions.back().constant = w.guard_bound + 1;
  for (Index j = 2; j <= *k; ++j) {
    const ExactMatrix power = matrix_power(nil, static_cast<unsigned>(*k - j));
    const Rational hnm = h.dot(power * d.update_m);
    w.functions[static_cast<std::size_t>(j - 2)].constant = 1 - hnm;
  }
  return w;
}

WitnessCheck validate_witness(const DeterministicUpdate& d, const NestedRankingWitness& w) {
  auto fail = [](std::string what) { return WitnessCheck{false, std::move(what)}; };
  const Index n = d.dim();
  const Index k = w.nilpotence_index;

  if (w.guard_row < 0 || w.guard_row >= d.guard_G.rows()) return fail("guard row in range");
  if (w.guard_bound != d.guard_g(w.guard_row)) return fail("h0 = g[row]");
  if (k < 1 || static_cast<Index>(w.functions.size()) != k) return fail("k functions f_1..f_k");
  for (const auto& f : w.functions) {
    if (f.coeffs.size() != n) return fail("function dimension");
  }

  const ExactMatrix nil = d.update_M - ExactMatrix::Identity(n, n);
  if (!is_zero(matrix_power(nil, static_cast<unsigned>(k)))) return fail("N^k = 0");

  const ExactVector h = d.guard_G.row(w.guard_row).transpose();
  const Rational delta = h.dot(matrix_power(nil, static_cast<unsigned>(k - 1)) * d.update_m);
  if (w.delta != delta) return fail("delta = h N^(k-1) m");
  if (!(w.delta > 0)) return fail("delta > 0");

  for (Index j = 1; j <= k; ++j) {
    const ExactVector expected =
        -(matrix_power(nil, static_cast<unsigned>(k - j)).transpose() * h);
    if (w.functions[static_cast<std::size_t>(j - 1)].coeffs != expected) {
      return fail("f_" + std::to_string(j) + " coefficients = -h N^(k-" + std::to_string(j) + ")");
    }
  }

  // f(Mx + m) = (M^T a)·x + a·m + c, so f(x') - f(x) has linear part N^T a.
  const AffineFunction& f1 = w.functions.front();
  if (!is_zero(nil.transpose() * f1.coeffs) || f1.coeffs.dot(d.update_m) != -w.delta) {
    return fail("f_1(x') = f_1(x) - delta");
  }
  for (Index j = 2; j <= k; ++j) {
    const AffineFunction& fj = w.functions[static_cast<std::size_t>(j - 1)];
    const AffineFunction& prev = w.functions[static_cast<std::size_t>(j - 2)];
    // f_j(x') - f_j(x) - f_{j-1}(x) = (N^T a_j - a_{j-1})·x + a_j·m - c_{j-1}
    if (nil.transpose() * fj.coeffs != prev.coeffs || !(fj.coeffs.dot(d.update_m) - prev.constant < 0)) {
      return fail("f_" + std::to_string(j) + "(x') < f_" + std::to_string(j) + "(x) + f_" +
                  std::to_string(j - 1) + "(x)");
    }
  }

  // f_k = -h·x + c_k >= c_k - h0 on the guard row.
  const AffineFunction& fk = w.functions.back();
  if (fk.coeffs != -h || !(fk.constant - w.guard_bound > 0)) return fail("f_k > 0 on guard (c_k > h0)");
  return WitnessCheck{};
}

}  // namespace lassocert
