#include "lassocert/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace lassocert {

Polynomial::Polynomial(const Rational& constant) {
  if (constant != 0) terms_[{}] = constant;
}

Polynomial Polynomial::variable(UnknownId id, const Rational& coeff) {
  Polynomial p;
  p.add(coeff, {id});
  return p;
}

Polynomial& Polynomial::add(const Rational& coeff, Monomial monomial) {
  if (coeff == 0) return *this;
  std::sort(monomial.begin(), monomial.end());
  auto [it, inserted] = terms_.try_emplace(std::move(monomial), coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
  return *this;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add(c, m);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& factor) {
  if (factor == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, c] : terms_) c *= factor;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      out.add(ca * cb, std::move(m));
    }
  }
  return out;
}

Rational Polynomial::constant() const {
  auto it = terms_.find({});
  return it == terms_.end() ? Rational(0) : it->second;
}

std::size_t Polynomial::degree() const {
  std::size_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.size());
  return d;
}

bool holds(Relation rel, const Rational& value) {
  switch (rel) {
    case Relation::Le: return value <= 0;
    case Relation::Lt: return value < 0;
    case Relation::Eq: return value == 0;
    case Relation::Ge: return value >= 0;
    case Relation::Gt: return value > 0;
  }
  return false;
}

UnknownId ConstraintFormula::declare(std::string name, Sort sort, UnknownRole role) {
  if (index_.count(name)) throw std::invalid_argument("unknown '" + name + "' declared twice");
  const UnknownId id = unknowns_.size();
  index_.emplace(name, id);
  unknowns_.push_back(Unknown{std::move(name), sort, role});
  return id;
}

void ConstraintFormula::add(Polynomial lhs, Relation rel) {
  conjuncts_.push_back(Atom{std::move(lhs), rel});
}

std::optional<UnknownId> ConstraintFormula::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ConstraintFormula::degree() const {
  std::size_t d = 0;
  for (const auto& a : conjuncts_) d = std::max(d, a.lhs.degree());
  return d;
}

bool ConstraintFormula::has_int_unknowns() const {
  return std::any_of(unknowns_.begin(), unknowns_.end(),
                     [](const Unknown& u) { return u.sort == Sort::Int; });
}

bool ConstraintFormula::well_shaped() const {
  for (const auto& a : conjuncts_) {
    for (const auto& [m, c] : a.lhs.terms()) {
      if (m.size() > 2) return false;
      if (m.size() == 2) {
        const UnknownRole r0 = unknowns_[m[0]].role, r1 = unknowns_[m[1]].role;
        const bool ok = (r0 == UnknownRole::Coefficient && r1 == UnknownRole::Ray) ||
                        (r1 == UnknownRole::Coefficient && r0 == UnknownRole::Ray);
        if (!ok) return false;
      }
    }
  }
  return true;
}

bool ConstraintFormula::evaluate(const Model& model) const {
  std::vector<Rational> values(unknowns_.size());
  std::vector<bool> known(unknowns_.size(), false);
  for (UnknownId id = 0; id < unknowns_.size(); ++id) {
    auto it = model.find(unknowns_[id].name);
    if (it != model.end()) {
      values[id] = it->second;
      known[id] = true;
    }
  }
  for (const auto& a : conjuncts_) {
    Rational sum = 0;
    for (const auto& [m, c] : a.lhs.terms()) {
      Rational term = c;
      for (UnknownId id : m) {
        if (!known[id]) throw std::out_of_range("no value for unknown '" + unknowns_[id].name + "'");
        term *= values[id];
      }
      sum += term;
    }
    if (!holds(a.rel, sum)) return false;
  }
  return true;
}

ConstraintFormula ConstraintFormula::substitute(const Model& values) const {
  ConstraintFormula out;
  std::vector<std::optional<UnknownId>> remap(unknowns_.size());
  for (UnknownId id = 0; id < unknowns_.size(); ++id) {
    if (!values.count(unknowns_[id].name)) {
      const Unknown& u = unknowns_[id];
      remap[id] = out.declare(u.name, u.sort, u.role);
    }
  }
  for (const auto& a : conjuncts_) {
    Polynomial p;
    for (const auto& [m, c] : a.lhs.terms()) {
      Rational coeff = c;
      Monomial rest;
      for (UnknownId id : m) {
        if (remap[id]) {
          rest.push_back(*remap[id]);
        } else {
          coeff *= values.at(unknowns_[id].name);
        }
      }
      p.add(coeff, std::move(rest));
    }
    // Ground atoms that hold carry no information; false ones are kept.
    if (p.degree() == 0 && holds(a.rel, p.constant())) continue;
    out.add(std::move(p), a.rel);
  }
  return out;
}

}  // namespace lassocert
