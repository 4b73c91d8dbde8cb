#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lassocert/rational.hpp"

namespace lassocert {

enum class Sort { Real, Int };

/// What an unknown stands for in a nontermination argument. Used to check the
/// shape restriction on degree-2 monomials.
enum class UnknownRole { State, Ray, Coefficient, Other };

struct Unknown {
  std::string name;
  Sort sort = Sort::Real;
  UnknownRole role = UnknownRole::Other;
};

using UnknownId = std::size_t;

/// Sorted multiset of unknowns; empty for the constant term.
using Monomial = std::vector<UnknownId>;

/// Values for (some of) the unknowns, keyed by name.
using Model = std::map<std::string, Rational>;

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(const Rational& constant);

  static Polynomial variable(UnknownId id, const Rational& coeff = 1);

  Polynomial& add(const Rational& coeff, Monomial monomial);
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator*=(const Rational& factor);

  /// Product of two polynomials; used for λ·y and μ·y terms.
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  Rational constant() const;
  std::size_t degree() const;
  bool operator==(const Polynomial&) const = default;

 private:
  std::map<Monomial, Rational> terms_;  // no zero coefficients are stored
};

enum class Relation { Le, Lt, Eq, Ge, Gt };

/// lhs REL 0
struct Atom {
  Polynomial lhs;
  Relation rel;
};

/// A conjunction of polynomial atoms over declared unknowns.
class ConstraintFormula {
 public:
  UnknownId declare(std::string name, Sort sort = Sort::Real, UnknownRole role = UnknownRole::Other);
  void add(Polynomial lhs, Relation rel);

  const std::vector<Unknown>& unknowns() const { return unknowns_; }
  const std::vector<Atom>& conjuncts() const { return conjuncts_; }
  const Unknown& unknown(UnknownId id) const { return unknowns_.at(id); }
  std::optional<UnknownId> find(const std::string& name) const;

  std::size_t degree() const;
  bool has_int_unknowns() const;

  /// Every degree-2 monomial multiplies a Coefficient unknown with a Ray unknown.
  bool well_shaped() const;

  /// Exact evaluation. Throws std::out_of_range if a used unknown has no value.
  bool evaluate(const Model& model) const;

  /// Replaces the named unknowns by constants and drops their declarations.
  ConstraintFormula substitute(const Model& values) const;

 private:
  std::vector<Unknown> unknowns_;
  std::map<std::string, UnknownId> index_;
  std::vector<Atom> conjuncts_;
};

bool holds(Relation rel, const Rational& value);

}  // namespace lassocert
