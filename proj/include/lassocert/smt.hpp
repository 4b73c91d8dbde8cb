#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lassocert/formula.hpp"
#include "lassocert/rational.hpp"

namespace lassocert {

enum class Logic { QF_LRA, QF_LIA, QF_NRA, QF_NIA };

const char* to_string(Logic logic);

/// Cheapest logic able to express `f`.
Logic required_logic(const ConstraintFormula& f);

struct SolverConfig {
  std::string executable;
  std::vector<std::string> args;
  std::chrono::milliseconds timeout{12000};
  std::optional<Logic> logic;  // chosen from the formula when unset
  std::optional<unsigned> seed;
};

/// Splits "path arg1 arg2" on whitespace.
SolverConfig solver_from_command(std::string_view command);

/// LASSOCERT_SMT if set, otherwise `z3 -in` or `cvc5 --lang smt2` found on PATH.
std::optional<SolverConfig> default_solver();

/// SMT-LIB 2 script: set-logic, declare-const per unknown, one assert per
/// conjunct, check-sat, get-value over all unknowns. Negative literals are
/// written (- x) and fractions (/ p q). In integer logics each conjunct is
/// first scaled by the lcm of its denominators. Throws std::invalid_argument
/// when the formula does not fit the configured logic.
std::string emit_script(const ConstraintFormula& f, const SolverConfig& cfg);

enum class SolverStatus { Sat, Unsat, Unknown, Timeout, ProcessError };

const char* to_string(SolverStatus status);

struct SolverOutcome {
  SolverStatus status = SolverStatus::ProcessError;
  std::optional<Model> model;  // present iff status == Sat
  std::string transcript;      // script, solver output, diagnostics
  std::chrono::milliseconds elapsed{0};
};

/// Runs the solver as a subprocess over stdin/stdout. The process is killed
/// once the timeout expires. A sat answer whose model does not satisfy `f`
/// exactly is reported as ProcessError; a model containing irrational
/// algebraic numbers is reported as Unknown.
SolverOutcome solve(const ConstraintFormula& f, const SolverConfig& cfg);

class NumeralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact value of a solver numeral: 3, 7.5, (- e), (/ e e), nested.
/// Throws NumeralError otherwise.
Rational parse_value(std::string_view sexpr);

}  // namespace lassocert
