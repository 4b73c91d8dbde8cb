#include "lassocert/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <sstream>

extern char** environ;

namespace lassocert {

const char* to_string(Logic logic) {
  switch (logic) {
    case Logic::QF_LRA: return "QF_LRA";
    case Logic::QF_LIA: return "QF_LIA";
    case Logic::QF_NRA: return "QF_NRA";
    case Logic::QF_NIA: return "QF_NIA";
  }
  return "?";
}

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Sat: return "sat";
    case SolverStatus::Unsat: return "unsat";
    case SolverStatus::Unknown: return "unknown";
    case SolverStatus::Timeout: return "timeout";
    case SolverStatus::ProcessError: return "process-error";
  }
  return "?";
}

Logic required_logic(const ConstraintFormula& f) {
  const bool nonlinear = f.degree() > 1;
  if (f.has_int_unknowns()) return nonlinear ? Logic::QF_NIA : Logic::QF_LIA;
  return nonlinear ? Logic::QF_NRA : Logic::QF_LRA;
}

SolverConfig solver_from_command(std::string_view command) {
  std::istringstream in{std::string(command)};
  SolverConfig cfg;
  std::string word;
  while (in >> word) {
    if (cfg.executable.empty()) {
      cfg.executable = word;
    } else {
      cfg.args.push_back(word);
    }
  }
  if (cfg.executable.empty()) throw std::invalid_argument("empty solver command");
  return cfg;
}

namespace {

std::optional<std::string> find_on_path(const std::string& name) {
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::istringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) continue;
    std::string candidate = dir + "/" + name;
    if (::access(candidate.c_str(), X_OK) == 0) return candidate;
  }
  return std::nullopt;
}

}  // namespace

std::optional<SolverConfig> default_solver() {
  if (const char* env = std::getenv("LASSOCERT_SMT"); env && *env) {
    return solver_from_command(env);
  }
  if (auto z3 = find_on_path("z3")) return solver_from_command(*z3 + " -in");
  if (auto cvc5 = find_on_path("cvc5")) return solver_from_command(*cvc5 + " --lang smt2");
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Emission

namespace {

std::string literal(const Rational& value) {
  const Rational mag = abs(value);
  std::string body = denominator(mag) == 1
                         ? numerator(mag).str()
                         : "(/ " + numerator(mag).str() + " " + denominator(mag).str() + ")";
  return value < 0 ? "(- " + body + ")" : body;
}

const char* relation_symbol(Relation rel) {
  switch (rel) {
    case Relation::Le: return "<=";
    case Relation::Lt: return "<";
    case Relation::Eq: return "=";
    case Relation::Ge: return ">=";
    case Relation::Gt: return ">";
  }
  return "?";
}

std::string emit_atom(const ConstraintFormula& f, const Atom& atom, bool integral) {
  Polynomial lhs = atom.lhs;
  if (integral) {
    std::vector<Rational> coeffs;
    for (const auto& [m, c] : lhs.terms()) coeffs.push_back(c);
    lhs *= Rational(denominator_lcm(coeffs));
  }
  std::vector<std::string> terms;
  for (const auto& [m, c] : lhs.terms()) {
    if (m.empty()) continue;
    std::string product;
    for (UnknownId id : m) product += (product.empty() ? "" : " ") + f.unknown(id).name;
    if (c == 1) {
      terms.push_back(m.size() == 1 ? product : "(* " + product + ")");
    } else {
      terms.push_back("(* " + literal(c) + " " + product + ")");
    }
  }
  std::string sum;
  if (terms.empty()) {
    sum = "0";
  } else if (terms.size() == 1) {
    sum = terms.front();
  } else {
    sum = "(+";
    for (const auto& t : terms) sum += " " + t;
    sum += ")";
  }
  return std::string("(assert (") + relation_symbol(atom.rel) + " " + sum + " " +
         literal(-lhs.constant()) + "))";
}

}  // namespace

std::string emit_script(const ConstraintFormula& f, const SolverConfig& cfg) {
  const Logic logic = cfg.logic.value_or(required_logic(f));
  const bool integral = logic == Logic::QF_LIA || logic == Logic::QF_NIA;
  const bool nonlinear_ok = logic == Logic::QF_NRA || logic == Logic::QF_NIA;
  if (f.degree() > 1 && !nonlinear_ok) {
    throw std::invalid_argument(std::string("nonlinear formula cannot be stated in ") + to_string(logic));
  }
  for (const Unknown& u : f.unknowns()) {
    if ((u.sort == Sort::Int) != integral) {
      throw std::invalid_argument("unknown '" + u.name + "' has the wrong sort for " +
                                  to_string(logic));
    }
  }

  std::ostringstream out;
  out << "(set-option :produce-models true)\n";
  if (cfg.seed) out << "(set-option :random-seed " << *cfg.seed << ")\n";
  out << "(set-logic " << to_string(logic) << ")\n";
  for (const Unknown& u : f.unknowns()) {
    out << "(declare-const " << u.name << (u.sort == Sort::Int ? " Int" : " Real") << ")\n";
  }
  for (const Atom& a : f.conjuncts()) out << emit_atom(f, a, integral) << "\n";
  out << "(check-sat)\n";
  if (!f.unknowns().empty()) {
    out << "(get-value (";
    for (std::size_t i = 0; i < f.unknowns().size(); ++i) {
      out << (i ? " " : "") << f.unknowns()[i].name;
    }
    out << "))\n";
  }
  out << "(exit)\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// S-expressions

namespace {

struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> items;

  std::string str() const {
    if (is_atom) return atom;
    std::string s = "(";
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? " " : "") + items[i].str();
    return s + ")";
  }
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  // Returns nothing at end of input; throws NumeralError on unbalanced input.
  std::optional<SExpr> next() {
    skip();
    if (pos_ >= text_.size()) return std::nullopt;
    return read();
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) throw NumeralError("unexpected end of s-expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      SExpr list;
      list.is_atom = false;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw NumeralError("unbalanced parenthesis");
        if (text_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (c == ')') throw NumeralError("unexpected ')'");
    if (c == '"') {
      std::size_t end = pos_ + 1;
      while (end < text_.size()) {
        if (text_[end] == '"') {
          if (end + 1 < text_.size() && text_[end + 1] == '"') {
            end += 2;
            continue;
          }
          break;
        }
        ++end;
      }
      SExpr s;
      s.atom = std::string(text_.substr(pos_, end + 1 - pos_));
      pos_ = std::min(end + 1, text_.size());
      return s;
    }
    if (c == '|') {
      std::size_t end = text_.find('|', pos_ + 1);
      if (end == std::string_view::npos) throw NumeralError("unterminated quoted symbol");
      SExpr s;
      s.atom = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return s;
    }
    std::size_t end = pos_;
    while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end])) &&
           text_[end] != '(' && text_[end] != ')') {
      ++end;
    }
    SExpr s;
    s.atom = std::string(text_.substr(pos_, end - pos_));
    pos_ = end;
    return s;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Rational evaluate_numeral(const SExpr& e) {
  if (e.is_atom) {
    if (e.atom.empty() || e.atom.front() == '-' || e.atom.front() == '+') {
      throw NumeralError("malformed numeral '" + e.atom + "'");
    }
    try {
      return parse_rational(e.atom);
    } catch (const std::invalid_argument&) {
      throw NumeralError("malformed numeral '" + e.atom + "'");
    }
  }
  if (e.items.empty() || !e.items.front().is_atom) throw NumeralError("malformed numeral " + e.str());
  const std::string& op = e.items.front().atom;
  const std::size_t argc = e.items.size() - 1;
  if (op == "-" && argc == 1) return -evaluate_numeral(e.items[1]);
  if (op == "-" && argc == 2) return evaluate_numeral(e.items[1]) - evaluate_numeral(e.items[2]);
  if (op == "/" && argc == 2) {
    Rational den = evaluate_numeral(e.items[2]);
    if (den == 0) throw NumeralError("division by zero in " + e.str());
    return evaluate_numeral(e.items[1]) / den;
  }
  throw NumeralError("malformed numeral " + e.str());
}

}  // namespace

Rational parse_value(std::string_view sexpr) {
  SExprReader reader(sexpr);
  auto e = reader.next();
  if (!e) throw NumeralError("empty numeral");
  if (reader.next()) throw NumeralError("trailing input after numeral");
  return evaluate_numeral(*e);
}

// ---------------------------------------------------------------------------
// Subprocess

namespace {

struct ProcessResult {
  bool started = false;
  bool timed_out = false;
  int exit_status = -1;
  std::string out;
  std::string err;
  std::string spawn_error;
};

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

ProcessResult run_process(const SolverConfig& cfg, const std::string& input) {
  ignore_sigpipe();
  ProcessResult result;
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    result.spawn_error = std::strerror(errno);
    return result;
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0) {
    result.spawn_error = std::strerror(errno);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    return result;
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_pipe[1], STDERR_FILENO);

  std::vector<std::string> argv_storage{cfg.executable};
  argv_storage.insert(argv_storage.end(), cfg.args.begin(), cfg.args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, cfg.executable.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  if (rc != 0) {
    result.spawn_error = "cannot start '" + cfg.executable + "': " + std::strerror(rc);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);
    return result;
  }
  result.started = true;

  int in_fd = in_pipe[1];
  ::fcntl(in_fd, F_SETFL, O_NONBLOCK);
  std::size_t written = 0;
  int out_fd = out_pipe[0], err_fd = err_pipe[0];
  const auto deadline = std::chrono::steady_clock::now() + cfg.timeout;

  char buffer[4096];
  while (out_fd >= 0 || err_fd >= 0) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      break;
    }
    std::vector<pollfd> fds;
    if (in_fd >= 0) fds.push_back({in_fd, POLLOUT, 0});
    if (out_fd >= 0) fds.push_back({out_fd, POLLIN, 0});
    if (err_fd >= 0) fds.push_back({err_fd, POLLIN, 0});
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    const int ready = ::poll(fds.data(), fds.size(), static_cast<int>(remaining.count()) + 1);
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (const pollfd& p : fds) {
      if (p.revents == 0) continue;
      if (p.fd == in_fd) {
        const ssize_t n = ::write(in_fd, input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 && errno != EAGAIN) written = input.size();
        if (written >= input.size()) {
          ::close(in_fd);
          in_fd = -1;
        }
      } else {
        const ssize_t n = ::read(p.fd, buffer, sizeof buffer);
        if (n > 0) {
          (p.fd == out_fd ? result.out : result.err).append(buffer, static_cast<std::size_t>(n));
        } else if (n == 0 || errno != EAGAIN) {
          ::close(p.fd);
          (p.fd == out_fd ? out_fd : err_fd) = -1;
        }
      }
    }
  }

  if (in_fd >= 0) ::close(in_fd);
  if (out_fd >= 0) ::close(out_fd);
  if (err_fd >= 0) ::close(err_fd);
  if (result.timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  result.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

bool mentions_algebraic(const SExpr& e) {
  if (e.is_atom) return e.atom == "root-obj" || e.atom == "root-of-with-interval";
  for (const auto& item : e.items) {
    if (mentions_algebraic(item)) return true;
  }
  return false;
}

}  // namespace

SolverOutcome solve(const ConstraintFormula& f, const SolverConfig& cfg) {
  SolverOutcome outcome;
  const std::string script = emit_script(f, cfg);
  outcome.transcript = "; script\n" + script;

  const auto start = std::chrono::steady_clock::now();
  ProcessResult proc = run_process(cfg, script);
  outcome.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  outcome.transcript += "; stdout\n" + proc.out;
  if (!proc.err.empty()) outcome.transcript += "; stderr\n" + proc.err;

  auto error = [&](const std::string& why) {
    outcome.status = SolverStatus::ProcessError;
    outcome.model.reset();
    outcome.transcript += "; error: " + why + "\n";
    return outcome;
  };

  if (!proc.started) return error(proc.spawn_error);
  if (proc.timed_out) {
    outcome.status = SolverStatus::Timeout;
    return outcome;
  }

  try {
    SExprReader reader(proc.out);
    auto head = reader.next();
    if (!head) return error("solver produced no answer (exit status " + std::to_string(proc.exit_status) + ")");
    if (!head->is_atom) return error("unexpected reply " + head->str());
    if (head->atom == "unsat") {
      outcome.status = SolverStatus::Unsat;
      return outcome;
    }
    if (head->atom == "unknown" || head->atom == "timeout") {
      outcome.status = SolverStatus::Unknown;
      return outcome;
    }
    if (head->atom != "sat") return error("unexpected reply '" + head->atom + "'");

    Model model;
    if (!f.unknowns().empty()) {
      auto values = reader.next();
      if (!values || values->is_atom) return error("missing get-value reply");
      for (const SExpr& pair : values->items) {
        if (pair.is_atom || pair.items.size() != 2 || !pair.items[0].is_atom) {
          return error("malformed get-value entry " + pair.str());
        }
        if (mentions_algebraic(pair.items[1])) {
          outcome.status = SolverStatus::Unknown;
          outcome.transcript += "; model contains an irrational value for " + pair.items[0].atom + "\n";
          return outcome;
        }
        model[pair.items[0].atom] = evaluate_numeral(pair.items[1]);
      }
    }
    bool satisfied = false;
    try {
      satisfied = f.evaluate(model);
    } catch (const std::out_of_range& e) {
      return error(e.what());
    }
    if (!satisfied) return error("model does not satisfy the formula");
    outcome.status = SolverStatus::Sat;
    outcome.model = std::move(model);
    return outcome;
  } catch (const NumeralError& e) {
    return error(e.what());
  }
}

}  // namespace lassocert
