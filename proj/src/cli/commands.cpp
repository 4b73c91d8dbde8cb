#include "lassocert/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "lassocert/certificate.hpp"
#include "lassocert/cli/io.hpp"
#include "lassocert/lasso.hpp"
#include "lassocert/synthesis.hpp"

namespace lassocert::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LassoProgram load_program(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  try {
    return parse_lasso(text);
  } catch (const ParseError& e) {
    throw UsageError(path.string() + ":" + e.what());
  }
}

GntaCertificate load_certificate(const fs::path& path, const LassoProgram& program) {
  CertificateDocument doc;
  try {
    doc = deserialize(read_file(path));
  } catch (const std::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  if (!doc.vars.empty() && doc.vars != program.vars) {
    throw UsageError(path.string() + ": certificate variables do not match the program");
  }
  if (doc.certificate.dim() != program.dim()) {
    throw UsageError(path.string() + ": certificate dimension does not match the program");
  }
  return doc.certificate;
}

SynthesisOptions synthesis_options(const Options& opts, AnalysisMode mode) {
  SynthesisOptions s;
  s.max_size = opts.max_size;
  s.strategies = strategies_for(mode);
  s.integer_mode = opts.integer_mode;
  s.timeout = std::chrono::milliseconds(opts.timeout_ms);
  if (!opts.solver.empty()) {
    s.solver = solver_from_command(opts.solver);
  } else {
    s.solver = default_solver();
  }
  return s;
}

AnalysisMode mode_from(const std::string& name) {
  auto mode = parse_mode(name);
  if (!mode) throw UsageError("unknown mode '" + name + "' (expected auto, fixedpoint or gnta)");
  return *mode;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SolverUnavailable& e) {
    err << "error: " << e.what() << '\n';
    return kInfrastructureError;
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kInfrastructureError;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return kInfrastructureError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInfrastructureError;
  }
}

void print_certificate(std::ostream& out, const GntaCertificate& c) {
  out << "  size: " << c.size() << '\n';
  out << "  x0: " << to_string(c.x0) << '\n';
  out << "  x1: " << to_string(c.x1) << '\n';
  for (Index j = 0; j < c.size(); ++j) {
    out << "  y" << j + 1 << ": " << to_string(ExactVector(c.ray(j))) << "  lambda" << j + 1 << " = "
        << to_string(c.lambdas(j));
    if (j + 1 < c.size()) out << "  mu" << j + 1 << " = " << to_string(c.mus(j));
    out << '\n';
  }
}

}  // namespace

int cmd_analyze(const fs::path& path, const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const AnalysisMode mode = mode_from(opts.mode);
    const LassoProgram program = load_program(path);
    const AnalysisVerdict verdict = analyze(program, synthesis_options(opts, mode));

    out << "verdict: " << verdict.name() << '\n';
    if (verdict.strategy) out << "strategy: " << to_string(*verdict.strategy) << '\n';
    for (const auto& a : verdict.log) {
      out << "  attempt " << to_string(a.strategy) << " k=" << a.k << ": "
          << (a.status ? to_string(*a.status) : "-");
      if (!a.detail.empty()) out << " (" << a.detail << ")";
      out << " " << a.solver_time.count() << " ms\n";
    }

    if (const auto* nt = std::get_if<NonterminatingVerdict>(&verdict.result)) {
      print_certificate(out, nt->certificate);
      fs::path target = opts.out.empty() ? fs::path(path.string() + ".cert.json") : fs::path(opts.out);
      write_file(target, serialize(nt->certificate, program.vars));
      out << "certificate: " << target.string() << '\n';
    } else if (const auto* t = std::get_if<TerminatingVerdict>(&verdict.result)) {
      out << "  nested ranking function of depth " << t->witness.nilpotence_index << " on guard row "
          << t->witness.guard_row << ", delta = " << to_string(t->witness.delta) << '\n';
      fs::path target = opts.out.empty() ? fs::path(path.string() + ".witness.json") : fs::path(opts.out);
      write_file(target, serialize_witness(t->witness, program.vars));
      out << "witness: " << target.string() << '\n';
    } else {
      out << "reason: " << std::get<UnknownVerdict>(verdict.result).reason << '\n';
    }
    return kCompleted;
  });
}

int cmd_validate(const fs::path& program_path, const fs::path& cert_path, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const LassoProgram program = load_program(program_path);
    const GntaCertificate cert = load_certificate(cert_path, program);
    const ValidationReport report = validate(program, cert);
    out << report.summary();
    return report.passed ? kCompleted : kCheckFailed;
  });
}

int cmd_simulate(const fs::path& program_path, const fs::path& cert_path, std::size_t steps,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LassoProgram program = load_program(program_path);
    const GntaCertificate cert = load_certificate(cert_path, program);
    const auto states = unroll(program, cert, steps);
    for (std::size_t t = 0; t < states.size(); ++t) out << t << ": " << to_string(states[t]) << '\n';
    for (std::size_t t = 0; t + 1 < states.size(); ++t) {
      const Transition& rel = t == 0 ? program.stem : program.loop;
      if (auto v = first_violation(rel, states[t], states[t + 1])) {
        err << "violation: step " << t << " -> " << t + 1 << " breaks " << (t == 0 ? "stem" : "loop")
            << " row " << v->row << " (residual " << to_string(v->residual) << ")\n";
        return kCheckFailed;
      }
    }
    return kCompleted;
  });
}

// ---------------------------------------------------------------------------
// Bench

std::string to_csv(const BenchRecord& r) {
  std::ostringstream row;
  row << r.program << ',' << r.mode << ',' << r.verdict << ',' << (r.k ? std::to_string(*r.k) : "") << ','
      << r.strategy << ',' << r.wall_ms << ',' << r.solver_ms;
  return row.str();
}

namespace {

BenchRecord bench_one(const fs::path& file, const std::string& label, AnalysisMode mode,
                      const Options& opts) {
  BenchRecord r;
  r.program = file.filename().string();
  r.mode = label;
  const auto start = std::chrono::steady_clock::now();
  try {
    const LassoProgram program = parse_lasso(read_file(file));
    const AnalysisVerdict v = analyze(program, synthesis_options(opts, mode));
    r.verdict = v.name();
    if (v.strategy) r.strategy = to_string(*v.strategy);
    if (const auto* nt = std::get_if<NonterminatingVerdict>(&v.result)) r.k = nt->certificate.size();
    r.solver_ms = static_cast<long>(v.solver_time().count());
  } catch (const std::exception& e) {
    r.verdict = "error";
    r.message = e.what();
  }
  r.wall_ms = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                    std::chrono::steady_clock::now() - start)
                                    .count());
  return r;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

std::vector<BenchRecord> run_bench(const fs::path& dir, const Options& opts) {
  if (!fs::is_directory(dir)) throw UsageError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".lasso") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  const AnalysisMode second = opts.mode == "fixedpoint" ? AnalysisMode::Gnta : mode_from(opts.mode);
  const std::vector<std::pair<std::string, AnalysisMode>> modes{
      {"fixedpoint", AnalysisMode::FixedPoint}, {to_string(second), second}};

  if (!files.empty() && opts.solver.empty() && !default_solver()) {
    throw SolverUnavailable("no SMT solver configured (set LASSOCERT_SMT or --solver)");
  }

  const std::size_t tasks = files.size() * modes.size();
  std::vector<BenchRecord> records(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      const auto& [label, mode] = modes[i % modes.size()];
      records[i] = bench_one(files[i / modes.size()], label, mode, opts);
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opts.jobs, static_cast<unsigned>(std::max<std::size_t>(tasks, 1))));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return records;
}

int cmd_bench(const fs::path& dir, const Options& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto records = run_bench(dir, opts);

    const fs::path csv_path = opts.out.empty() ? fs::path("bench.csv") : fs::path(opts.out);
    std::ostringstream csv;
    csv << kBenchCsvHeader << '\n';
    for (const auto& r : records) csv << to_csv(r) << '\n';
    write_file(csv_path, csv.str());

    struct Totals {
      int rows = 0, nonterminating = 0, terminating = 0, unknown = 0, errors = 0;
      long solver_ms = 0;
    };
    std::map<std::string, Totals> totals;
    std::vector<std::string> modes;
    for (const auto& r : records) {
      if (!totals.count(r.mode)) modes.push_back(r.mode);
      Totals& t = totals[r.mode];
      ++t.rows;
      if (r.verdict == "nonterminating") ++t.nonterminating;
      else if (r.verdict == "terminating") ++t.terminating;
      else if (r.verdict == "unknown") ++t.unknown;
      else ++t.errors;
      t.solver_ms += r.solver_ms;
    }

    out << std::left << std::setw(12) << "mode" << std::setw(8) << "rows" << std::setw(8) << "solved"
        << std::setw(8) << "nonterm" << std::setw(8) << "term" << std::setw(9) << "unknown" << std::setw(8)
        << "errors" << "solver_ms\n";
    for (const auto& m : modes) {
      const Totals& t = totals[m];
      out << std::left << std::setw(12) << m << std::setw(8) << t.rows << std::setw(8)
          << t.nonterminating + t.terminating << std::setw(8) << t.nonterminating << std::setw(8)
          << t.terminating << std::setw(9) << t.unknown << std::setw(8) << t.errors << t.solver_ms << '\n';
    }

    if (modes.size() == 2) {
      std::set<std::string> baseline;
      for (const auto& r : records)
        if (r.mode == modes[0] && r.verdict == "nonterminating") baseline.insert(r.program);
      std::string only;
      for (const auto& r : records) {
        if (r.mode == modes[1] && r.verdict == "nonterminating" && !baseline.count(r.program)) {
          only += (only.empty() ? "" : ", ") + r.program;
        }
      }
      out << "nonterminating only in " << modes[1] << ": " << (only.empty() ? "-" : only) << '\n';
    }

    int mismatches = 0;
    for (const auto& r : records) {
      if (r.verdict == "error") err << r.program << " [" << r.mode << "]: " << r.message << '\n';
      if (r.mode == "fixedpoint") continue;
      fs::path expected = dir / fs::path(r.program).replace_extension(".expected");
      if (!fs::exists(expected)) continue;
      const std::string want = trim(read_file(expected));
      if (want != r.verdict) {
        ++mismatches;
        out << "MISMATCH " << r.program << ": expected " << want << ", got " << r.verdict << '\n';
      }
    }
    out << "report: " << csv_path.string() << '\n';
    return mismatches == 0 ? kCompleted : kCheckFailed;
  });
}

}  // namespace lassocert::cli
