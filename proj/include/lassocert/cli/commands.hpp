#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lassocert::cli {

enum ExitCode : int {
  kCompleted = 0,
  kCheckFailed = 1,
  kUsageError = 2,
  kInfrastructureError = 3,
};

struct Options {
  std::string mode = "auto";
  std::optional<std::size_t> max_size;
  bool integer_mode = false;
  long timeout_ms = 12000;
  std::string solver;  // "<path args>"; LASSOCERT_SMT or PATH lookup when empty
  std::string out;
  std::size_t steps = 10;
  unsigned jobs = 1;
};

/// Analyzes one `.lasso` file. On a nonterminating verdict the certificate is
/// written to --out or `<input>.cert.json`; on a terminating verdict the
/// witness goes to --out or `<input>.witness.json`.
int cmd_analyze(const std::filesystem::path& program, const Options& opts, std::ostream& out,
                std::ostream& err);

/// Exit 0 when the certificate passes, 1 when it fails.
int cmd_validate(const std::filesystem::path& program, const std::filesystem::path& cert,
                 std::ostream& out, std::ostream& err);

/// Prints the first --steps states and checks every transition between them.
int cmd_simulate(const std::filesystem::path& program, const std::filesystem::path& cert,
                 std::size_t steps, std::ostream& out, std::ostream& err);

struct BenchRecord {
  std::string program;
  std::string mode;
  std::string verdict;  // nonterminating | terminating | unknown | error
  std::optional<long> k;
  std::string strategy;
  long wall_ms = 0;
  long solver_ms = 0;
  std::string message;  // error text, not part of the CSV
};

/// Column order of the bench report.
inline constexpr const char* kBenchCsvHeader = "program,mode,verdict,k,strategy,wall_ms,solver_ms";

std::string to_csv(const BenchRecord& r);

/// Analyzes every `.lasso` file under `dir` (sorted by name) in fixed-point
/// mode and in `opts.mode` (gnta when opts.mode is fixedpoint).
/// Records come back grouped by program, fixed-point mode first.
std::vector<BenchRecord> run_bench(const std::filesystem::path& dir, const Options& opts);

/// Writes the CSV to --out (default bench.csv) and prints a summary table.
/// Exit 1 when a verdict disagrees with a sidecar `.expected` file.
int cmd_bench(const std::filesystem::path& dir, const Options& opts, std::ostream& out,
              std::ostream& err);

}  // namespace lassocert::cli
