#include <iostream>

#include "CLI11.hpp"
#include "lassocert/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace lassocert::cli;

  CLI::App app{"Nontermination and termination analysis for linear lasso programs"};
  app.require_subcommand(1);

  Options opts;
  std::string program, cert, dir;

  auto add_analysis_flags = [&](CLI::App* cmd) {
    cmd->add_option("--mode", opts.mode, "auto | fixedpoint | gnta")
        ->check(CLI::IsMember({"auto", "fixedpoint", "gnta"}));
    cmd->add_option("--max-size", opts.max_size, "largest certificate size to try (default: #vars)");
    cmd->add_flag("--int", opts.integer_mode, "solve over the integers");
    cmd->add_option("--timeout-ms", opts.timeout_ms, "per-query solver timeout")->check(CLI::PositiveNumber);
    cmd->add_option("--solver", opts.solver, "solver command line, e.g. \"z3 -in\"");
  };

  auto* analyze = app.add_subcommand("analyze", "analyze one lasso program");
  analyze->add_option("program", program)->required()->check(CLI::ExistingFile);
  add_analysis_flags(analyze);
  analyze->add_option("--out", opts.out, "where to write the certificate or witness");

  auto* validate = app.add_subcommand("validate", "check a certificate against a program");
  validate->add_option("program", program)->required()->check(CLI::ExistingFile);
  validate->add_option("--cert", cert)->required()->check(CLI::ExistingFile);

  auto* simulate = app.add_subcommand("simulate", "print the execution a certificate describes");
  simulate->add_option("program", program)->required()->check(CLI::ExistingFile);
  simulate->add_option("--cert", cert)->required()->check(CLI::ExistingFile);
  simulate->add_option("--steps", opts.steps, "number of states to print");

  auto* bench = app.add_subcommand("bench", "analyze every .lasso file in a directory");
  bench->add_option("dir", dir)->required()->check(CLI::ExistingDirectory);
  add_analysis_flags(bench);
  bench->add_option("--out", opts.out, "CSV report path (default bench.csv)");
  bench->add_option("--jobs", opts.jobs, "parallel analyses")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  if (*analyze) return cmd_analyze(program, opts, std::cout, std::cerr);
  if (*validate) return cmd_validate(program, cert, std::cout, std::cerr);
  if (*simulate) return cmd_simulate(program, cert, opts.steps, std::cout, std::cerr);
  // The bench compares fixed points against full GNTA search unless told otherwise.
  if (bench->count("--mode") == 0) opts.mode = "gnta";
  return cmd_bench(dir, opts, std::cout, std::cerr);
}
