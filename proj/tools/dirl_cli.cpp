#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dirl/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Damped iteratively reweighted l1/l2 solvers and saddle analysis"};
  app.require_subcommand(1);

  std::optional<std::string> config, out;
  std::string problem = "benchmark2d";
  std::string x0 = "zeros";
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  bool trace_full = false;

  auto* solve = app.add_subcommand("solve", "Run DIRL1 or DIRL2 on a problem");
  solve->add_option("--config", config, "Solver config JSON");
  solve->add_option("--problem", problem, "Problem file or built-in name")->capture_default_str();
  solve->add_option("--x0", x0, "zeros | uniform[:SEED] | comma-separated vector")->capture_default_str();
  solve->add_option("--out", out, "Output prefix");
  solve->add_option("--seed", seed, "Seed for a bare 'uniform' x0");
  solve->add_flag("--trace-full", trace_full, "Store per-iteration states");

  std::string x;
  auto* classify = app.add_subcommand("classify", "Classify a stationary point");
  classify->add_option("--problem", problem, "Problem file or built-in name")->capture_default_str();
  classify->add_option("--x", x, "Point, comma-separated")->required();
  classify->add_option("--config", config, "Solver config for fixed-point checks");

  std::string experiment;
  auto* escape = app.add_subcommand("escape", "Run a seeded saddle-escape experiment");
  escape->add_option("--config", experiment, "Experiment config JSON")->required();
  escape->add_option("--out", out, "Summary JSON path");
  escape->add_option("--seed", seed, "Override the experiment seed");
  escape->add_option("--workers", workers, "Concurrent solves")->check(CLI::PositiveNumber)->capture_default_str();

  auto* selfcheck = app.add_subcommand("selfcheck", "Run all property suites");
  selfcheck->add_option("--seed", seed, "Suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dirl::kExitError;
  }

  if (*solve) {
    dirl::SolveOptions opts;
    opts.config_path = config;
    opts.problem = problem;
    opts.x0 = x0;
    opts.out_prefix = out;
    opts.seed = seed.value_or(0);
    opts.trace_full = trace_full;
    return dirl::cmd_solve(opts, std::cout, std::cerr);
  }
  if (*classify) {
    return dirl::cmd_classify({problem, x, config}, std::cout, std::cerr);
  }
  if (*escape) {
    return dirl::cmd_escape({experiment, out, seed, workers}, std::cout, std::cerr);
  }
  return dirl::cmd_selfcheck(std::cout, seed.value_or(20240601));
}
