// superres: run spike super-resolution experiments from a JSON config.
//
//   superres run     --config <file> [--seed <u64>] [--out <dir>] [--trials <n>] [--threads <n>] [--timings]
//   superres sweep-f --config <file> [--f-list 2,5,10] [same options as run]
//   superres fit-pla --in <results.csv>
//
// Failures print one JSON object {"error": {"code": ..., "message": ...}}
// on stderr and exit nonzero.

#include "superres/harness/config.hpp"
#include "superres/harness/experiment.hpp"
#include "superres/harness/results_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>

namespace {

using namespace superres;
using namespace superres::harness;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "results";
  std::optional<Index> trials;
  unsigned threads = 1;
  bool timings = false;
  std::vector<Index> f_list;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--config", args.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "override master_seed");
  cmd->add_option("--out", args.out, "output directory")->capture_default_str();
  cmd->add_option("--trials", args.trials, "override trial count")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", args.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--timings", args.timings, "fill runtime_ms (output is then run-dependent)");
}

int run(const RunArgs& args, bool sweep) {
  ExperimentConfig config = load_config(args.config);
  if (args.seed) config.master_seed = *args.seed;
  if (args.trials) config.trials = *args.trials;
  if (args.timings) config.record_runtime = true;
  if (sweep) {
    if (!args.f_list.empty()) {
      config.F_list = args.f_list;
    } else if (config.F_list.size() < 2) {
      config.F_list = kDefaultSweepFactors;
    }
  }
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const RunOptions options{args.threads};
  const ResultTable table = sweep ? sweep_superresolution_factor(config, options) : run_experiment(config, options);
  auto files = emit_results(table, args.out);
  files.push_back(emit_metadata(config, args.out));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Index failed = 0;
  for (const auto& r : table.rows) failed += r.error.empty() ? 0 : 1;
  std::cerr << "superres: " << table.rows.size() << " rows (" << failed << " failed) in " << seconds << " s\n";
  for (const auto& f : files) std::cout << f.string() << '\n';
  return 0;
}

int fit(const std::string& in) {
  const ParsedResults parsed = read_results_csv(std::filesystem::path(in));
  std::cout << "algorithm,snr,eta,exponent,points\n";
  for (const auto& f : fit_pla(parsed)) {
    std::cout << to_string(f.algorithm) << ',' << format_double(f.snr) << ','
              << (f.eta ? format_double(*f.eta) : "unfiltered") << ',' << format_double(f.exponent) << ',' << f.points
              << '\n';
  }
  return 0;
}

void print_error(std::string_view code, std::string_view message) {
  nlohmann::json err{{"error", {{"code", code}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spike super-resolution experiments: OMP, BLOOMP, BP and BP-BLOT on partial Fourier data"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  add_run_options(run_cmd, run_args);

  RunArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep-f", "run a config across super-resolution factors");
  add_run_options(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--f-list", sweep_args.f_list, "factors to sweep (overrides F_list)")->delimiter(',');

  std::string fit_in;
  auto* fit_cmd = app.add_subcommand("fit-pla", "fit power-law amplification exponents from a results CSV");
  fit_cmd->add_option("--in", fit_in, "results.csv")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*run_cmd) return run(run_args, false);
    if (*sweep_cmd) return run(sweep_args, true);
    if (*fit_cmd) return fit(fit_in);
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
