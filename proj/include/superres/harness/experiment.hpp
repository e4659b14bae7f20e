#ifndef SUPERRES_HARNESS_EXPERIMENT_HPP
#define SUPERRES_HARNESS_EXPERIMENT_HPP

#include "superres/harness/config.hpp"
#include "superres/metrics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace superres::harness {

/// One (trial, algorithm, F, snr) outcome. A stage failure leaves the
/// metrics unset and records the reason in `error`.
struct ResultRow {
  Index trial = 0;
  Algorithm algorithm = Algorithm::omp;
  Index F = 1;
  double snr = 0;
  std::optional<EvaluationRecord> record;
  std::vector<std::string> flags;
  std::string error;
};

enum class Metric { unfiltered, filtered, residual, bottleneck, hausdorff };
std::string_view to_string(Metric m);

/// Summary of one metric over the trials of a (algorithm, F, snr) cell.
/// eta is set only for Metric::filtered.
struct AggregateRow {
  Algorithm algorithm = Algorithm::omp;
  Index F = 1;
  double snr = 0;
  Metric metric = Metric::unfiltered;
  std::optional<double> eta;
  Index count = 0;
  double median = 0;
  double mean = 0;
  double q25 = 0;
  double q75 = 0;
};

struct ResultTable {
  std::vector<double> eta_list;
  bool record_runtime = false;
  std::vector<ResultRow> rows;  // canonical order: trial, algorithm, F, snr
  std::vector<AggregateRow> aggregates;
};

struct RunOptions {
  unsigned threads = 1;
};

/// Seed for one stream of randomness, from the master seed and a path of
/// integers (stream tag, trial, F index, snr index), by chained SplitMix64.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Run every trial x F x snr cell of the config with every configured
/// algorithm. All algorithms in a trial see the same instance and y.
ResultTable run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// run_experiment over a list of at least two factors.
ResultTable sweep_superresolution_factor(const ExperimentConfig& config, const RunOptions& options = {});

/// Recompute per-cell aggregates from the rows, in canonical order.
std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows, const std::vector<double>& eta_list);

/// Linear-interpolation quantile of unsorted values (p in [0, 1]).
double quantile(std::vector<double> values, double p);

/// Slope of the least-squares line through (log F, log error).
double estimate_pla_exponent(const std::vector<double>& errors, const std::vector<double>& factors);

}  // namespace superres::harness

#endif  // SUPERRES_HARNESS_EXPERIMENT_HPP
