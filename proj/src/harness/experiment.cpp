#include "superres/harness/experiment.hpp"

#include "superres/bands.hpp"
#include "superres/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

namespace superres::harness {

namespace {

constexpr std::uint64_t kInstanceStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Positions (Rayleigh units) and amplitudes of one trial, shared by every
/// F and snr cell of that trial.
struct TrialInstance {
  std::vector<double> positions;
  std::vector<Complex<double>> amplitudes;
  std::string error;  // set when the draw itself failed
};

TrialInstance draw_instance(const ExperimentConfig& config, double min_factor, Index trial) {
  Rng rng(derive_seed(config.master_seed, {kInstanceStream, static_cast<std::uint64_t>(trial)}));
  TrialInstance inst;
  try {
    if (config.placement.kind == Placement::Kind::random) {
      // Padding by one finest-grid step keeps the separation after rounding
      // onto every grid in the sweep.
      const double sep = config.placement.min_sep + 1.0 / min_factor;
      inst.positions = place_positions(static_cast<double>(config.m), config.s, sep, rng);
    } else {
      inst.positions = config.placement.positions;
      std::sort(inst.positions.begin(), inst.positions.end());
    }
    for (std::size_t n = 0; n < inst.positions.size(); ++n)
      inst.amplitudes.push_back(config.amplitude_model.draw<double>(rng));
  } catch (const std::exception& e) {
    inst = TrialInstance{{}, {}, e.what()};
  }
  return inst;
}

SpikeTrain<double> snap_instance(const TrialInstance& inst, const GridSpec& grid) {
  std::vector<Spike<double>> entries;
  for (std::size_t n = 0; n < inst.positions.size(); ++n)
    entries.push_back({snap_to_grid(grid, inst.positions[n]), inst.amplitudes[n]});
  return SpikeTrain<double>(grid, std::move(entries));
}

BandRadius band_radius_for(const ExperimentConfig& config, Index F) {
  if (config.band_radius) {
    const auto steps = static_cast<Index>(std::floor(*config.band_radius * static_cast<double>(F) + 1e-9));
    return BandRadius::steps(std::max<Index>(1, steps));
  }
  return default_band_radius(config.placement.effective_min_sep(), F);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == ';' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct CellContext {
  const ExperimentConfig& config;
  const SensingMatrix<double>& phi;
  const std::vector<double>& eta_list;
  Index F;
  std::size_t f_index;
};

/// Fills the rows of one (trial, F, snr) cell, one per algorithm, in
/// config.algorithms order.
void run_cell(const CellContext& ctx, const TrialInstance& inst, Index trial, std::size_t snr_index, double snr,
              std::vector<ResultRow*> out) {
  const auto& config = ctx.config;
  for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
    *out[a] = ResultRow{trial, config.algorithms[a], ctx.F, snr, std::nullopt, {}, {}};
  }
  auto fail_all = [&](const std::string& what) {
    for (ResultRow* row : out)
      if (!row->record && row->error.empty()) {
        row->error = what;
        row->flags.push_back("error:" + sanitize(what));
      }
  };
  try {
    if (!inst.error.empty()) throw Error(ErrorCode::infeasible_packing, inst.error);
    const SpikeTrain<double> truth = snap_instance(inst, ctx.phi.grid());
    const auto noise_seed =
        derive_seed(config.master_seed, {kNoiseStream, static_cast<std::uint64_t>(trial), ctx.f_index, snr_index});
    const Measurement<double> meas = measure(ctx.phi, truth, snr, noise_seed);
    const Index s = config.s;

    std::optional<BandRadius> radius;
    std::string radius_error;
    try {
      radius = band_radius_for(config, ctx.F);
    } catch (const std::exception& e) {
      radius_error = e.what();
    }

    std::optional<RecoveredSignal<double>> bp;
    double bp_ms = 0;
    for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
      ResultRow& row = *out[a];
      try {
        RecoveredSignal<double> result;
        double runtime = 0;
        const auto start = Clock::now();
        switch (row.algorithm) {
          case Algorithm::omp:
            result = omp(ctx.phi, meas.y, s);
            runtime = elapsed_ms(start);
            break;
          case Algorithm::bloomp:
            if (!radius) throw Error(ErrorCode::invalid_argument, radius_error);
            result = bloomp(ctx.phi, meas.y, s, *radius);
            runtime = elapsed_ms(start);
            break;
          case Algorithm::bp:
          case Algorithm::bp_blot:
            // One BPDN solve serves both rows; each reports its full cost.
            if (!bp) {
              bp = bpdn(ctx.phi, meas.y, config.bpdn.settings(static_cast<double>(meas.noise_norm)));
              bp_ms = elapsed_ms(start);
            }
            if (row.algorithm == Algorithm::bp) {
              result = *bp;
              runtime = bp_ms;
            } else {
              if (!radius) throw Error(ErrorCode::invalid_argument, radius_error);
              const auto blot_start = Clock::now();
              result = blot(bp->coefficients, ctx.phi, meas.y, s, *radius);
              result.flags |= bp->flags;
              runtime = bp_ms + elapsed_ms(blot_start);
            }
            break;
        }

        EvaluationRecord rec = evaluate(ctx.phi, truth, result.coefficients, meas.y, ctx.eta_list);
        rec.runtime_ms = runtime;
        row.flags = flag_names(result.flags);
        for (double eta : ctx.eta_list)
          if (FilterSpec::make(eta, ctx.F).collapsed()) row.flags.push_back("eta_collapsed");
        if (!rec.bottleneck) row.flags.push_back("bottleneck_undefined");
        row.record = std::move(rec);
      } catch (const std::exception& e) {
        row.error = e.what();
        row.flags.push_back("error:" + sanitize(e.what()));
      }
    }
  } catch (const std::exception& e) {
    fail_all(e.what());
  }
}

template <typename Fn>
void parallel_for(Index count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::vector<std::thread> pool;
  const auto workers = std::min<Index>(static_cast<Index>(threads), count);
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (Index i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::unfiltered:
      return "unfiltered_rel_error";
    case Metric::filtered:
      return "filtered_rel_error";
    case Metric::residual:
      return "relative_residual";
    case Metric::bottleneck:
      return "bottleneck_ell";
    case Metric::hausdorff:
      return "hausdorff_ell";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t v : path) h = splitmix64(h ^ splitmix64(v));
  return h;
}

ResultTable run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  std::vector<Index> factors = config.F_list;
  std::sort(factors.begin(), factors.end());
  factors.erase(std::unique(factors.begin(), factors.end()), factors.end());
  std::vector<double> snrs = config.snr_list;
  std::sort(snrs.begin(), snrs.end());
  snrs.erase(std::unique(snrs.begin(), snrs.end()), snrs.end());

  const auto n_alg = config.algorithms.size();
  const auto n_f = factors.size();
  const auto n_snr = snrs.size();
  ResultTable table;
  table.eta_list = config.eta_list;
  table.record_runtime = config.record_runtime;
  table.rows.resize(static_cast<std::size_t>(config.trials) * n_alg * n_f * n_snr);
  auto slot = [&](Index t, std::size_t a, std::size_t fi, std::size_t si) -> ResultRow& {
    return table.rows[((static_cast<std::size_t>(t) * n_alg + a) * n_f + fi) * n_snr + si];
  };

  std::vector<TrialInstance> instances;
  for (Index t = 0; t < config.trials; ++t)
    instances.push_back(draw_instance(config, static_cast<double>(factors.front()), t));

  for (std::size_t fi = 0; fi < n_f; ++fi) {
    const GridSpec grid(config.m, factors[fi]);
    const SensingMatrix<double> phi(grid);
    const CellContext ctx{config, phi, config.eta_list, factors[fi], fi};
    parallel_for(config.trials * static_cast<Index>(n_snr), options.threads, [&](Index job) {
      const Index t = job / static_cast<Index>(n_snr);
      const auto si = static_cast<std::size_t>(job % static_cast<Index>(n_snr));
      std::vector<ResultRow*> out;
      for (std::size_t a = 0; a < n_alg; ++a) out.push_back(&slot(t, a, fi, si));
      run_cell(ctx, instances[static_cast<std::size_t>(t)], t, si, snrs[si], std::move(out));
    });
  }

  // Canonical order: algorithms in enum order within a trial.
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.trial, a.algorithm, a.F, a.snr) < std::tie(b.trial, b.algorithm, b.F, b.snr);
  });
  table.aggregates = aggregate(table.rows, table.eta_list);
  return table;
}

ResultTable sweep_superresolution_factor(const ExperimentConfig& config, const RunOptions& options) {
  std::vector<Index> factors = config.F_list;
  std::sort(factors.begin(), factors.end());
  factors.erase(std::unique(factors.begin(), factors.end()), factors.end());
  require(factors.size() >= 2, ErrorCode::config_error, "sweep needs at least two distinct values in F_list");
  return run_experiment(config, options);
}

double quantile(std::vector<double> values, double p) {
  require(!values.empty(), ErrorCode::invalid_argument, "quantile of an empty list");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows, const std::vector<double>& eta_list) {
  struct Key {
    Algorithm algorithm;
    Index F;
    double snr;
    bool operator<(const Key& o) const { return std::tie(algorithm, F, snr) < std::tie(o.algorithm, o.F, o.snr); }
    bool operator==(const Key& o) const = default;
  };
  std::vector<Key> keys;
  for (const auto& r : rows) keys.push_back({r.algorithm, r.F, r.snr});
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::vector<AggregateRow> out;
  auto summarize = [&](const Key& key, Metric metric, std::optional<double> eta, auto extract) {
    std::vector<double> values;
    for (const auto& r : rows) {
      if (r.algorithm != key.algorithm || r.F != key.F || r.snr != key.snr || !r.record) continue;
      const std::optional<double> v = extract(*r.record);
      if (v) values.push_back(*v);
    }
    AggregateRow agg{key.algorithm, key.F, key.snr, metric, eta, static_cast<Index>(values.size()), 0, 0, 0, 0};
    if (values.empty()) {
      agg.median = agg.mean = agg.q25 = agg.q75 = std::numeric_limits<double>::quiet_NaN();
    } else {
      agg.median = quantile(values, 0.5);
      agg.q25 = quantile(values, 0.25);
      agg.q75 = quantile(values, 0.75);
      agg.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    }
    out.push_back(agg);
  };
  for (const Key& key : keys) {
    summarize(key, Metric::unfiltered, std::nullopt,
              [](const EvaluationRecord& r) -> std::optional<double> { return r.unfiltered_rel_error; });
    for (double eta : eta_list) {
      summarize(key, Metric::filtered, eta, [eta](const EvaluationRecord& r) -> std::optional<double> {
        auto it = r.filtered_rel_errors.find(eta);
        if (it == r.filtered_rel_errors.end()) return std::nullopt;
        return it->second;
      });
    }
    summarize(key, Metric::residual, std::nullopt,
              [](const EvaluationRecord& r) -> std::optional<double> { return r.relative_residual; });
    summarize(key, Metric::bottleneck, std::nullopt,
              [](const EvaluationRecord& r) -> std::optional<double> { return r.bottleneck; });
    summarize(key, Metric::hausdorff, std::nullopt,
              [](const EvaluationRecord& r) -> std::optional<double> { return r.hausdorff; });
  }
  return out;
}

double estimate_pla_exponent(const std::vector<double>& errors, const std::vector<double>& factors) {
  require(errors.size() == factors.size(), ErrorCode::invalid_argument, "pla fit: errors and factors differ in length");
  require(errors.size() >= 2, ErrorCode::invalid_argument, "pla fit: need at least two points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    require(errors[i] > 0, ErrorCode::invalid_argument, "pla fit: errors must be positive");
    require(factors[i] > 0, ErrorCode::invalid_argument, "pla fit: factors must be positive");
    lx.push_back(std::log(factors[i]));
    ly.push_back(std::log(errors[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  require(sxx > 0, ErrorCode::invalid_argument, "pla fit: factors must not all be equal");
  return sxy / sxx;
}

}  // namespace superres::harness
