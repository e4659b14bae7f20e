// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// medians printed underneath. Exit status is nonzero if any criterion fails.
//
//   acceptance [--configs <dir>] [--only <n>]

#include "oracles/oracles.hpp"
#include "superres/harness/config.hpp"
#include "superres/harness/experiment.hpp"
#include "superres/harness/results_io.hpp"
#include "superres/metrics.hpp"
#include "superres/solvers.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace superres;
using namespace superres::harness;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Check {
  std::string what;
  bool ok;
};

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void check(bool ok, const std::string& what) { checks_.push_back({what, ok}); }
  void note(const std::string& text) { notes_.push_back(text); }

  bool report() const {
    bool ok = true;
    for (const auto& c : checks_) ok = ok && c.ok;
    std::printf("criterion %d: %s  %s\n", id_, ok ? "PASS" : "FAIL", title_.c_str());
    for (const auto& n : notes_) std::printf("    %s\n", n.c_str());
    for (const auto& c : checks_) std::printf("    [%s] %s\n", c.ok ? "ok" : "x", c.what.c_str());
    std::fflush(stdout);
    return ok;
  }

 private:
  int id_;
  std::string title_;
  std::vector<Check> checks_;
  std::vector<std::string> notes_;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median_of(const ResultTable& t, Algorithm alg, Metric metric, std::optional<double> eta = {},
                 std::optional<Index> F = {}) {
  for (const auto& a : t.aggregates)
    if (a.algorithm == alg && a.metric == metric && a.eta == eta && (!F || a.F == *F)) return a.median;
  return std::numeric_limits<double>::quiet_NaN();
}

Index failed_rows(const ResultTable& t) {
  Index n = 0;
  for (const auto& r : t.rows) n += r.error.empty() ? 0 : 1;
  return n;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool well_separated(std::filesystem::path configs, ResultTable& table) {
  Criterion c(1, "well-separated recovery (F=50, SNR=20, s=20, min_sep 4)");
  const auto config = load_config(configs / "well_separated.json");
  const auto start = std::chrono::steady_clock::now();
  table = run_experiment(config);
  const double secs = seconds_since(start);
  const double omp_f = median_of(table, Algorithm::omp, Metric::filtered, 0.1);
  const double bloomp_f = median_of(table, Algorithm::bloomp, Metric::filtered, 0.1);
  const double blot_f = median_of(table, Algorithm::bp_blot, Metric::filtered, 0.1);
  const double bp_u = median_of(table, Algorithm::bp, Metric::unfiltered);
  const double blot_u = median_of(table, Algorithm::bp_blot, Metric::unfiltered);
  c.note(
      fmt("medians (unfiltered / 0.1-filtered): omp %.3f / %.3f, bloomp %.3f / %.3f, bp %.3f / %.3f, "
          "bp_blot %.3f / %.3f",
          median_of(table, Algorithm::omp, Metric::unfiltered), omp_f,
          median_of(table, Algorithm::bloomp, Metric::unfiltered), bloomp_f, bp_u,
          median_of(table, Algorithm::bp, Metric::filtered, 0.1), blot_u, blot_f));
  c.check(failed_rows(table) == 0, "no failed rows");
  c.check(bloomp_f <= 0.15, fmt("bloomp 0.1-filtered median %.4f <= 0.15", bloomp_f));
  c.check(blot_f <= 0.15, fmt("bp_blot 0.1-filtered median %.4f <= 0.15", blot_f));
  c.check(omp_f >= 2 * bloomp_f, fmt("omp 0.1-filtered median %.4f >= 2 x bloomp (%.4f)", omp_f, 2 * bloomp_f));
  c.check(bp_u >= 1.0, fmt("bp unfiltered median %.4f >= 1.00", bp_u));
  c.check(blot_u <= 0.60, fmt("bp_blot unfiltered median %.4f <= 0.60", blot_u));
  c.check(secs <= 300, fmt("runtime %.1f s <= 300 s", secs));
  return c.report();
}

bool grid_independence(std::filesystem::path configs) {
  Criterion c(2, "grid independence across F in {2,5,10,25,50} at SNR=20");
  auto config = load_config(configs / "sweep_f.json");
  config.F_list = {2, 5, 10, 25, 50};
  config.snr_list = {20};
  config.eta_list = {0.0, 0.05};
  config.trials = 10;
  const auto table = sweep_superresolution_factor(config);
  c.check(failed_rows(table) == 0, "no failed rows");
  for (Algorithm alg : {Algorithm::bloomp, Algorithm::bp_blot}) {
    double lo = kInf, hi = 0;
    std::string series;
    for (Index F : config.F_list) {
      const double v = median_of(table, alg, Metric::filtered, 0.05, F);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      series += fmt(" F=%lld:%.3f", static_cast<long long>(F), v);
    }
    c.note(std::string(to_string(alg)) + " 0.05-filtered medians" + series);
    c.check(hi <= 3 * lo, fmt("%s 0.05-filtered max/min %.2f <= 3", std::string(to_string(alg)).c_str(), hi / lo));
  }
  for (Algorithm alg : {Algorithm::omp, Algorithm::bp}) {
    std::string series;
    for (Index F : config.F_list)
      series += fmt(" F=%lld:%.3f", static_cast<long long>(F), median_of(table, alg, Metric::unfiltered, {}, F));
    c.note(std::string(to_string(alg)) + " unfiltered medians" + series);
    for (Index F : config.F_list) {
      if (F < 25) continue;
      const double v = median_of(table, alg, Metric::unfiltered, {}, F);
      c.check(v > 1.0, fmt("%s unfiltered median at F=%lld: %.4f > 1.00", std::string(to_string(alg)).c_str(),
                           static_cast<long long>(F), v));
    }
  }
  return c.report();
}

bool strong_superresolution(std::filesystem::path configs) {
  Criterion c(3, "strong super-resolution, spikes {10,10.3,15,20,25,25.3}, F=50, radius 0.15");
  const auto table = run_experiment(load_config(configs / "close_pairs.json"));
  c.check(failed_rows(table) == 0, "no failed rows");
  auto misses = [&](Algorithm alg) {
    Index n = 0, total = 0;
    for (const auto& r : table.rows) {
      if (r.algorithm != alg) continue;
      ++total;
      n += (!r.record || !r.record->bottleneck || *r.record->bottleneck > 0.1) ? 1 : 0;
    }
    return std::pair{n, total};
  };
  const double blot_b = median_of(table, Algorithm::bp_blot, Metric::bottleneck);
  const double blot_f = median_of(table, Algorithm::bp_blot, Metric::filtered, 0.1);
  c.note(fmt("bp_blot medians: bottleneck %.4f, 0.1-filtered %.4f, unfiltered %.4f", blot_b, blot_f,
             median_of(table, Algorithm::bp_blot, Metric::unfiltered)));
  c.check(blot_b <= 0.1, fmt("bp_blot median bottleneck %.4f <= 0.1", blot_b));
  c.check(blot_f <= 0.35, fmt("bp_blot median 0.1-filtered %.4f <= 0.35", blot_f));
  for (Algorithm alg : {Algorithm::omp, Algorithm::bloomp}) {
    const auto [n, total] = misses(alg);
    c.check(2 * n > total,
            fmt("%s misses the 0.1 bottleneck bound on %lld of %lld trials (majority needed)",
                std::string(to_string(alg)).c_str(), static_cast<long long>(n), static_cast<long long>(total)));
  }
  return c.report();
}

bool metric_inadequacy(std::filesystem::path configs) {
  Criterion c(4, "metric inadequacy, spikes {76,76.5,79,80,81}, F=50");
  const auto table = run_experiment(load_config(configs / "cluster.json"));
  c.check(failed_rows(table) == 0, "no failed rows");
  const double f = median_of(table, Algorithm::bp_blot, Metric::filtered, 0.25);
  const double u = median_of(table, Algorithm::bp_blot, Metric::unfiltered);
  c.note(fmt("bp_blot medians: unfiltered %.4f, 0.25-filtered %.4f, bottleneck %.4f", u, f,
             median_of(table, Algorithm::bp_blot, Metric::bottleneck)));
  c.check(f <= 0.35, fmt("bp_blot median 0.25-filtered %.4f <= 0.35", f));
  c.check(u >= 1.0, fmt("bp_blot median unfiltered %.4f >= 1.00", u));
  return c.report();
}

bool property_suite() {
  Criterion c(5, "property suite");
  const AmplitudeModel amps;

  {  // (a) local optimization never increases the residual
    Index violations = 0, steps = 0;
    Rng rng(501);
    std::uniform_int_distribution<Index> jitter(-8, 8);
    for (int inst = 0; inst < 100; ++inst) {
      const Index F = std::array<Index, 3>{5, 10, 20}[inst % 3];
      const GridSpec g(150, F);
      const SensingMatrix<double> phi(g);
      const auto x = synthesize_spikes<double>(g, 10, 4, amps, 1000 + inst);
      const auto y = measure(phi, x, 20.0, 2000 + inst);
      SolverTrace<double> trace;
      if (inst % 2 == 0) {
        bloomp(phi, y.y, 10, BandRadius::rayleigh(F), {}, &trace);
      } else {
        std::vector<Index> start;
        for (Index i : x.support()) start.push_back(std::clamp<Index>(i + jitter(rng), 0, g.N() - 1));
        local_optimization(phi, y.y, SupportSet(start), BandRadius::rayleigh(F), {}, &trace);
      }
      for (const auto& pass : trace.lo_residuals)
        for (std::size_t n = 1; n < pass.size(); ++n, ++steps) violations += pass[n] > pass[n - 1] ? 1 : 0;
    }
    c.check(violations == 0, fmt("(a) LO residual monotone: %lld violations in %lld steps over 100 instances",
                                 static_cast<long long>(violations), static_cast<long long>(steps)));
  }

  {  // (b) BPDN feasibility and dominance over the planted signal
    Index infeasible = 0, dominated = 0;
    double worst_ratio = 0;
    for (int inst = 0; inst < 50; ++inst) {
      const Index F = std::array<Index, 5>{1, 2, 5, 10, 20}[inst % 5];
      const GridSpec g(150, F);
      const SensingMatrix<double> phi(g);
      const auto x = synthesize_spikes<double>(g, 10, 4, amps, 3000 + inst);
      const auto y = measure(phi, x, 20.0, 4000 + inst);
      BpdnSettings<double> s;
      s.epsilon = y.noise_norm;
      const auto z = bpdn(phi, y.y, s);
      const double res = (phi.apply(z.coefficients) - y.y).norm();
      infeasible += res <= s.epsilon * (1 + 1e-6) ? 0 : 1;
      const double ratio = z.coefficients.cwiseAbs().sum() / x.dense().cwiseAbs().sum();
      worst_ratio = std::max(worst_ratio, ratio);
      dominated += ratio <= 1 + 1e-4 ? 0 : 1;
    }
    c.check(infeasible == 0, fmt("(b) BPDN feasible on %lld of 50 instances", 50 - static_cast<long long>(infeasible)));
    c.check(dominated == 0, fmt("(b) BPDN ||z||_1 <= ||x||_1 (1+1e-4) on %lld of 50 (worst ratio %.8f)",
                                50 - static_cast<long long>(dominated), worst_ratio));
  }

  {  // (c) eta = 0 filtered error is the unfiltered error
    Rng rng(505);
    std::normal_distribution<double> n(0, 1);
    double worst = 0;
    for (int inst = 0; inst < 100; ++inst) {
      Eigen::VectorXcd a(300), b(300);
      for (Index i = 0; i < 300; ++i) {
        a(i) = {n(rng), n(rng)};
        b(i) = {n(rng), n(rng)};
      }
      const double f = filtered_error(a, b, FilterSpec::make(0.0, 50));
      const double u = (a - b).norm() / b.norm();
      worst = std::max(worst, std::abs(f - u) / u);
    }
    c.check(worst <= 4 * std::numeric_limits<double>::epsilon(),
            fmt("(c) eta=0 filtered equals unfiltered, worst relative gap %.3g", worst));
  }

  {  // (d) sorted matching against all permutations
    Rng rng(507);
    std::uniform_int_distribution<Index> pos(0, 99);
    std::uniform_int_distribution<int> size(1, 6);
    const GridSpec g(20, 5);
    Index mismatches = 0;
    for (int inst = 0; inst < 200; ++inst) {
      const int k = size(rng);
      auto draw = [&] {
        std::vector<Index> v;
        while (static_cast<int>(v.size()) < k) {
          const Index p = pos(rng);
          if (std::find(v.begin(), v.end(), p) == v.end()) v.push_back(p);
        }
        return SupportSet(v);
      };
      const SupportSet a = draw(), b = draw();
      mismatches +=
          bottleneck_distance(a, b, g) == g.to_ell(oracle::bottleneck_bruteforce(a.indices(), b.indices())) ? 0 : 1;
    }
    c.check(mismatches == 0,
            fmt("(d) bottleneck equals brute force on %lld of 200 cases", 200 - static_cast<long long>(mismatches)));
  }

  {  // (e) Rayleigh index of the reference sets
    std::vector<double> separated;
    for (int i = 0; i < 20; ++i) separated.push_back(4.0 * i + 0.5 * (i / 2));
    const Index r1 = rayleigh_index(separated);
    const Index r5 = rayleigh_index({76, 76.5, 79, 80, 81});
    const Index r6 = rayleigh_index({10, 10.3, 15, 20, 25, 25.3});
    c.check(r1 == 1 && r5 == 5 && r6 == 6,
            fmt("(e) rayleigh index %lld, %lld, %lld (expected 1, 5, 6)", static_cast<long long>(r1),
                static_cast<long long>(r5), static_cast<long long>(r6)));
  }

  {  // (f) noiseless F=1 exact recovery
    const GridSpec g(150, 1);
    const SensingMatrix<double> phi(g);
    double worst_omp = 0, worst_bp = 0;
    for (int inst = 0; inst < 20; ++inst) {
      const auto x = synthesize_spikes<double>(g, 10, 4, amps, 6000 + inst);
      const Eigen::VectorXcd y = phi.apply(x);
      worst_omp = std::max(worst_omp, (omp(phi, y, 10).coefficients - x.dense()).cwiseAbs().maxCoeff());
      worst_bp =
          std::max(worst_bp, (bpdn(phi, y, BpdnSettings<double>{}).coefficients - x.dense()).cwiseAbs().maxCoeff());
    }
    c.check(worst_omp <= 1e-6 && worst_bp <= 1e-6,
            fmt("(f) F=1 noiseless coefficient error: omp %.3g, bpdn %.3g (<= 1e-6)", worst_omp, worst_bp));
  }
  return c.report();
}

bool determinism(std::filesystem::path configs, const ResultTable& first) {
  Criterion c(6, "determinism of criterion 1 output");
  const auto second = run_experiment(load_config(configs / "well_separated.json"));
  const auto base = std::filesystem::temp_directory_path() / "superres_acceptance";
  std::filesystem::remove_all(base);
  const auto a = emit_results(first, base / "a");
  const auto b = emit_results(second, base / "b");
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) same = slurp(a[i]) == slurp(b[i]) && !slurp(a[i]).empty();
  c.check(same, fmt("%zu output files byte-identical across two runs", a.size()));
  std::filesystem::remove_all(base);
  return c.report();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"superres acceptance suite"};
  std::filesystem::path configs = "configs";
  int only = 0;
  app.add_option("--configs", configs, "directory holding the experiment configs");
  app.add_option("--only", only, "run a single criterion (1-6)")->check(CLI::Range(1, 6));
  CLI11_PARSE(app, argc, argv);

  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  try {
    ResultTable first;
    if (only == 0 || only == 1 || only == 6) {
      const bool c1 = well_separated(configs, first);
      if (only != 6) ok = c1 && ok;
    }
    if (only == 0 || only == 2) ok = grid_independence(configs) && ok;
    if (only == 0 || only == 3) ok = strong_superresolution(configs) && ok;
    if (only == 0 || only == 4) ok = metric_inadequacy(configs) && ok;
    if (only == 0 || only == 5) ok = property_suite() && ok;
    if (only == 0 || only == 6) ok = determinism(configs, first) && ok;
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("acceptance total %.1f s: %s\n", seconds_since(start),
              ok ? "all criteria passed" : "some criteria failed");
  return ok ? 0 : 1;
}
