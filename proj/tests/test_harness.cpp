#include "oracles/oracles.hpp"
#include "superres/harness/config.hpp"
#include "superres/harness/experiment.hpp"
#include "superres/harness/results_io.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace superres;
using namespace superres::harness;

namespace {

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.F_list = {4};
  c.s = 5;
  c.snr_list = {20};
  c.algorithms = {Algorithm::omp, Algorithm::bloomp, Algorithm::bp, Algorithm::bp_blot};
  c.eta_list = {0.0, 0.5};
  c.trials = 3;
  c.master_seed = 42;
  c.bpdn.max_iterations = 400;
  return c;
}

std::string csv(const ResultTable& t) {
  std::ostringstream out;
  write_results_csv(t, out);
  return out.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("superres_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config parsing mirrors the struct") {
  const auto c = parse_config(R"({
    "m": 100, "F_list": [2, 5], "s": 4,
    "placement": {"kind": "random", "min_sep": 2.5},
    "amplitude_model": {"phase": "positive_real", "min_magnitude": 1, "max_magnitude": 1},
    "snr_list": [10, "inf"], "algorithms": ["omp", "bp_blot"], "eta_list": [0.05],
    "band_radius": 0.5, "trials": 3, "master_seed": 18446744073709551615,
    "bpdn": {"epsilon_multiplier": 1.1, "max_iterations": 100, "primal_tol": 1e-5, "dual_tol": 1e-5, "penalty": 2},
    "record_runtime": true
  })");
  CHECK(c.m == 100);
  CHECK(c.F_list == std::vector<Index>{2, 5});
  CHECK(c.placement.min_sep == 2.5);
  CHECK(c.amplitude_model.phase == AmplitudeModel::Phase::positive_real);
  CHECK(std::isinf(c.snr_list[1]));
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::omp, Algorithm::bp_blot});
  CHECK(c.band_radius == 0.5);
  CHECK(c.master_seed == 18446744073709551615ull);
  CHECK(c.bpdn.max_iterations == 100);
  CHECK(c.record_runtime);
  const auto e = parse_config(R"({"placement": {"kind": "explicit", "positions": [1, 1.5, 4]}, "s": 3,
                                  "band_radius": "auto"})");
  CHECK(e.placement.kind == Placement::Kind::explicit_positions);
  CHECK(e.placement.effective_min_sep() == doctest::Approx(0.5));
  CHECK(!e.band_radius);
}

TEST_CASE("config dump round-trips") {
  auto c = small_config();
  c.snr_list = {20, std::numeric_limits<double>::infinity()};
  c.band_radius = 0.15;
  c.placement.kind = Placement::Kind::explicit_positions;
  c.placement.positions = {1, 2.5, 7, 9, 11};
  const auto back = parse_config(dump_config(c));
  CHECK(dump_config(back) == dump_config(c));
  CHECK(back.F_list == c.F_list);
  CHECK(back.band_radius == c.band_radius);
  CHECK(std::isinf(back.snr_list[1]));
  CHECK(back.placement.positions == c.placement.positions);
  CHECK(dump_config(parse_config("{}")) == dump_config(ExperimentConfig{}));
}

TEST_CASE("metadata records the conventions") {
  const auto dir = scratch_dir("meta");
  const auto path = emit_metadata(small_config(), dir);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("error_normalization") != std::string::npos);
  CHECK(text.str().find("\"master_seed\": 42") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config rejects unknown keys and bad values") {
  auto code_of = [](const char* text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;
  };
  CHECK_THROWS_AS(parse_config(R"({"trails": 3})"), Error);
  CHECK(code_of(R"({"trails": 3})") == ErrorCode::config_error);
  CHECK_THROWS_AS(parse_config(R"({"placement": {"kind": "random", "sep": 4}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"bpdn": {"rho": 1}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"amplitude_model": {"phase": "random", "max": 2}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"F_list": [0]})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"F_list": [2.5]})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"trials": 0})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"master_seed": -1})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"m": "150"})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"algorithms": []})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"algorithms": ["lasso"]})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"snr_list": [-1]})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"placement": {"kind": "grid"}})"), Error);
  CHECK_THROWS_AS(parse_config("{not json"), Error);
  CHECK_THROWS_AS(parse_config("[1, 2]"), Error);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, {1, 0}) == derive_seed(1, {1, 0}));
  CHECK(derive_seed(1, {1, 0}) != derive_seed(1, {1, 1}));
  CHECK(derive_seed(1, {1, 0}) != derive_seed(2, {1, 0}));
  CHECK(derive_seed(1, {1, 0}) != derive_seed(1, {2, 0}));
  CHECK(derive_seed(1, {2, 0, 1, 0}) != derive_seed(1, {2, 0, 0, 1}));
}

TEST_CASE("noiseless F=1 omp row is exact") {
  ExperimentConfig c;
  c.F_list = {1};
  c.s = 3;
  c.snr_list = {std::numeric_limits<double>::infinity()};
  c.algorithms = {Algorithm::omp};
  c.trials = 1;
  const auto t = run_experiment(c);
  REQUIRE(t.rows.size() == 1);
  REQUIRE(t.rows[0].record);
  CHECK(t.rows[0].record->unfiltered_rel_error <= 1e-8);
  CHECK(t.rows[0].record->bottleneck == 0.0);
}

TEST_CASE("one row per trial, algorithm, F and snr, in canonical order") {
  auto c = small_config();
  c.F_list = {2, 4};
  c.snr_list = {20, 10};
  const auto t = run_experiment(c);
  CHECK(t.rows.size() == 3 * 4 * 2 * 2);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const auto& a = t.rows[i - 1];
    const auto& b = t.rows[i];
    CHECK(std::tie(a.trial, a.algorithm, a.F, a.snr) < std::tie(b.trial, b.algorithm, b.F, b.snr));
  }
  for (const auto& r : t.rows) CHECK(r.error.empty());
}

TEST_CASE("runs are deterministic and thread-count independent") {
  const auto c = small_config();
  const auto a = run_experiment(c);
  const auto b = run_experiment(c, RunOptions{3});
  CHECK(csv(a) == csv(b));
  auto d = c;
  d.master_seed = 43;
  CHECK(csv(a) != csv(run_experiment(d)));
}

TEST_CASE("algorithms in a trial share the instance") {
  auto c = small_config();
  c.snr_list = {std::numeric_limits<double>::infinity()};
  c.F_list = {1};
  c.algorithms = {Algorithm::omp, Algorithm::bloomp};
  const auto t = run_experiment(c);
  // Noiseless F=1 recovery is exact for both, which needs the same x behind y.
  for (const auto& r : t.rows) CHECK(r.record->unfiltered_rel_error < 1e-8);
}

TEST_CASE("stage failures are recorded per row") {
  ExperimentConfig c = small_config();
  c.algorithms = {Algorithm::omp, Algorithm::bloomp};
  c.F_list = {4};
  c.placement.kind = Placement::Kind::explicit_positions;
  c.placement.positions = {10, 10.3, 30};
  c.s = 3;
  // A band wider than the grid leaves bloomp nothing to select after one pick.
  c.band_radius = 200.0;
  const auto t = run_experiment(c);
  bool saw_error = false, saw_ok = false;
  for (const auto& r : t.rows) {
    if (r.algorithm == Algorithm::bloomp) {
      CHECK(!r.error.empty());
      CHECK(!r.record);
      saw_error = true;
    } else {
      CHECK(r.record);
      saw_ok = true;
    }
  }
  CHECK(saw_error);
  CHECK(saw_ok);
  const std::string text = csv(t);
  CHECK(text.find("error:") != std::string::npos);
}

TEST_CASE("aggregates are recomputable from the rows") {
  const auto t = run_experiment(small_config());
  const auto again = aggregate(t.rows, t.eta_list);
  REQUIRE(again.size() == t.aggregates.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(same(again[i].median, t.aggregates[i].median));
    CHECK(same(again[i].mean, t.aggregates[i].mean));
  }
  // Independent median of the unfiltered errors of the first cell.
  std::vector<double> v;
  for (const auto& r : t.rows)
    if (r.algorithm == t.aggregates[0].algorithm) v.push_back(r.record->unfiltered_rel_error);
  std::sort(v.begin(), v.end());
  CHECK(t.aggregates[0].metric == Metric::unfiltered);
  CHECK(t.aggregates[0].median == v[v.size() / 2]);
}

TEST_CASE("quantiles") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2);
  CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
  CHECK(quantile({7}, 0.75) == 7);
}

TEST_CASE("csv schema and round trip") {
  const auto t = run_experiment(small_config());
  const std::string text = csv(t);
  CHECK(text.rfind("trial,algorithm,F,snr,eta,unfiltered_rel_error,filtered_rel_error,relative_residual,"
                   "bottleneck_ell,hausdorff_ell,runtime_ms,flags\n",
                   0) == 0);
  std::istringstream in(text);
  const auto parsed = read_results_csv(in);
  CHECK(parsed.eta_list == t.eta_list);
  REQUIRE(parsed.rows.size() == t.rows.size());
  const auto re = aggregate(parsed.rows, parsed.eta_list);
  REQUIRE(re.size() == t.aggregates.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    CHECK(same(re[i].median, t.aggregates[i].median));
    CHECK(same(re[i].mean, t.aggregates[i].mean));
    CHECK(same(re[i].q25, t.aggregates[i].q25));
    CHECK(same(re[i].q75, t.aggregates[i].q75));
  }
}

TEST_CASE("empty eta list drops the filtered columns") {
  auto c = small_config();
  c.eta_list.clear();
  c.algorithms = {Algorithm::omp};
  const auto t = run_experiment(c);
  const std::string text = csv(t);
  CHECK(text.rfind("trial,algorithm,F,snr,unfiltered_rel_error,relative_residual,bottleneck_ell,hausdorff_ell,"
                   "runtime_ms,flags\n",
                   0) == 0);
  std::istringstream in(text);
  CHECK(read_results_csv(in).rows.size() == t.rows.size());
}

TEST_CASE("runtime column is empty unless requested") {
  auto c = small_config();
  c.algorithms = {Algorithm::omp};
  c.trials = 1;
  const auto plain = csv(run_experiment(c));
  CHECK(plain.find(",,") != std::string::npos);
  c.record_runtime = true;
  const auto t = run_experiment(c);
  std::istringstream in(csv(t));
  CHECK(read_results_csv(in).rows[0].record->runtime_ms >= 0);
}

TEST_CASE("float formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(20) == "20");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(plot_file_name(20, 0.05) == "plot_snr20_eta0.05.csv");
  CHECK(plot_file_name(std::numeric_limits<double>::infinity(), std::nullopt) == "plot_snrinf_unfiltered.csv");
}

TEST_CASE("sweep emits one plot file per snr and eta") {
  auto c = small_config();
  c.F_list = {2, 5};
  c.snr_list = {100, 20, 10};
  c.eta_list = {0.0, 0.05};
  c.algorithms = {Algorithm::omp, Algorithm::bloomp};
  c.trials = 2;
  const auto t = sweep_superresolution_factor(c);
  const auto dir = scratch_dir("sweep");
  const auto files = emit_results(t, dir);
  int plots = 0;
  for (const auto& f : files) plots += f.filename().string().rfind("plot_", 0) == 0 ? 1 : 0;
  CHECK(plots == 6);
  std::ifstream plot(dir / "plot_snr20_eta0.05.csv");
  std::string header, line;
  std::getline(plot, header);
  CHECK(header == "F,algorithm,median_error,q25,q75");
  int lines = 0;
  while (std::getline(plot, line)) ++lines;
  CHECK(lines == 4);  // 2 F x 2 algorithms
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep needs two factors and matches run_experiment") {
  auto c = small_config();
  CHECK_THROWS_AS(sweep_superresolution_factor(c), Error);
  c.F_list = {2, 4};
  CHECK(csv(sweep_superresolution_factor(c)) == csv(run_experiment(c)));
}

TEST_CASE("positions are comparable across F") {
  // The same continuous draw is snapped for every F, so at noiseless F=1
  // and F=2 the recovered supports sit at the same positions in ell.
  auto c = small_config();
  c.F_list = {1, 2};
  c.snr_list = {std::numeric_limits<double>::infinity()};
  c.algorithms = {Algorithm::omp};
  c.trials = 1;
  c.placement.min_sep = 6;
  const auto t = run_experiment(c);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].record->unfiltered_rel_error < 1e-8);
}

TEST_CASE("power-law exponent fits") {
  const std::vector<double> f{2, 5, 10, 25, 50};
  std::vector<double> e;
  for (double v : f) e.push_back(0.01 * v * v);
  CHECK(estimate_pla_exponent(e, f) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::abs(estimate_pla_exponent({0.3, 0.3, 0.3, 0.3, 0.3}, f)) < 1e-12);
  Rng rng(2024);
  std::normal_distribution<double> noise(0, 0.05);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> noisy;
    for (double v : f) noisy.push_back(0.002 * std::pow(v, 1.5) * (1 + noise(rng)));
    const double alpha = estimate_pla_exponent(noisy, f);
    CHECK(std::abs(alpha - 1.5) < 0.2);
    CHECK(alpha == doctest::Approx(oracle::loglog_slope(noisy, f)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(estimate_pla_exponent({0.1, 0.0}, {1, 2}), Error);
  CHECK_THROWS_AS(estimate_pla_exponent({0.1}, {1}), Error);
  CHECK_THROWS_AS(estimate_pla_exponent({0.1, 0.2}, {1, 2, 3}), Error);
}

TEST_CASE("fit_pla reads back sweep output") {
  auto c = small_config();
  c.F_list = {2, 4, 8};
  c.algorithms = {Algorithm::omp};
  c.eta_list = {0.5};
  c.trials = 2;
  const auto t = sweep_superresolution_factor(c);
  std::istringstream in(csv(t));
  const auto fits = fit_pla(read_results_csv(in));
  REQUIRE(fits.size() == 2);  // unfiltered and eta 0.5
  for (const auto& fit : fits) CHECK(fit.points == 3);
}

TEST_CASE("malformed results csv is rejected") {
  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_results_csv(bad_header), Error);
  std::istringstream short_row(
      "trial,algorithm,F,snr,unfiltered_rel_error,relative_residual,bottleneck_ell,hausdorff_ell,runtime_ms,flags\n"
      "0,omp,1\n");
  CHECK_THROWS_AS(read_results_csv(short_row), Error);
  CHECK_THROWS_AS(read_results_csv(std::filesystem::path("/nonexistent/results.csv")), Error);
}
