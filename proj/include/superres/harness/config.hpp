#ifndef SUPERRES_HARNESS_CONFIG_HPP
#define SUPERRES_HARNESS_CONFIG_HPP

#include "superres/model.hpp"
#include "superres/solvers/bpdn.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace superres::harness {

enum class Algorithm { omp, bloomp, bp, bp_blot };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct Placement {
  enum class Kind { random, explicit_positions };
  Kind kind = Kind::random;
  double min_sep = 4.0;           // random: Rayleigh units
  std::vector<double> positions;  // explicit: Rayleigh units

  /// Minimum separation the band radius rule should assume.
  double effective_min_sep() const;
};

struct BpdnConfig {
  double epsilon_multiplier = 1.0;  // epsilon = multiplier * realized ||e||
  int max_iterations = 5000;
  double primal_tol = 1e-6;
  double dual_tol = 1e-6;
  double penalty = 1.0;

  BpdnSettings<double> settings(double noise_norm) const;
};

/// Declarative description of a trial batch. Field names match the keys
/// of the JSON config document.
struct ExperimentConfig {
  Index m = 150;
  std::vector<Index> F_list{50};
  Index s = 20;
  Placement placement;
  AmplitudeModel amplitude_model;
  std::vector<double> snr_list{20.0};
  std::vector<Algorithm> algorithms{Algorithm::omp, Algorithm::bloomp, Algorithm::bp, Algorithm::bp_blot};
  std::vector<double> eta_list{0.1};
  std::optional<double> band_radius;  // Rayleigh units; empty means auto
  Index trials = 10;
  std::uint64_t master_seed = 1;
  BpdnConfig bpdn;
  // Fill runtime_ms in the results CSV (makes output run-dependent).
  bool record_runtime = false;

  void validate() const;
};

/// Parse a JSON config document. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// JSON document that parse_config reads back to an equal config.
std::string dump_config(const ExperimentConfig& config);

/// Default F grid for sweeps when the config does not list one.
inline const std::vector<Index> kDefaultSweepFactors{2, 5, 10, 15, 20, 25, 30, 40, 50};

}  // namespace superres::harness

#endif  // SUPERRES_HARNESS_CONFIG_HPP
