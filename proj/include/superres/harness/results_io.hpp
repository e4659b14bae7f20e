#ifndef SUPERRES_HARNESS_RESULTS_IO_HPP
#define SUPERRES_HARNESS_RESULTS_IO_HPP

#include "superres/harness/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace superres::harness {

/// 17 significant digits; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double v);

/// Long-form results: one line per (trial, algorithm, F, snr, eta). The
/// eta and filtered_rel_error columns are omitted when eta_list is empty.
void write_results_csv(const ResultTable& table, std::ostream& out);
void write_aggregates_csv(const ResultTable& table, std::ostream& out);

/// Plot series for one (snr, eta) pair: F, algorithm, median, q25, q75 of
/// the filtered error (unfiltered when eta is empty).
void write_plot_csv(const ResultTable& table, double snr, std::optional<double> eta, std::ostream& out);
std::string plot_file_name(double snr, std::optional<double> eta);

/// Write results.csv, aggregates.csv and every plot-data file into dir.
/// Returns the paths written.
std::vector<std::filesystem::path> emit_results(const ResultTable& table, const std::filesystem::path& dir);

/// metadata.json: the effective config plus the conventions behind the
/// numbers (error normalization, kernel, eta rounding, seed derivation).
std::filesystem::path emit_metadata(const ExperimentConfig& config, const std::filesystem::path& dir);

/// Rows and eta list recovered from a results CSV. Runtimes are not
/// restored when the column is empty.
struct ParsedResults {
  std::vector<double> eta_list;
  std::vector<ResultRow> rows;
};
ParsedResults read_results_csv(std::istream& in);
ParsedResults read_results_csv(const std::filesystem::path& path);

/// Exponent fits per (algorithm, snr, eta) from median errors across F.
struct PlaFit {
  Algorithm algorithm;
  double snr;
  std::optional<double> eta;
  double exponent;
  Index points;
};
std::vector<PlaFit> fit_pla(const ParsedResults& results);

}  // namespace superres::harness

#endif  // SUPERRES_HARNESS_RESULTS_IO_HPP
