#include "superres/harness/results_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace superres::harness {

namespace {

const std::vector<std::string> kFullHeader{"trial",
                                           "algorithm",
                                           "F",
                                           "snr",
                                           "eta",
                                           "unfiltered_rel_error",
                                           "filtered_rel_error",
                                           "relative_residual",
                                           "bottleneck_ell",
                                           "hausdorff_ell",
                                           "runtime_ms",
                                           "flags"};

std::vector<std::string> header_for(bool with_eta) {
  std::vector<std::string> h;
  for (const auto& c : kFullHeader)
    if (with_eta || (c != "eta" && c != "filtered_rel_error")) h.push_back(c);
  return h;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string short_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& column) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw Error(ErrorCode::io_error, "results csv: bad number '" + s + "' in column " + column);
  return v;
}

void check_stream(const std::ostream& out, const std::filesystem::path& path) {
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path.string());
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_results_csv(const ResultTable& table, std::ostream& out) {
  const bool with_eta = !table.eta_list.empty();
  out << join(header_for(with_eta), ',') << '\n';
  for (const auto& row : table.rows) {
    auto line = [&](std::optional<double> eta) {
      std::vector<std::string> f;
      f.push_back(std::to_string(row.trial));
      f.emplace_back(to_string(row.algorithm));
      f.push_back(std::to_string(row.F));
      f.push_back(format_double(row.snr));
      if (eta) f.push_back(format_double(*eta));
      if (row.record) {
        const auto& r = *row.record;
        f.push_back(format_double(r.unfiltered_rel_error));
        if (eta) f.push_back(format_double(r.filtered_rel_errors.at(*eta)));
        f.push_back(format_double(r.relative_residual));
        f.push_back(r.bottleneck ? format_double(*r.bottleneck) : "");
        f.push_back(format_double(r.hausdorff));
        f.push_back(table.record_runtime ? format_double(r.runtime_ms) : "");
      } else {
        for (int i = 0; i < (eta ? 6 : 5); ++i) f.emplace_back();
      }
      f.push_back(join(row.flags, ';'));
      out << join(f, ',') << '\n';
    };
    if (with_eta) {
      for (double eta : table.eta_list) line(eta);
    } else {
      line(std::nullopt);
    }
  }
}

void write_aggregates_csv(const ResultTable& table, std::ostream& out) {
  out << "algorithm,F,snr,metric,eta,count,median,mean,q25,q75\n";
  for (const auto& a : table.aggregates) {
    out << to_string(a.algorithm) << ',' << a.F << ',' << format_double(a.snr) << ',' << to_string(a.metric) << ','
        << (a.eta ? format_double(*a.eta) : "") << ',' << a.count << ',' << format_double(a.median) << ','
        << format_double(a.mean) << ',' << format_double(a.q25) << ',' << format_double(a.q75) << '\n';
  }
}

std::string plot_file_name(double snr, std::optional<double> eta) {
  return "plot_snr" + short_number(snr) + "_" + (eta ? "eta" + short_number(*eta) : std::string("unfiltered")) + ".csv";
}

void write_plot_csv(const ResultTable& table, double snr, std::optional<double> eta, std::ostream& out) {
  out << "F,algorithm,median_error,q25,q75\n";
  std::vector<const AggregateRow*> series;
  for (const auto& a : table.aggregates) {
    if (a.snr != snr) continue;
    const bool wanted = eta ? (a.metric == Metric::filtered && a.eta == eta) : a.metric == Metric::unfiltered;
    if (wanted) series.push_back(&a);
  }
  std::stable_sort(series.begin(), series.end(), [](const AggregateRow* a, const AggregateRow* b) {
    return std::tie(a->F, a->algorithm) < std::tie(b->F, b->algorithm);
  });
  for (const AggregateRow* a : series) {
    out << a->F << ',' << to_string(a->algorithm) << ',' << format_double(a->median) << ',' << format_double(a->q25)
        << ',' << format_double(a->q75) << '\n';
  }
}

std::vector<std::filesystem::path> emit_results(const ResultTable& table, const std::filesystem::path& dir) {
  require(!table.rows.empty(), ErrorCode::invalid_argument, "emit_results: empty result table");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, auto&& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
    body(out);
    out.flush();
    check_stream(out, path);
    written.push_back(path);
  };
  write(dir / "results.csv", [&](std::ostream& o) { write_results_csv(table, o); });
  write(dir / "aggregates.csv", [&](std::ostream& o) { write_aggregates_csv(table, o); });

  std::vector<double> snrs;
  for (const auto& r : table.rows) snrs.push_back(r.snr);
  std::sort(snrs.begin(), snrs.end());
  snrs.erase(std::unique(snrs.begin(), snrs.end()), snrs.end());
  std::vector<std::optional<double>> etas;
  if (table.eta_list.empty()) etas.emplace_back();
  for (double eta : table.eta_list) etas.emplace_back(eta);
  for (double snr : snrs)
    for (const auto& eta : etas)
      write(dir / plot_file_name(snr, eta), [&](std::ostream& o) { write_plot_csv(table, snr, eta, o); });
  return written;
}

std::filesystem::path emit_metadata(const ExperimentConfig& config, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());
  const nlohmann::json meta{
      {"config", nlohmann::json::parse(dump_config(config))},
      {"conventions",
       {{"error_normalization", "relative l2: ||filter(x_hat) - filter(x)||_2 / ||filter(x)||_2"},
        {"filter_kernel", "tent, half-width eta, unit sum, zero-padded"},
        {"eta_rounding", "eta_fine = floor(eta * F + 0.5); eta_collapsed flag when a positive eta rounds to 0"},
        {"distances", "bottleneck_ell and hausdorff_ell in Rayleigh units; bottleneck empty if support sizes differ"},
        {"bpdn_epsilon", "epsilon_multiplier * realized ||e||_2"},
        {"seeds",
         "SplitMix64 chain from master_seed: instance (1, trial), noise (2, trial, F index, snr index); "
         "indices into the sorted F_list and snr_list"}}}};
  const auto path = dir / "metadata.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out << meta.dump(2) << '\n';
  out.flush();
  check_stream(out, path);
  return path;
}

ParsedResults read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::io_error, "results csv: missing header");
  const auto header = split(line, ',');
  bool with_eta = false;
  if (header == header_for(true)) {
    with_eta = true;
  } else if (header != header_for(false)) {
    throw Error(ErrorCode::io_error, "results csv: unrecognized header '" + line + "'");
  }
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

  ParsedResults out;
  bool first_group = true;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size())
      throw Error(ErrorCode::io_error, "results csv: line " + std::to_string(line_no) + " has " +
                                           std::to_string(f.size()) + " fields, expected " +
                                           std::to_string(header.size()));
    auto field = [&](const char* name) -> const std::string& { return f[col.at(name)]; };
    ResultRow key;
    key.trial = std::stoll(field("trial"));
    key.algorithm = parse_algorithm(field("algorithm"));
    key.F = std::stoll(field("F"));
    key.snr = parse_double(field("snr"), "snr");

    const bool same_key = !out.rows.empty() && out.rows.back().trial == key.trial &&
                          out.rows.back().algorithm == key.algorithm && out.rows.back().F == key.F &&
                          out.rows.back().snr == key.snr;
    if (!same_key) {
      if (!out.rows.empty()) first_group = false;
      if (!field("unfiltered_rel_error").empty()) {
        EvaluationRecord r;
        r.unfiltered_rel_error = parse_double(field("unfiltered_rel_error"), "unfiltered_rel_error");
        r.relative_residual = parse_double(field("relative_residual"), "relative_residual");
        if (!field("bottleneck_ell").empty()) r.bottleneck = parse_double(field("bottleneck_ell"), "bottleneck_ell");
        r.hausdorff = parse_double(field("hausdorff_ell"), "hausdorff_ell");
        if (!field("runtime_ms").empty()) r.runtime_ms = parse_double(field("runtime_ms"), "runtime_ms");
        key.record = r;
      }
      if (!field("flags").empty()) key.flags = split(field("flags"), ';');
      for (const auto& flag : key.flags)
        if (flag.rfind("error:", 0) == 0) key.error = flag.substr(6);
      out.rows.push_back(std::move(key));
    }
    if (with_eta) {
      const double eta = parse_double(field("eta"), "eta");
      if (first_group) out.eta_list.push_back(eta);
      auto& row = out.rows.back();
      if (row.record)
        row.record->filtered_rel_errors[eta] = parse_double(field("filtered_rel_error"), "filtered_rel_error");
    }
  }
  return out;
}

ParsedResults read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  try {
    return read_results_csv(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<PlaFit> fit_pla(const ParsedResults& results) {
  const auto aggs = aggregate(results.rows, results.eta_list);
  struct Series {
    std::vector<double> factors, errors;
  };
  std::map<std::tuple<Algorithm, double, double>, Series> series;  // eta NaN-free key: -1 = unfiltered
  for (const auto& a : aggs) {
    if (a.metric != Metric::unfiltered && a.metric != Metric::filtered) continue;
    if (!(a.median > 0) || !std::isfinite(a.median)) continue;
    auto& s = series[{a.algorithm, a.snr, a.eta ? *a.eta : -1.0}];
    s.factors.push_back(static_cast<double>(a.F));
    s.errors.push_back(a.median);
  }
  std::vector<PlaFit> out;
  for (const auto& [key, s] : series) {
    if (s.factors.size() < 2) continue;
    const auto& [alg, snr, eta] = key;
    out.push_back({alg, snr, eta < 0 ? std::nullopt : std::optional<double>(eta),
                   estimate_pla_exponent(s.errors, s.factors), static_cast<Index>(s.factors.size())});
  }
  return out;
}

}  // namespace superres::harness
