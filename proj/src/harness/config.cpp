#include "superres/harness/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace superres::harness {

using nlohmann::json;

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::omp:
      return "omp";
    case Algorithm::bloomp:
      return "bloomp";
    case Algorithm::bp:
      return "bp";
    case Algorithm::bp_blot:
      return "bp_blot";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::omp, Algorithm::bloomp, Algorithm::bp, Algorithm::bp_blot})
    if (to_string(a) == name) return a;
  throw Error(ErrorCode::config_error, "unknown algorithm '" + std::string(name) + "'");
}

double Placement::effective_min_sep() const {
  if (kind == Kind::random) return min_sep;
  std::vector<double> p = positions;
  std::sort(p.begin(), p.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < p.size(); ++i) gap = std::min(gap, p[i] - p[i - 1]);
  return gap;
}

BpdnSettings<double> BpdnConfig::settings(double noise_norm) const {
  BpdnSettings<double> s;
  s.epsilon = epsilon_multiplier * noise_norm;
  s.max_iterations = max_iterations;
  s.primal_tol = primal_tol;
  s.dual_tol = dual_tol;
  s.penalty = penalty;
  return s;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::config_error, what); };
  if (m < 1) fail("m must be >= 1");
  if (F_list.empty()) fail("F_list must be nonempty");
  for (Index f : F_list)
    if (f < 1) fail("every F must be an integer >= 1");
  if (s < 1 || s > m) fail("s must be in [1, m]");
  if (trials < 1) fail("trials must be >= 1");
  if (algorithms.empty()) fail("algorithms must be nonempty");
  if (snr_list.empty()) fail("snr_list must be nonempty");
  for (double snr : snr_list)
    if (!(snr > 0)) fail("every snr must be positive (or \"inf\")");
  for (double eta : eta_list)
    if (!(eta >= 0)) fail("every eta must be >= 0");
  if (band_radius && !(*band_radius > 0)) fail("band_radius must be \"auto\" or a positive number");
  if (placement.kind == Placement::Kind::random) {
    if (!(placement.min_sep > 0)) fail("placement.min_sep must be > 0");
  } else {
    if (static_cast<Index>(placement.positions.size()) != s) fail("placement.positions must list exactly s positions");
    std::set<double> distinct(placement.positions.begin(), placement.positions.end());
    if (distinct.size() != placement.positions.size()) fail("placement.positions must be distinct");
    for (double p : placement.positions)
      if (p < 0 || p >= static_cast<double>(m)) fail("placement.positions must lie in [0, m)");
  }
  amplitude_model.validate();
  bpdn.settings(0.0).validate();
  if (!(bpdn.epsilon_multiplier >= 0)) fail("bpdn.epsilon_multiplier must be >= 0");
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::config_error, where + " must be an object");
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw Error(ErrorCode::config_error, "unknown key '" + item.key() + "' in " + where);
  }
}

double parse_snr(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::config_error, "snr must be a number or \"inf\", got \"" + s + "\"");
  }
  return v.get<double>();
}

// Integer fields must hold JSON integers; nlohmann would truncate 2.5 to 2.
void require_integers(const json& v, const std::string& what) {
  const bool ok = v.is_array() ? std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_integer(); })
                               : v.is_number_integer();
  if (!ok) throw Error(ErrorCode::config_error, what + " must be an integer");
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  if constexpr (std::is_same_v<T, Index> || std::is_same_v<T, std::uint64_t> || std::is_same_v<T, int> ||
                std::is_same_v<T, std::vector<Index>>)
    require_integers(obj.at(key), where + "." + key);
  if constexpr (std::is_same_v<T, std::uint64_t>)
    if (!obj.at(key).is_number_unsigned()) throw Error(ErrorCode::config_error, where + "." + key + " must be >= 0");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, where + "." + key + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_error, std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"m", "F_list", "s", "placement", "amplitude_model", "snr_list", "algorithms", "eta_list",
                  "band_radius", "trials", "master_seed", "bpdn", "record_runtime"},
                 "config");
  ExperimentConfig c;
  const std::string root = "config";
  if (doc.contains("m")) c.m = get<Index>(doc, "m", root);
  if (doc.contains("F_list")) c.F_list = get<std::vector<Index>>(doc, "F_list", root);
  if (doc.contains("s")) c.s = get<Index>(doc, "s", root);
  if (doc.contains("trials")) c.trials = get<Index>(doc, "trials", root);
  if (doc.contains("master_seed")) c.master_seed = get<std::uint64_t>(doc, "master_seed", root);
  if (doc.contains("record_runtime")) c.record_runtime = get<bool>(doc, "record_runtime", root);
  if (doc.contains("eta_list")) c.eta_list = get<std::vector<double>>(doc, "eta_list", root);
  if (doc.contains("snr_list")) {
    c.snr_list.clear();
    for (const auto& v : doc.at("snr_list")) c.snr_list.push_back(parse_snr(v));
  }
  if (doc.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto& v : doc.at("algorithms")) c.algorithms.push_back(parse_algorithm(v.get<std::string>()));
  }
  if (doc.contains("band_radius")) {
    const auto& v = doc.at("band_radius");
    if (v.is_string() && v.get<std::string>() == "auto") {
      c.band_radius.reset();
    } else if (v.is_number()) {
      c.band_radius = v.get<double>();
    } else {
      throw Error(ErrorCode::config_error, "band_radius must be \"auto\" or a number (Rayleigh units)");
    }
  }
  if (doc.contains("placement")) {
    const auto& p = doc.at("placement");
    reject_unknown(p, {"kind", "min_sep", "positions"}, "placement");
    const auto kind = get<std::string>(p, "kind", "placement");
    if (kind == "random") {
      c.placement.kind = Placement::Kind::random;
      if (p.contains("positions")) throw Error(ErrorCode::config_error, "placement.positions needs kind \"explicit\"");
      if (p.contains("min_sep")) c.placement.min_sep = get<double>(p, "min_sep", "placement");
    } else if (kind == "explicit") {
      c.placement.kind = Placement::Kind::explicit_positions;
      if (p.contains("min_sep")) throw Error(ErrorCode::config_error, "placement.min_sep needs kind \"random\"");
      c.placement.positions = get<std::vector<double>>(p, "positions", "placement");
    } else {
      throw Error(ErrorCode::config_error, "placement.kind must be \"random\" or \"explicit\"");
    }
  }
  if (doc.contains("amplitude_model")) {
    const auto& a = doc.at("amplitude_model");
    reject_unknown(a, {"phase", "min_magnitude", "max_magnitude"}, "amplitude_model");
    if (a.contains("phase")) {
      const auto phase = get<std::string>(a, "phase", "amplitude_model");
      if (phase == "random") {
        c.amplitude_model.phase = AmplitudeModel::Phase::random;
      } else if (phase == "positive_real") {
        c.amplitude_model.phase = AmplitudeModel::Phase::positive_real;
      } else {
        throw Error(ErrorCode::config_error, "amplitude_model.phase must be \"random\" or \"positive_real\"");
      }
    }
    if (a.contains("min_magnitude"))
      c.amplitude_model.min_magnitude = get<double>(a, "min_magnitude", "amplitude_model");
    if (a.contains("max_magnitude"))
      c.amplitude_model.max_magnitude = get<double>(a, "max_magnitude", "amplitude_model");
  }
  if (doc.contains("bpdn")) {
    const auto& b = doc.at("bpdn");
    reject_unknown(b, {"epsilon_multiplier", "max_iterations", "primal_tol", "dual_tol", "penalty"}, "bpdn");
    if (b.contains("epsilon_multiplier")) c.bpdn.epsilon_multiplier = get<double>(b, "epsilon_multiplier", "bpdn");
    if (b.contains("max_iterations")) c.bpdn.max_iterations = get<int>(b, "max_iterations", "bpdn");
    if (b.contains("primal_tol")) c.bpdn.primal_tol = get<double>(b, "primal_tol", "bpdn");
    if (b.contains("dual_tol")) c.bpdn.dual_tol = get<double>(b, "dual_tol", "bpdn");
    if (b.contains("penalty")) c.bpdn.penalty = get<double>(b, "penalty", "bpdn");
  }
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::config_error, e.what());
  }
  return c;
}

std::string dump_config(const ExperimentConfig& c) {
  json snr = json::array();
  for (double v : c.snr_list) snr.push_back(std::isinf(v) ? json("inf") : json(v));
  json algorithms = json::array();
  for (Algorithm a : c.algorithms) algorithms.push_back(std::string(to_string(a)));
  json placement = c.placement.kind == Placement::Kind::random
                       ? json{{"kind", "random"}, {"min_sep", c.placement.min_sep}}
                       : json{{"kind", "explicit"}, {"positions", c.placement.positions}};
  const json doc{{"m", c.m},
                 {"F_list", c.F_list},
                 {"s", c.s},
                 {"placement", placement},
                 {"amplitude_model",
                  {{"phase", c.amplitude_model.phase == AmplitudeModel::Phase::random ? "random" : "positive_real"},
                   {"min_magnitude", c.amplitude_model.min_magnitude},
                   {"max_magnitude", c.amplitude_model.max_magnitude}}},
                 {"snr_list", snr},
                 {"algorithms", algorithms},
                 {"eta_list", c.eta_list},
                 {"band_radius", c.band_radius ? json(*c.band_radius) : json("auto")},
                 {"trials", c.trials},
                 {"master_seed", c.master_seed},
                 {"bpdn",
                  {{"epsilon_multiplier", c.bpdn.epsilon_multiplier},
                   {"max_iterations", c.bpdn.max_iterations},
                   {"primal_tol", c.bpdn.primal_tol},
                   {"dual_tol", c.bpdn.dual_tol},
                   {"penalty", c.bpdn.penalty}}},
                 {"record_runtime", c.record_runtime}};
  return doc.dump(2);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace superres::harness
