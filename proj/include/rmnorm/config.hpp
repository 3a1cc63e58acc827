#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmnorm/ensembles.hpp"
#include "rmnorm/error.hpp"
#include "rmnorm/linalg.hpp"
#include "rmnorm/matrix_io.hpp"
#include "rmnorm/orlicz.hpp"
#include "rmnorm/rng.hpp"

namespace rmnorm {

enum class ReportFormat { csv, json };

inline const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names = {"tnorm-sandwich", "net-bound", "gaussian-tail", "one-dim",
                                                 "expectation-bound",         "tail-bound", "col-floor",   "row-floor"};
  return names;
}

// One experiment definition. Every field has a default; a JSON config may set
// any subset of them and nothing else.
struct ExperimentConfig {
  std::vector<std::string> families = {"identity", "all-ones", "product", "circulant", "sparse"};
  std::vector<std::size_t> sizes = {4, 16, 64};
  std::vector<EnsembleSpec> ensembles;
  std::vector<EntryDistribution> distributions = {EntryDistribution::gaussian()};
  std::size_t samples = 5000;
  std::size_t tail_samples = 10000;
  std::uint64_t seed = 1;
  double rel_tol = default_singular_rel_tol;
  double orlicz_rel_tol = default_orlicz_rel_tol;
  double quad_tol = default_quad_tol;
  double threshold_scale = 1.0; // multiplies the tail threshold (negative controls)
  std::size_t workers = 0;
  std::vector<std::string> checks; // empty: every verify check
  std::string out;                 // empty: stdout
  ReportFormat format = ReportFormat::csv;
};

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv")
    return ReportFormat::csv;
  if (s == "json")
    return ReportFormat::json;
  throw ConfigError("format must be csv or json, got '" + std::string(s) + "'");
}

namespace detail {

template <class T>
T config_get(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

inline std::size_t config_count(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_unsigned())
    throw ConfigError("config key '" + key + "' must be a nonnegative integer");
  return j.get<std::size_t>();
}

inline double config_real(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number())
    throw ConfigError("config key '" + key + "' must be a number");
  return j.get<double>();
}

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

inline EnsembleSpec parse_ensemble(const nlohmann::json& j, std::uint64_t default_seed) {
  if (!j.is_object())
    throw ConfigError("each ensemble must be an object");
  reject_unknown(j,
                 {"family", "name", "n", "m", "diag", "left", "right", "symbol", "circulant", "bandwidth", "sparsity",
                  "decay", "path", "format", "seed"},
                 "ensemble");
  if (!j.contains("family") || !j["family"].is_string())
    throw ConfigError("ensemble needs a 'family' string");
  const auto family = j["family"].get<std::string>();
  const std::size_t n = j.contains("n") ? config_count(j["n"], "n") : 1;
  EnsembleSpec s;
  try {
    if (family == "file") {
      s.family = Family::file;
      s.name = "file";
    } else {
      s = preset_ensemble(family, n, default_seed);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  s.rows = n;
  if (j.contains("name"))
    s.name = config_get<std::string>(j["name"], "name");
  if (j.contains("m"))
    s.cols = config_count(j["m"], "m");
  if (j.contains("diag"))
    s.diag = config_get<RealVector>(j["diag"], "diag");
  if (j.contains("left"))
    s.left = config_get<RealVector>(j["left"], "left");
  if (j.contains("right"))
    s.right = config_get<RealVector>(j["right"], "right");
  if (j.contains("symbol"))
    s.symbol = config_get<RealVector>(j["symbol"], "symbol");
  if (j.contains("circulant"))
    s.circulant = config_get<bool>(j["circulant"], "circulant");
  if (j.contains("bandwidth"))
    s.bandwidth = config_count(j["bandwidth"], "bandwidth");
  if (j.contains("sparsity"))
    s.sparsity = config_real(j["sparsity"], "sparsity");
  if (j.contains("decay"))
    s.decay = config_real(j["decay"], "decay");
  if (j.contains("path"))
    s.path = config_get<std::string>(j["path"], "path");
  if (j.contains("format")) {
    try {
      s.format = parse_matrix_format(config_get<std::string>(j["format"], "format"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (!s.path.empty()) {
    s.format = matrix_format_for(s.path);
  }
  if (j.contains("seed"))
    s.seed = config_count(j["seed"], "seed");
  try {
    validate(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

} // namespace detail

/// Checks ranges and names; throws ConfigError.
inline void validate(const ExperimentConfig& c) {
  if (c.samples < 2)
    throw ConfigError("samples must be at least 2");
  if (c.tail_samples < 1)
    throw ConfigError("tail_samples must be at least 1");
  if (!(c.rel_tol > 0.0) || !(c.orlicz_rel_tol > 0.0) || !(c.quad_tol > 0.0))
    throw ConfigError("tolerances must be positive");
  if (!(c.threshold_scale > 0.0))
    throw ConfigError("threshold_scale must be positive");
  for (std::size_t n : c.sizes)
    if (n == 0)
      throw ConfigError("sizes must be at least 1");
  for (const auto& f : c.families) {
    try {
      (void)preset_ensemble(f, 1);
    } catch (const std::invalid_argument&) {
      throw ConfigError("unknown family '" + f + "'");
    }
  }
  for (const auto& chk : c.checks) {
    const auto& names = verify_check_names();
    if (std::find(names.begin(), names.end(), chk) == names.end())
      throw ConfigError("unknown check '" + chk + "'");
  }
  if (c.distributions.empty())
    throw ConfigError("at least one distribution is required");
}

/// Parses a JSON config document. Unknown keys are errors.
inline ExperimentConfig parse_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("config must be a JSON object");
  detail::reject_unknown(j,
                         {"families", "sizes", "ensembles", "distributions", "samples", "tail_samples", "seed",
                          "rel_tol", "orlicz_rel_tol", "quad_tol", "threshold_scale", "workers", "checks", "out",
                          "format"},
                         "config");
  ExperimentConfig c;
  if (j.contains("seed"))
    c.seed = detail::config_count(j["seed"], "seed");
  if (j.contains("families"))
    c.families = detail::config_get<std::vector<std::string>>(j["families"], "families");
  if (j.contains("sizes")) {
    if (!j["sizes"].is_array())
      throw ConfigError("config key 'sizes' must be an array");
    c.sizes.clear();
    for (const auto& v : j["sizes"])
      c.sizes.push_back(detail::config_count(v, "sizes"));
  }
  if (j.contains("ensembles")) {
    if (!j["ensembles"].is_array())
      throw ConfigError("config key 'ensembles' must be an array");
    for (const auto& e : j["ensembles"])
      c.ensembles.push_back(detail::parse_ensemble(e, c.seed));
  }
  if (j.contains("distributions")) {
    c.distributions.clear();
    for (const auto& name : detail::config_get<std::vector<std::string>>(j["distributions"], "distributions")) {
      try {
        c.distributions.push_back(parse_distribution(name));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (j.contains("samples"))
    c.samples = detail::config_count(j["samples"], "samples");
  if (j.contains("tail_samples"))
    c.tail_samples = detail::config_count(j["tail_samples"], "tail_samples");
  if (j.contains("rel_tol"))
    c.rel_tol = detail::config_real(j["rel_tol"], "rel_tol");
  if (j.contains("orlicz_rel_tol"))
    c.orlicz_rel_tol = detail::config_real(j["orlicz_rel_tol"], "orlicz_rel_tol");
  if (j.contains("quad_tol"))
    c.quad_tol = detail::config_real(j["quad_tol"], "quad_tol");
  if (j.contains("threshold_scale"))
    c.threshold_scale = detail::config_real(j["threshold_scale"], "threshold_scale");
  if (j.contains("workers"))
    c.workers = detail::config_count(j["workers"], "workers");
  if (j.contains("checks"))
    c.checks = detail::config_get<std::vector<std::string>>(j["checks"], "checks");
  if (j.contains("out"))
    c.out = detail::config_get<std::string>(j["out"], "out");
  if (j.contains("format"))
    c.format = parse_report_format(detail::config_get<std::string>(j["format"], "format"));
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  ExperimentConfig c = parse_config(text);
  // relative matrix paths are taken from the config file's directory
  for (auto& e : c.ensembles)
    if (e.family == Family::file && std::filesystem::path(e.path).is_relative())
      e.path = (path.parent_path() / e.path).string();
  return c;
}

} // namespace rmnorm
