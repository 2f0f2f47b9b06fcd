#ifndef RPNSHOOT_CONFIG_HPP
#define RPNSHOOT_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rpnshoot/curvature.hpp"
#include "rpnshoot/errors.hpp"
#include "rpnshoot/params.hpp"
#include "rpnshoot/solver.hpp"

namespace rpnshoot {

struct ScanSpec {
  double lambda_min = 1e-3;
  double lambda_max = 1e3;
  int points = 41;
  bool log_spaced = true;

  std::vector<double> grid() const {
    if (points < 1 || !(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
      throw config_error("scan range must satisfy 0 < lambda_min < lambda_max "
                         "with at least one point");
    }
    std::vector<double> g;
    g.reserve(points);
    if (points == 1) {
      g.push_back(lambda_min);
      return g;
    }
    for (int i = 0; i < points; ++i) {
      double t = static_cast<double>(i) / (points - 1);
      g.push_back(log_spaced
                      ? lambda_min * std::pow(lambda_max / lambda_min, t)
                      : lambda_min + (lambda_max - lambda_min) * t);
    }
    return g;
  }
};

/// Run configuration. Defaults are deterministic: the curvature defaults to
/// the constant profile K0 = n(n-2) (the normalization whose gluing root is
/// lambda = 1), the scan to 41 log-spaced points on [1e-3, 1e3].
struct RunConfig {
  int n = 4;
  std::optional<CurvatureProfile> curvature;  // filled from n when absent
  SolverOptions solver;
  ScanSpec scan;
  std::string output_dir = ".";
  std::uint64_t seed = 0;

  CurvatureProfile profile() const {
    if (curvature) return *curvature;
    return CurvatureProfile::constant(static_cast<double>(n) * (n - 2), true);
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> allowed,
                                const std::string& scope) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw config_error("unknown " + scope + " key \"" + item.key() + "\"");
    }
  }
}

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error("config key \"" + key + "\" has the wrong type");
  }
}

inline SolverOptions parse_solver(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"rel_tol", "abs_tol", "r_start", "blowup_threshold",
                       "zero_tol", "max_steps", "continue_past_zero"},
                      "solver");
  SolverOptions opts;
  opts.rel_tol = get_as<double>(j, "rel_tol", opts.rel_tol);
  opts.abs_tol = get_as<double>(j, "abs_tol", opts.abs_tol);
  if (j.contains("r_start")) opts.r_start = get_as<double>(j, "r_start", 0.0);
  if (j.contains("blowup_threshold")) {
    opts.blowup_threshold = get_as<double>(j, "blowup_threshold", 0.0);
  }
  opts.zero_tol = get_as<double>(j, "zero_tol", opts.zero_tol);
  opts.max_steps = get_as<long>(j, "max_steps", opts.max_steps);
  opts.continue_past_zero =
      get_as<bool>(j, "continue_past_zero", opts.continue_past_zero);
  opts.validate();
  return opts;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw config_error("config must be a JSON object");
  }
  detail::reject_unknown_keys(
      j, {"n", "curvature", "solver", "scan", "output_dir", "seed"}, "config");
  RunConfig cfg;
  cfg.n = detail::get_as<int>(j, "n", cfg.n);
  if (cfg.n < 3) {
    throw config_error("config requires n >= 3");
  }
  if (j.contains("curvature")) {
    cfg.curvature = CurvatureProfile::from_json(j.at("curvature"));
  }
  if (j.contains("solver")) {
    cfg.solver = detail::parse_solver(j.at("solver"));
  }
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    detail::reject_unknown_keys(
        s, {"lambda_min", "lambda_max", "points", "log_spaced"}, "scan");
    cfg.scan.lambda_min =
        detail::get_as<double>(s, "lambda_min", cfg.scan.lambda_min);
    cfg.scan.lambda_max =
        detail::get_as<double>(s, "lambda_max", cfg.scan.lambda_max);
    cfg.scan.points = detail::get_as<int>(s, "points", cfg.scan.points);
    cfg.scan.log_spaced =
        detail::get_as<bool>(s, "log_spaced", cfg.scan.log_spaced);
  }
  cfg.output_dir = detail::get_as<std::string>(j, "output_dir", cfg.output_dir);
  cfg.seed = detail::get_as<std::uint64_t>(j, "seed", cfg.seed);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("cannot open config file " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace rpnshoot

#endif  // RPNSHOOT_CONFIG_HPP
