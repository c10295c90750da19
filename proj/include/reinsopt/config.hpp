// JSON run configuration.
//
//   {
//     "utility":     {"kind": "sahara", "a": 1, "b": 1, "d": 0} | {"kind": "exponential", "beta": 0.5},
//     "market":      {"mu": 0.08, "sigma1": 0.5, "sigma2": 0.5},
//     "environment": {"muY": 0, "sigmaY": 0, "y0": 0},
//     "reinsurance": {"kind": "proportional", "p": 0.03, "q": 0.05, "sigma0": 0.5}
//                  | {"kind": "excess_of_loss", "theta": 0.2, "eta": 0.1},
//     "claims":      {"kind": "exponential", "lambda": 1} | {"kind": "pareto", "alpha": 3, "xm": 1}
//                  | {"kind": "tabulated", "points": [[0, 1], ...], "tail_rate": 1},
//     "state":       {"t": 0, "x": 1, "y": 0},
//     "sim":         {"T": 1, "dt": 0.001, "n_paths": 10000, "seed": 1, "workers": 0,
//                     "store_paths": false, "strategy": {...}, "compare": [{...}, ...]},
//     "sweep":       {"parameter": "sigma1", "from": 0, "to": 1.5, "points": 151},
//     "output":      {"csv": "out.csv", "svg": "out.svg"}
//   }
//
// Every section is optional; omitted values fall back to the Table 1 point
// (mu = 0.08, sigma1 = sigma2 = sigma0 = 0.5, q = 0.05, x = 1, a = b = 1, d = 0).
// Market/environment coefficients accept a number or
// {"kind": "affine", "c0", "c1", "lo", "hi"} / {"kind": "sigmoid", "lo", "hi", "center", "slope"}.
#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "reinsopt/simulate.hpp"

namespace reinsopt {

using json = nlohmann::json;

/// Invalid configuration; the message names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  std::string parameter;
  double from = 0.0;
  double to = 1.0;
  std::size_t points = 101;
};

struct OutputSpec {
  std::string csv;
  std::string svg;
};

struct RunConfig {
  Models models;
  StatePoint state;
  SimConfig sim;
  FeedbackStrategy strategy = OptimalRule{};
  std::vector<FeedbackStrategy> compare;
  std::optional<SweepSpec> sweep;
  OutputSpec output;
};

inline constexpr std::array<std::string_view, 11> kSweepParameters = {
    "sigma1", "sigma2", "sigma0", "q", "theta", "x", "a", "b", "d", "mu", "beta"};

/// Config path that a sweep parameter writes to.
inline std::string sweep_target(std::string_view name) {
  if (name == "sigma1" || name == "sigma2" || name == "mu") return "market." + std::string(name);
  if (name == "sigma0" || name == "q" || name == "theta") return "reinsurance." + std::string(name);
  if (name == "x") return "state.x";
  if (name == "a" || name == "b" || name == "d" || name == "beta") return "utility." + std::string(name);
  throw ConfigError("sweep.parameter: '" + std::string(name) +
                    "' is not one of sigma1, sigma2, sigma0, q, theta, x, a, b, d, mu, beta");
}

namespace detail {

inline void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(where + "." + k + ": unknown field");
  }
}

inline double num(const json& j, const std::string& where, std::string_view key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(std::string(key));
  if (!v.is_number()) throw ConfigError(where + "." + std::string(key) + ": expected a number");
  return v.get<double>();
}

inline double required_num(const json& j, const std::string& where, std::string_view key) {
  if (!j.contains(key)) throw ConfigError(where + "." + std::string(key) + ": required");
  return num(j, where, key, 0.0);
}

inline std::string str(const json& j, const std::string& where, std::string_view key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(std::string(key));
  if (!v.is_string()) throw ConfigError(where + "." + std::string(key) + ": expected a string");
  return v.get<std::string>();
}

inline Coefficient coefficient(const json& j, const std::string& where, std::string_view key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(std::string(key));
  const std::string path = where + "." + std::string(key);
  if (v.is_number()) return v.get<double>();
  if (!v.is_object()) throw ConfigError(path + ": expected a number or a coefficient object");
  const std::string kind = str(v, path, "kind", "constant");
  try {
    if (kind == "constant") {
      check_keys(v, path, {"kind", "value"});
      return ConstantCoef{required_num(v, path, "value")};
    }
    if (kind == "affine") {
      check_keys(v, path, {"kind", "c0", "c1", "lo", "hi"});
      return AffineCoef{required_num(v, path, "c0"), required_num(v, path, "c1"), required_num(v, path, "lo"),
                        required_num(v, path, "hi")};
    }
    if (kind == "sigmoid") {
      check_keys(v, path, {"kind", "lo", "hi", "center", "slope"});
      return SigmoidCoef{required_num(v, path, "lo"), required_num(v, path, "hi"), num(v, path, "center", 0.0),
                         num(v, path, "slope", 1.0)};
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ".kind: unknown coefficient kind '" + kind + "'");
}

inline std::size_t count(const json& j, const std::string& where, std::string_view key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const double v = num(j, where, key, 0.0);
  if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(where + "." + std::string(key) + ": expected a positive integer");
  return static_cast<std::size_t>(v);
}

inline FeedbackStrategy feedback(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "u", "a", "du", "da"});
  const std::string kind = str(j, where, "kind", "optimal");
  if (kind == "optimal") return OptimalRule{};
  if (kind == "constant") return ConstantControls{required_num(j, where, "u"), required_num(j, where, "a")};
  if (kind == "perturbed") return PerturbedRule{num(j, where, "du", 0.0), num(j, where, "da", 0.0)};
  if (kind == "fixed_retention") return FixedRetention{required_num(j, where, "u")};
  throw ConfigError(where + ".kind: unknown strategy kind '" + kind + "'");
}

inline ClaimDistribution claims(const json& root) {
  if (!root.contains("claims")) return ExponentialClaims{1.0};
  const json& j = root.at("claims");
  const std::string w = "claims";
  const std::string kind = str(j, w, "kind", "exponential");
  try {
    if (kind == "exponential") {
      check_keys(j, w, {"kind", "lambda"});
      return ExponentialClaims{num(j, w, "lambda", 1.0)};
    }
    if (kind == "pareto") {
      check_keys(j, w, {"kind", "alpha", "xm"});
      return ParetoClaims{required_num(j, w, "alpha"), num(j, w, "xm", 1.0)};
    }
    if (kind == "tabulated") {
      check_keys(j, w, {"kind", "points", "tail_rate"});
      if (!j.contains("points") || !j.at("points").is_array()) throw ConfigError("claims.points: expected an array");
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : j.at("points")) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
          throw ConfigError("claims.points: each point must be [z, Fbar]");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      return TabulatedClaims(std::move(pts), num(j, w, "tail_rate", 0.0));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("claims: ") + e.what());
  }
  throw ConfigError("claims.kind: unknown claim distribution '" + kind + "'");
}

}  // namespace detail

inline RunConfig parse_config(const json& root) {
  using namespace detail;
  if (root.is_null()) return parse_config(json::object());
  check_keys(root, "config",
             {"utility", "market", "environment", "reinsurance", "claims", "state", "sim", "sweep", "output"});
  RunConfig c;
  const json empty = json::object();
  auto section = [&](const char* k) -> const json& { return root.contains(k) ? root.at(k) : empty; };

  // utility
  {
    const json& j = section("utility");
    const std::string kind = str(j, "utility", "kind", "sahara");
    try {
      if (kind == "sahara") {
        check_keys(j, "utility", {"kind", "a", "b", "d"});
        c.models.utility = SaharaParams{num(j, "utility", "a", 1.0), num(j, "utility", "b", 1.0), num(j, "utility", "d", 0.0)};
      } else if (kind == "exponential") {
        check_keys(j, "utility", {"kind", "beta"});
        c.models.utility = ExponentialParams{required_num(j, "utility", "beta")};
      } else {
        throw ConfigError("utility.kind: unknown utility '" + kind + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  // market
  {
    const json& j = section("market");
    check_keys(j, "market", {"mu", "sigma1", "sigma2"});
    c.models.market.mu = coefficient(j, "market", "mu", 0.08);
    c.models.market.sigma1 = coefficient(j, "market", "sigma1", 0.5);
    c.models.market.sigma2 = coefficient(j, "market", "sigma2", 0.5);
    if (c.models.market.sigma1.lower() < 0.0) throw ConfigError("market.sigma1: must be >= 0");
    if (c.models.market.sigma2.lower() < 0.0) throw ConfigError("market.sigma2: must be >= 0");
  }
  // environment
  {
    const json& j = section("environment");
    check_keys(j, "environment", {"muY", "sigmaY", "y0"});
    c.models.environment.mu_y = coefficient(j, "environment", "muY", 0.0);
    c.models.environment.sigma_y = coefficient(j, "environment", "sigmaY", 0.0);
    c.models.environment.y0 = num(j, "environment", "y0", 0.0);
    try {
      c.models.environment.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  // claims are validated even when the reinsurance family does not use them
  const ClaimDistribution claims = detail::claims(root);
  // reinsurance
  {
    const json& j = section("reinsurance");
    const std::string kind = str(j, "reinsurance", "kind", "proportional");
    try {
      if (kind == "proportional") {
        check_keys(j, "reinsurance", {"kind", "p", "q", "sigma0"});
        Proportional p;
        p.q = coefficient(j, "reinsurance", "q", 0.05);
        // default p keeps the Table 1 ratio p/q = 0.6 so that q sweeps honour p < q
        p.p = p.q.is_constant() ? coefficient(j, "reinsurance", "p", 0.6 * p.q.constant())
                                : coefficient(j, "reinsurance", "p", 0.6 * p.q.lower());
        p.sigma0 = coefficient(j, "reinsurance", "sigma0", 0.5);
        c.models.reinsurance = p;
      } else if (kind == "excess_of_loss" || kind == "xl") {
        check_keys(j, "reinsurance", {"kind", "theta", "eta"});
        c.models.reinsurance = ExcessOfLoss{num(j, "reinsurance", "theta", 0.2), num(j, "reinsurance", "eta", 0.1),
                                            claims};
      } else {
        throw ConfigError("reinsurance.kind: unknown reinsurance '" + kind + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  // state
  {
    const json& j = section("state");
    check_keys(j, "state", {"t", "x", "y"});
    c.state = StatePoint{num(j, "state", "t", 0.0), num(j, "state", "x", 1.0),
                         num(j, "state", "y", c.models.environment.y0)};
  }
  // sim
  {
    const json& j = section("sim");
    check_keys(j, "sim", {"T", "dt", "n_paths", "seed", "workers", "store_paths", "strategy", "compare"});
    c.sim.horizon = num(j, "sim", "T", 1.0);
    c.sim.dt = num(j, "sim", "dt", 1e-3);
    c.sim.n_paths = count(j, "sim", "n_paths", 10000);
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ConfigError("sim.seed: expected an unsigned integer");
      c.sim.master_seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("workers")) {
      if (!j.at("workers").is_number_unsigned()) throw ConfigError("sim.workers: expected an unsigned integer");
      c.sim.workers = j.at("workers").get<unsigned>();
    }
    if (j.contains("store_paths")) {
      if (!j.at("store_paths").is_boolean()) throw ConfigError("sim.store_paths: expected a boolean");
      c.sim.store_paths = j.at("store_paths").get<bool>();
    }
    if (j.contains("strategy")) c.strategy = feedback(j.at("strategy"), "sim.strategy");
    if (j.contains("compare")) {
      if (!j.at("compare").is_array()) throw ConfigError("sim.compare: expected an array");
      std::size_t i = 0;
      for (const auto& s : j.at("compare")) c.compare.push_back(feedback(s, "sim.compare[" + std::to_string(i++) + "]"));
    }
    try {
      (void)c.sim.steps();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  // sweep
  if (root.contains("sweep")) {
    const json& j = root.at("sweep");
    check_keys(j, "sweep", {"parameter", "from", "to", "points"});
    SweepSpec s;
    s.parameter = str(j, "sweep", "parameter", "");
    (void)sweep_target(s.parameter);
    s.from = required_num(j, "sweep", "from");
    s.to = required_num(j, "sweep", "to");
    s.points = count(j, "sweep", "points", 101);
    if (s.points < 2) throw ConfigError("sweep.points: must be >= 2");
    c.sweep = s;
  }
  // output
  {
    const json& j = section("output");
    check_keys(j, "output", {"csv", "svg"});
    c.output.csv = str(j, "output", "csv", "");
    c.output.svg = str(j, "output", "svg", "");
  }
  return c;
}

/// Sets a dotted path ("market.sigma1") to a value, creating objects on the way.
inline void set_path(json& root, std::string_view path, json value) {
  json* cur = &root;
  while (true) {
    const auto dot = path.find('.');
    const std::string key(path.substr(0, dot));
    if (key.empty()) throw ConfigError("--set: empty key in path");
    if (cur->is_null()) *cur = json::object();
    if (!cur->is_object()) throw ConfigError("--set: '" + key + "' is inside a non-object value");
    if (dot == std::string_view::npos) {
      (*cur)[key] = std::move(value);
      return;
    }
    cur = &(*cur)[key];
    path.remove_prefix(dot + 1);
  }
}

/// Applies "dotted.key=value"; the value is read as JSON and falls back to a plain string.
inline void apply_override(json& root, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  set_path(root, assignment.substr(0, eq), std::move(value));
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config: cannot open '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("--config: '" + path + "' is not valid JSON");
  return j;
}

}  // namespace reinsopt
