// Euler-Maruyama simulation of the controlled surplus and the environment,
// and Monte Carlo estimates of E[U(X_T)].
//
// Every path draws its Brownian increments from three generators keyed by
// (master_seed, path_index, stream), so results do not depend on the number of
// workers and different strategies see identical noise (common random numbers).
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "reinsopt/parallel.hpp"
#include "reinsopt/strategy.hpp"

namespace reinsopt {

struct SimConfig {
  double horizon = 1.0;
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::uint64_t master_seed = 20240601;
  bool store_paths = false;
  unsigned workers = 0;  // 0 = hardware concurrency

  std::size_t steps() const {
    if (!(horizon > 0.0) || !(dt > 0.0) || dt > horizon)
      throw std::invalid_argument("sim needs 0 < dt <= T");
    if (n_paths < 1) throw std::invalid_argument("sim.n_paths must be >= 1");
    const double n = std::round(horizon / dt);
    if (std::abs(n * dt - horizon) > 1e-9 * horizon) throw std::invalid_argument("sim.dt must divide sim.T");
    return static_cast<std::size_t>(n);
  }
};

/// u = u*(t,X,Y), a = a*(t,X,Y).
struct OptimalRule {};
/// Fixed (u, a) for the whole horizon.
struct ConstantControls {
  double u = 0.0;
  double a = 0.0;
};
/// Optimal rule shifted by (du, da); u is clamped into [0, I].
struct PerturbedRule {
  double du = 0.0;
  double da = 0.0;
};
/// Fixed retention u with the investment that is optimal for it.
struct FixedRetention {
  double u = 1.0;
};

using FeedbackStrategy = std::variant<OptimalRule, ConstantControls, PerturbedRule, FixedRetention>;

inline std::string strategy_label(const FeedbackStrategy& f) {
  std::ostringstream os;
  if (std::holds_alternative<OptimalRule>(f)) os << "optimal";
  else if (auto* c = std::get_if<ConstantControls>(&f)) os << "constant(u=" << c->u << ",a=" << c->a << ")";
  else if (auto* p = std::get_if<PerturbedRule>(&f)) os << "perturbed(du=" << p->du << ",da=" << p->da << ")";
  else os << "fixed_retention(u=" << std::get<FixedRetention>(f).u << ")";
  return os.str();
}

struct Controls {
  double u = 0.0;
  double a = 0.0;
};

inline Controls evaluate_controls(const Models& m, const FeedbackStrategy& f, const StatePoint& s) {
  const double bound = m.reinsurance.retention_bound();
  if (auto* c = std::get_if<ConstantControls>(&f)) return {std::clamp(c->u, 0.0, bound), c->a};
  if (auto* r = std::get_if<FixedRetention>(&f)) {
    const double u = std::clamp(r->u, 0.0, bound);
    return {u, optimal_investment(m.market, m.utility, s, u, m.reinsurance)};
  }
  const StrategyPoint sp = optimal_strategy(m, s);
  if (auto* p = std::get_if<PerturbedRule>(&f)) return {std::clamp(sp.u_star + p->du, 0.0, bound), sp.a_star + p->da};
  return {sp.u_star, sp.a_star};
}

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

struct PathRow {
  std::size_t step;
  double t, x, y, u, a;
};

struct SimResult {
  std::vector<double> terminal;  // X_T per path, in path order
  std::vector<double> int_a2;    // int_0^T a_t^2 dt per path
  std::vector<PathRow> path0;    // path 0, if store_paths
};

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t path, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(path * 3 + stream + 0x632be59bd9b4e019ULL));
}

// Standard normal increments for one path: dW1, dW2, dWY per step, each from its own stream.
class PathNoise {
 public:
  PathNoise(std::uint64_t master, std::size_t path, std::size_t steps) : z_(3 * steps) {
    for (std::size_t s = 0; s < 3; ++s) {
      std::mt19937_64 eng(stream_seed(master, path, s));
      std::normal_distribution<double> n01;
      for (std::size_t k = 0; k < steps; ++k) z_[3 * k + s] = n01(eng);
    }
  }
  double w1(std::size_t k) const { return z_[3 * k]; }
  double w2(std::size_t k) const { return z_[3 * k + 1]; }
  double wy(std::size_t k) const { return z_[3 * k + 2]; }

 private:
  std::vector<double> z_;
};

struct PathOutcome {
  double terminal = 0.0;
  double int_a2 = 0.0;
};

inline PathOutcome run_path(const Models& m, const FeedbackStrategy& f, const PathNoise& noise, std::size_t steps,
                            double dt, double x0, std::size_t path, std::vector<PathRow>* rows) {
  const double sq = std::sqrt(dt);
  double x = x0, y = m.environment.y0, int_a2 = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = double(k) * dt;
    const StatePoint s{t, x, y};
    const Controls c = evaluate_controls(m, f, s);
    if (rows) rows->push_back({k, t, x, y, c.u, c.a});
    const MarketAt mk = market_at(m.market, s);
    const double drift = m.reinsurance.drift(s, c.u) + c.a * mk.mu;
    const double vol1 = m.reinsurance.volatility(s, c.u) + c.a * mk.sigma1;
    const double vol2 = c.a * mk.sigma2;
    x += drift * dt + vol1 * sq * noise.w1(k) + vol2 * sq * noise.w2(k);
    y += m.environment.mu_y(t, y) * dt + m.environment.sigma_y(t, y) * sq * noise.wy(k);
    int_a2 += c.a * c.a * dt;
    if (!std::isfinite(x) || !std::isfinite(y)) {
      std::ostringstream os;
      os << "non-finite state on path " << path << " at step " << k << " (t=" << t << "): x=" << x << " y=" << y
         << " u=" << c.u << " a=" << c.a;
      throw SimulationError(os.str());
    }
  }
  if (rows) rows->push_back({steps, double(steps) * dt, x, y, 0.0, 0.0});
  return {x, int_a2};
}

}  // namespace detail

inline SimResult simulate_paths(const Models& m, const FeedbackStrategy& f, const SimConfig& cfg, double x0) {
  const std::size_t steps = cfg.steps();
  SimResult r;
  r.terminal.resize(cfg.n_paths);
  r.int_a2.resize(cfg.n_paths);
  detail::parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t p) {
    const detail::PathNoise noise(cfg.master_seed, p, steps);
    std::vector<PathRow>* rows = (cfg.store_paths && p == 0) ? &r.path0 : nullptr;
    const auto out = detail::run_path(m, f, noise, steps, cfg.dt, x0, p, rows);
    r.terminal[p] = out.terminal;
    r.int_a2[p] = out.int_a2;
  });
  return r;
}

/// Sample mean and standard error, reduced in path order.
inline McEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
  McEstimate e;
  e.n_paths = values.size();
  e.seed = seed;
  e.mean = detail::compensated_sum(values) / double(values.size());
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - e.mean) * (values[i] - e.mean);
    const double var = detail::compensated_sum(sq) / double(values.size() - 1);
    e.std_error = std::sqrt(var / double(values.size()));
  }
  return e;
}

inline McEstimate estimate_expected_utility(const Models& m, const FeedbackStrategy& f, const SimConfig& cfg,
                                            double x0) {
  const SimResult r = simulate_paths(m, f, cfg, x0);
  std::vector<double> u(r.terminal.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = m.utility.value(r.terminal[i]);
  return summarize(u, cfg.master_seed);
}

struct PairedDifference {
  std::string label;
  double mean_difference = 0.0;  // baseline minus this strategy
  double std_error = 0.0;
};

struct ComparisonReport {
  std::vector<std::string> labels;
  std::vector<McEstimate> estimates;
  std::vector<PairedDifference> versus_baseline;  // one per non-baseline strategy
  std::vector<std::size_t> ranking;               // indices by decreasing mean utility
};

/// Simulates all strategies on the same noise. The first strategy is the baseline.
inline ComparisonReport compare_strategies(const Models& m, const std::vector<FeedbackStrategy>& strategies,
                                           const SimConfig& cfg, double x0) {
  if (strategies.size() < 2) throw std::invalid_argument("compare_strategies needs at least two strategies");
  const std::size_t steps = cfg.steps();
  const std::size_t k = strategies.size();
  std::vector<std::vector<double>> util(k, std::vector<double>(cfg.n_paths));
  detail::parallel_for(cfg.n_paths, cfg.workers, [&](std::size_t p) {
    const detail::PathNoise noise(cfg.master_seed, p, steps);
    for (std::size_t j = 0; j < k; ++j) {
      const auto out = detail::run_path(m, strategies[j], noise, steps, cfg.dt, x0, p, nullptr);
      util[j][p] = m.utility.value(out.terminal);
    }
  });
  ComparisonReport rep;
  for (std::size_t j = 0; j < k; ++j) {
    rep.labels.push_back(strategy_label(strategies[j]));
    rep.estimates.push_back(summarize(util[j], cfg.master_seed));
  }
  for (std::size_t j = 1; j < k; ++j) {
    std::vector<double> diff(cfg.n_paths);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) diff[p] = util[0][p] - util[j][p];
    const McEstimate d = summarize(diff, cfg.master_seed);
    rep.versus_baseline.push_back({rep.labels[j], d.mean, d.std_error});
  }
  rep.ranking.resize(k);
  for (std::size_t j = 0; j < k; ++j) rep.ranking[j] = j;
  std::stable_sort(rep.ranking.begin(), rep.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return rep.estimates[a].mean > rep.estimates[b].mean; });
  return rep;
}

}  // namespace reinsopt
