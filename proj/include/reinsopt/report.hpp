// Parameter sweeps and their CSV / SVG / JSON renderings.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "reinsopt/config.hpp"
#include "reinsopt/verify.hpp"

namespace reinsopt {

/// Shortest round-trip decimal form.
inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct SweepRow {
  double param = 0.0;
  StrategyPoint point;
};

/// Evaluates the optimal strategy at `points` evenly spaced values of the sweep
/// parameter. Rows come back in sweep order.
inline std::vector<SweepRow> run_sweep(const json& base, const SweepSpec& spec, unsigned workers = 0) {
  const std::string target = sweep_target(spec.parameter);
  std::vector<SweepRow> rows(spec.points);
  std::vector<RunConfig> configs;
  configs.reserve(spec.points);
  for (std::size_t i = 0; i < spec.points; ++i) {
    const double v = i + 1 == spec.points ? spec.to
                                          : spec.from + (spec.to - spec.from) * double(i) / double(spec.points - 1);
    json j = base;
    set_path(j, target, v);
    configs.push_back(parse_config(j));
    rows[i].param = v;
  }
  detail::parallel_for(spec.points, workers, [&](std::size_t i) {
    rows[i].point = optimal_strategy(configs[i].models, configs[i].state);
  });
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "param,u_star,a_star,region\n";
  for (const auto& r : rows) {
    out += fmt_double(r.param) + ',' + fmt_double(r.point.u_star) + ',' + fmt_double(r.point.a_star) + ',' +
           std::string(region_name(r.point.region)) + '\n';
  }
  return out;
}

inline std::string strategy_csv(const StatePoint& s, const StrategyPoint& p) {
  return "t,x,y,u_star,a_star,region\n" + fmt_double(s.t) + ',' + fmt_double(s.x) + ',' + fmt_double(s.y) + ',' +
         fmt_double(p.u_star) + ',' + fmt_double(p.a_star) + ',' + std::string(region_name(p.region)) + '\n';
}

inline std::string paths_csv(const std::vector<PathRow>& rows) {
  std::string out = "step,t,x,y,u,a\n";
  for (const auto& r : rows) {
    out += std::to_string(r.step) + ',' + fmt_double(r.t) + ',' + fmt_double(r.x) + ',' + fmt_double(r.y) + ',' +
           fmt_double(r.u) + ',' + fmt_double(r.a) + '\n';
  }
  return out;
}

namespace detail {

inline std::string svg_num(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

inline std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(3);
  os << (std::abs(v) < 1e-12 ? 0.0 : v);
  return os.str();
}

}  // namespace detail

/// Line plot of u* (solid) and a* (dashed) against the sweep parameter, 800x500 viewBox.
inline std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& parameter) {
  using detail::svg_num;
  constexpr double W = 800, H = 500, L = 70, R = 30, T = 40, B = 60;
  double xmin = rows.front().param, xmax = rows.back().param;
  if (xmin > xmax) std::swap(xmin, xmax);
  if (xmax == xmin) xmax = xmin + 1.0;
  double ymin = 0.0, ymax = 1.0;
  for (const auto& r : rows) {
    ymin = std::min({ymin, r.point.u_star, r.point.a_star});
    ymax = std::max({ymax, r.point.u_star, r.point.a_star});
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
  os << "<g stroke=\"#444\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0, yv = ymin + (ymax - ymin) * i / 5.0;
    os << "<text x=\"" << svg_num(px(xv)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
       << detail::tick_label(xv) << "</text>\n";
    os << "<text x=\"" << L - 8 << "\" y=\"" << svg_num(py(yv) + 4) << "\" text-anchor=\"end\">"
       << detail::tick_label(yv) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << parameter
     << "</text>\n";
  os << "<text x=\"" << W - R - 150 << "\" y=\"" << T - 15 << "\">&#8212; u*   - - a*</text>\n";
  os << "</g>\n";
  auto polyline = [&](auto value, const char* style) {
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\"" << style << " points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << (i ? " " : "") << svg_num(px(rows[i].param)) << ',' << svg_num(py(value(rows[i].point)));
    }
    os << "\"/>\n";
  };
  polyline([](const StrategyPoint& p) { return p.u_star; }, "");
  polyline([](const StrategyPoint& p) { return p.a_star; }, " stroke-dasharray=\"8,5\"");
  os << "</svg>\n";
  return os.str();
}

inline json to_json(const StrategyPoint& p) {
  json j = {{"u_star", p.u_star}, {"a_star", p.a_star}, {"region", std::string(region_name(p.region))}};
  if (p.fallback) j["fallback"] = true;
  if (p.residual != 0.0) j["residual"] = p.residual;
  return j;
}

inline json to_json(const McEstimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"n_paths", e.n_paths}, {"seed", e.seed}};
}

inline json to_json(const OracleReport& r) {
  return {{"name", r.name},         {"closed_form", r.closed_form}, {"oracle", r.oracle},
          {"abs_diff", r.abs_diff}, {"tolerance", r.tolerance},     {"pass", r.pass},
          {"grid_spec", r.grid_spec}};
}

inline json to_json(const ComparisonReport& c) {
  json out = json::object();
  json strategies = json::array();
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    json s = to_json(c.estimates[i]);
    s["label"] = c.labels[i];
    strategies.push_back(s);
  }
  json diffs = json::array();
  for (const auto& d : c.versus_baseline)
    diffs.push_back({{"label", d.label}, {"mean_difference", d.mean_difference}, {"std_error", d.std_error}});
  out["strategies"] = strategies;
  out["baseline"] = c.labels.front();
  out["baseline_minus"] = diffs;
  out["ranking"] = c.ranking;
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

}  // namespace reinsopt
