// reinsopt: optimal reinsurance-investment strategies from the command line.
//
//   reinsopt strategy [--config f.json] [--set key=value ...] [--out-csv f.csv]
//   reinsopt sweep    --config f.json  [--out-csv f.csv] [--out-svg f.svg]
//   reinsopt simulate [--config f.json] [--seed N] [--out-csv paths.csv]
//   reinsopt verify   [suite] [--config f.json]
//
// Exit codes: 0 ok, 1 verification failure, 2 configuration error, 3 solver or simulation failure.
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reinsopt/report.hpp"

namespace {

using namespace reinsopt;

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::string out_csv;
  std::string out_svg;
  std::optional<std::uint64_t> seed;
  std::string mode;
};

json load(const Options& o) {
  json j = o.config.empty() ? json::object() : load_json_file(o.config);
  for (const auto& s : o.overrides) apply_override(j, s);
  if (o.seed) set_path(j, "sim.seed", *o.seed);
  return j;
}

std::string pick(const std::string& flag, const std::string& from_config) {
  return flag.empty() ? from_config : flag;
}

int cmd_strategy(const Options& o) {
  const RunConfig c = parse_config(load(o));
  const StrategyPoint p = optimal_strategy(c.models, c.state);
  json out = to_json(p);
  out["t"] = c.state.t;
  out["x"] = c.state.x;
  out["y"] = c.state.y;
  std::cout << out.dump(2) << '\n';
  if (const auto csv = pick(o.out_csv, c.output.csv); !csv.empty()) write_file(csv, strategy_csv(c.state, p));
  return 0;
}

int cmd_sweep(const Options& o) {
  const json j = load(o);
  const RunConfig c = parse_config(j);
  if (!c.sweep) throw ConfigError("sweep: section required for the sweep command");
  const auto rows = run_sweep(j, *c.sweep, c.sim.workers);
  const std::string csv = sweep_csv(rows);
  const auto csv_path = pick(o.out_csv, c.output.csv);
  const auto svg_path = pick(o.out_svg, c.output.svg);
  if (csv_path.empty()) std::cout << csv;
  else write_file(csv_path, csv);
  if (!svg_path.empty()) write_file(svg_path, sweep_svg(rows, c.sweep->parameter));
  return 0;
}

int cmd_simulate(const Options& o) {
  const RunConfig c = parse_config(load(o));
  if (!c.compare.empty()) {
    std::vector<FeedbackStrategy> all{c.strategy};
    all.insert(all.end(), c.compare.begin(), c.compare.end());
    std::cout << to_json(compare_strategies(c.models, all, c.sim, c.state.x)).dump(2) << '\n';
    return 0;
  }
  const SimResult r = simulate_paths(c.models, c.strategy, c.sim, c.state.x);
  std::vector<double> u(r.terminal.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = c.models.utility.value(r.terminal[i]);
  json out = to_json(summarize(u, c.sim.master_seed));
  out["int_a2_mean"] = detail::compensated_sum(r.int_a2) / double(r.int_a2.size());
  std::cout << out.dump(2) << '\n';
  if (const auto csv = pick(o.out_csv, ""); !csv.empty()) {
    if (!c.sim.store_paths) throw ConfigError("--out-csv: set sim.store_paths=true to dump a path");
    write_file(csv, paths_csv(r.path0));
  }
  return 0;
}

// Checks a single configured point against the grid oracles.
std::vector<OracleReport> verify_point(const RunConfig& c) {
  std::vector<OracleReport> out;
  const auto& m = c.models;
  const StrategyPoint p = optimal_strategy(m, c.state);
  const bool finite_range = std::isfinite(m.reinsurance.retention_bound());
  const double h = finite_range ? 1e-6 : 1e-5;
  const GridMax g = grid_argmax_u(m.reinsurance, m.market, m.utility, c.state, h);
  out.push_back(make_report("u_star_vs_grid_argmax", p.u_star, g.u, finite_range ? 1e-6 : 1e-4,
                            "argmax Psi, step " + fmt_double(h)));
  if (finite_range) {
    const UaMax j = joint_oracle(m.reinsurance, m.market, m.utility, c.state);
    out.push_back(make_report("a_star_vs_hjb_grid", p.a_star, j.a, 1e-4, "2-D HJB argmax, step 1e-06"));
  }
  if (p.residual != 0.0 || m.reinsurance.is<ExcessOfLoss>())
    out.push_back(make_report("root_residual", p.residual, 0.0, 1e-10, "stationarity equation"));
  return out;
}

int cmd_verify(const Options& o) {
  json j = load(o);
  SuiteOptions opt;
  if (j.contains("verify")) {
    const json& v = j.at("verify");
    detail::check_keys(v, "verify", {"draws", "joint_draws", "seed"});
    opt.draws = detail::count(v, "verify", "draws", opt.draws);
    opt.joint_draws = detail::count(v, "verify", "joint_draws", opt.joint_draws);
    opt.seed = detail::count(v, "verify", "seed", opt.seed);
    j.erase("verify");
  }
  // An empty configuration means the Table 1 defaults, which the suite covers.
  const std::vector<OracleReport> reports =
      (o.mode == "suite" || j.empty()) ? run_oracle_suite(opt) : verify_point(parse_config(j));
  json arr = json::array();
  bool ok = true;
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    ok = ok && r.pass;
  }
  std::cout << arr.dump(2) << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal reinsurance and investment under SAHARA and exponential utility"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--set", o.overrides, "override a config value, e.g. --set market.sigma1=0")->take_all();
    sub->add_option("--seed", o.seed, "master seed for simulation");
  };
  auto* strategy = app.add_subcommand("strategy", "optimal (u*, a*) at the configured state");
  add_common(strategy);
  strategy->add_option("--out-csv", o.out_csv, "write t,x,y,u_star,a_star,region");
  auto* sweep = app.add_subcommand("sweep", "strategy across a parameter range");
  add_common(sweep);
  sweep->add_option("--out-csv", o.out_csv, "CSV output (default: stdout)");
  sweep->add_option("--out-svg", o.out_svg, "SVG line plot");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of expected terminal utility");
  add_common(simulate);
  simulate->add_option("--out-csv", o.out_csv, "path dump (requires sim.store_paths)");
  auto* verify = app.add_subcommand("verify", "compare closed forms against grid oracles");
  add_common(verify);
  verify->add_option("mode", o.mode, "'suite' to run the randomized suite")->check(CLI::IsMember({"suite"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*strategy) return cmd_strategy(o);
    if (*sweep) return cmd_sweep(o);
    if (*simulate) return cmd_simulate(o);
    if (*verify) return cmd_verify(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
