#include <gtest/gtest.h>

#include "reinsopt/report.hpp"

using namespace reinsopt;

TEST(Config, EmptyConfigIsTable1) {
  const RunConfig c = parse_config(json::object());
  const StrategyPoint p = optimal_strategy(c.models, c.state);
  EXPECT_NEAR(p.u_star, 0.1131370849898476, 1e-15);
  EXPECT_NEAR(p.a_star, 0.1697056274847714, 1e-15);
  EXPECT_EQ(c.sim.n_paths, 10000u);
  EXPECT_FALSE(c.sweep.has_value());
  const auto* pr = c.models.reinsurance.get_if<Proportional>();
  ASSERT_NE(pr, nullptr);
  EXPECT_DOUBLE_EQ(pr->p(0, 0), 0.03);
}

TEST(Config, ParsesAllSections) {
  const json j = json::parse(R"({
    "utility": {"kind": "exponential", "beta": 2.0},
    "market": {"mu": {"kind": "affine", "c0": 0.08, "c1": 0.01, "lo": 0.0, "hi": 0.2}, "sigma1": 0.3},
    "environment": {"muY": {"kind": "sigmoid", "lo": -1, "hi": 1}, "sigmaY": 0.2, "y0": 0.5},
    "reinsurance": {"kind": "xl", "theta": 0.3, "eta": 0.1},
    "claims": {"kind": "pareto", "alpha": 3.0, "xm": 0.5},
    "state": {"x": 2.0},
    "sim": {"T": 2, "dt": 0.01, "n_paths": 50, "seed": 9, "workers": 2,
            "strategy": {"kind": "perturbed", "du": 0.1},
            "compare": [{"kind": "constant", "u": 0, "a": 0}, {"kind": "fixed_retention", "u": 1}]},
    "sweep": {"parameter": "theta", "from": 0.2, "to": 0.4, "points": 5},
    "output": {"csv": "a.csv", "svg": "a.svg"}
  })");
  const RunConfig c = parse_config(j);
  EXPECT_TRUE(c.models.utility.is_exponential());
  EXPECT_DOUBLE_EQ(c.models.market.mu(0, 0.5), 0.085);
  EXPECT_EQ(c.state.y, 0.5);
  const auto* xl = c.models.reinsurance.get_if<ExcessOfLoss>();
  ASSERT_NE(xl, nullptr);
  EXPECT_DOUBLE_EQ(xl->claims.mean(), 0.75);
  EXPECT_EQ(c.sim.steps(), 200u);
  EXPECT_EQ(c.sim.master_seed, 9u);
  EXPECT_TRUE(std::holds_alternative<PerturbedRule>(c.strategy));
  ASSERT_EQ(c.compare.size(), 2u);
  EXPECT_TRUE(std::holds_alternative<FixedRetention>(c.compare[1]));
  ASSERT_TRUE(c.sweep.has_value());
  EXPECT_EQ(c.sweep->points, 5u);
  EXPECT_EQ(c.output.svg, "a.svg");
}

TEST(Config, ErrorsNameTheField) {
  const auto message = [](const char* text) {
    try {
      (void)parse_config(json::parse(text));
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"market": {"sigma3": 1}})").find("market.sigma3"), std::string::npos);
  EXPECT_NE(message(R"({"market": {"mu": "high"}})").find("market.mu"), std::string::npos);
  EXPECT_NE(message(R"({"reinsurance": {"p": 0.06}})").find("p must be < "), std::string::npos);
  EXPECT_NE(message(R"({"utility": {"a": -1}})").find("a"), std::string::npos);
  EXPECT_NE(message(R"({"sim": {"dt": 0.3}})").find("dt"), std::string::npos);
  EXPECT_NE(message(R"({"sim": {"n_paths": 1.5}})").find("sim.n_paths"), std::string::npos);
  EXPECT_NE(message(R"({"sweep": {"parameter": "eta", "from": 0, "to": 1}})").find("sweep.parameter"),
            std::string::npos);
  EXPECT_NE(message(R"({"claims": {"kind": "tabulated", "points": [[0, 1], [1, 2]]}})").find("claims"),
            std::string::npos);
  EXPECT_NE(message(R"({"bogus": 1})").find("config.bogus"), std::string::npos);
}

TEST(Config, OverridesUseDottedPaths) {
  json j = json::object();
  apply_override(j, "market.sigma1=0");
  apply_override(j, "utility.kind=exponential");
  apply_override(j, "utility.beta=1.5");
  EXPECT_EQ(j["market"]["sigma1"], 0);
  EXPECT_EQ(j["utility"]["kind"], "exponential");
  const RunConfig c = parse_config(j);
  EXPECT_EQ(c.models.market.sigma1(0, 0), 0.0);
  EXPECT_THROW(apply_override(j, "novalue"), ConfigError);
  EXPECT_THROW(apply_override(j, "market.sigma1.x=1"), ConfigError);
}

TEST(Config, SweepIsDeterministicAndOrdered) {
  const json base = json::parse(R"({"sweep": {"parameter": "x", "from": -5, "to": 5, "points": 21}})");
  const RunConfig c = parse_config(base);
  const auto one = run_sweep(base, *c.sweep, 1);
  const auto many = run_sweep(base, *c.sweep, 4);
  EXPECT_EQ(sweep_csv(one), sweep_csv(many));
  ASSERT_EQ(one.size(), 21u);
  EXPECT_EQ(one.front().param, -5.0);
  EXPECT_EQ(one.back().param, 5.0);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_NEAR(one[i].point.u_star, one[one.size() - 1 - i].point.u_star, 1e-12);
  }
}

TEST(Config, CsvAndSvgRendering) {
  std::vector<SweepRow> rows(2);
  rows[0].param = 0.0;
  rows[0].point.u_star = 0.5;
  rows[0].point.a_star = 0.25;
  rows[1].param = 1.0;
  rows[1].point.u_star = 1.0;
  rows[1].point.region = Region::A1;
  EXPECT_EQ(sweep_csv(rows), "param,u_star,a_star,region\n0,0.5,0.25,Interior\n1,1,0,A1\n");
  const std::string svg = sweep_svg(rows, "q");
  EXPECT_NE(svg.find("viewBox=\"0 0 800 500\""), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), svg.rfind("<polyline"));
  EXPECT_EQ(fmt_double(0.1), "0.1");
}

TEST(Config, JsonReports) {
  StrategyPoint p;
  p.u_star = 0.25;
  p.region = Region::A0;
  const json j = to_json(p);
  EXPECT_EQ(j["region"], "A0");
  EXPECT_FALSE(j.contains("fallback"));
  const json e = to_json(McEstimate{1.5, 0.1, 10, 42});
  EXPECT_EQ(e["seed"], 42);
  EXPECT_EQ(e["n_paths"], 10);
}
