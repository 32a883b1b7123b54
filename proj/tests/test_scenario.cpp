#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fitzrange/runner.hpp"

using namespace fitzrange;

namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(FITZRANGE_SCENARIO_DIR) + "/" + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioError parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << text;
  return ScenarioError("", "");
}

double pick(Rng& rng, std::initializer_list<double> xs) {
  return *(xs.begin() + rng.integer(0, static_cast<int>(xs.size()) - 1));
}

// Random valid scenario text over the builtin vocabulary.
std::string random_scenario(Rng& rng) {
  const char* tasks[] = {"range", "sweep", "zero", "single", "normal-cone", "subdiff", "conditions", "total-duality", "fuzz"};
  const std::string task = tasks[rng.integer(0, 8)];
  auto num = [&] { return pick(rng, {-2.5, -1, 0, 0.25, 1, 3}); };
  auto fn = [&]() -> std::string {
    switch (rng.integer(0, 3)) {
      case 0: return "ind[" + std::to_string(num()) + ",inf]";
      case 1: return "quad(0.5," + std::to_string(num()) + ",0)";
      case 2: return "abs";
      default: return "sup[-1,2]";
    }
  };
  Json j{{"task", task}, {"definitions", {{"h", fn()}, {"A", "subdiff(h)"}}}};
  auto op = [&]() -> Json {
    switch (rng.integer(0, 3)) {
      case 0: return "A";
      case 1: return "J";
      case 2: return "ncone[-1,1]";
      default: return Json{{"vertices", {{0, 0}, {1, 1}}}, {"left", {0, 1}}, {"right", {1, 0}}};
    }
  };
  j["S"] = op();
  j["T"] = op();
  j["f"] = "h";
  j["g"] = fn();
  j["p"] = num();
  j["ps"] = num();
  if (rng.coin()) j["ps_grid"] = {num(), num()};
  else j["ps_grid"] = {{"lo", -1}, {"hi", 1}, {"n", rng.integer(1, 5)}};
  j["interval"] = {"-inf", num()};
  if (rng.coin()) j["grid"] = {{"n", 65}, {"box", 4}};
  if (rng.coin()) j["tol"] = {{"grid", 1e-5}};
  if (rng.coin()) j["representatives"] = {{"S", "fitzpatrick"}};
  j["seed"] = rng.integer(0, 1000);
  if (rng.coin()) j["instances"] = rng.integer(1, 5);
  if (rng.coin()) j["shifted"] = true;
  return j.dump();
}

}  // namespace

TEST(Serialize, PlqRoundTrip) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_convex_plq(rng);
    const auto g = plq_from_json(Json::parse(to_json(f).dump()));
    EXPECT_TRUE(approx_equal(f, g, 0.0)) << f.to_string();
  }
  const auto ind = to_json(PlqFunction::indicator(0, kInf));
  EXPECT_EQ(ind["pieces"][0], "inf");
}

TEST(Serialize, GraphRoundTrip) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto T = random_maximal_graph(rng);
    EXPECT_EQ(graph_from_json(Json::parse(to_json(T).dump())).segments(), T.segments());
  }
  const auto v = graph_from_json(Json::parse(R"({"vertices": [[0, 0]], "left": [0, 1], "right": [1, 0]})"));
  EXPECT_EQ(v.segments(), normal_cone(0, kInf).segments());
}

TEST(Serialize, BivariateRoundTripEvaluatesIdentically) {
  const Axis ax{-3, 3, 13};
  std::vector<BivariateFn> fs{fitzpatrick_fn(from_subdifferential(PlqFunction::indicator(0, kInf))),
                              fitzpatrick_fn(duality_map()), fenchel_representative(PlqFunction::quadratic(0.5, 1, 0)),
                              hat_transform(fitzpatrick_fn(duality_map())),
                              conjugate_bivariate(fitzpatrick_fn(duality_map()), {3, 13})};
  fs.push_back(fs[2].tilted({1, -2}));
  for (const auto& h : fs) {
    const Json j = to_json(h);
    EXPECT_TRUE(j.contains("minorants") || j.contains("formula") || j.contains("grid"));
    const auto back = bivariate_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back.arg_order(), h.arg_order());
    for (int i = 0; i < ax.n; ++i) {
      for (int k = 0; k < ax.n; ++k) {
        const ExtReal a = h(ax.node(i), ax.node(k)), b = back(ax.node(i), ax.node(k));
        ASSERT_EQ(a.is_finite(), b.is_finite()) << j.dump();
        if (a.is_finite()) EXPECT_NEAR(a.value(), b.value(), 1e-12);
      }
    }
  }
  const Json ex1 = to_json(fs[0]);
  EXPECT_EQ(ex1["tag"], "polyhedral-max");
  EXPECT_EQ(ex1["arg_order"], "(x,x*)");
}

TEST(Serialize, ReportCarriesSchemaFields) {
  const auto r = range_membership(from_subdifferential(PlqFunction::indicator(0, kInf)),
                                  from_subdifferential(PlqFunction::indicator(0, 0)), 0, 1);
  const Json j = to_json(r);
  for (const char* k : {"query", "representatives", "value", "target", "gap", "witness", "residuals", "oracle", "verdict",
                        "conditions"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["verdict"], "YES");
  const auto fS = bivariate_from_json(j["representatives"]["S"]["function"]);
  EXPECT_EQ(fS(1, -1).value(), 0.0);
}

TEST(Scenario, Example1Fixture) {
  const auto s = parse_scenario(fixture("example1.json"));
  EXPECT_EQ(s.task, "conditions");
  const ScenarioEnv env(s);
  EXPECT_EQ(env.op(s.roles.at("S"), "/S").segments(),
            from_subdifferential(PlqFunction::indicator(0, kInf)).segments());
  EXPECT_EQ(env.op(s.roles.at("T"), "/T").segments(), from_subdifferential(PlqFunction::indicator(0, 0)).segments());
}

TEST(Scenario, Diagnostics) {
  auto e = parse_error(R"({"task": ""})");
  EXPECT_EQ(e.field(), "/task");
  EXPECT_EQ(e.message(), "task required");
  EXPECT_EQ(parse_error(R"({"S": "J"})").message(), "task required");

  e = parse_error(R"({"task": "sweep", "S": "foo[0,1]", "T": "J", "ps_grid": [0]})");
  EXPECT_EQ(e.field(), "/S");
  EXPECT_NE(e.message().find("unknown builtin 'foo'"), std::string::npos);

  e = parse_error(R"j({"task": "sweep", "definitions": {"S": "subdiff(h)"}, "S": "S", "T": "J", "ps_grid": [0]})j");
  EXPECT_EQ(e.field(), "/definitions/S");
  EXPECT_NE(e.message().find("dangling reference 'h'"), std::string::npos);

  e = parse_error(R"({"task": "sweep", "S": "ncone[0,1e]", "T": "J", "ps_grid": [0]})");
  EXPECT_EQ(e.field(), "/S");
  EXPECT_NE(e.message().find("malformed number '1e'"), std::string::npos);
  EXPECT_EQ(e.position(), 8u);

  e = parse_error(R"({"task": "sweep", "S": "J", "T": "J", "ps_grid": ["x"]})");
  EXPECT_EQ(e.field(), "/ps_grid/0");

  e = parse_error(R"({"task": "sweep", "S": "J", "T": "J"})");
  EXPECT_EQ(e.field(), "/ps_grid");
  EXPECT_EQ(parse_error(R"({"task": "fuzz"})").field(), "/seed");
  EXPECT_EQ(parse_error(R"({"task": "range", "S": "J", "T": "J", "p": 0})").field(), "/ps");
  EXPECT_EQ(parse_error(R"({"task": "single", "S": "abs", "ps_grid": [0]})").field(), "/S");
  EXPECT_EQ(parse_error(R"({"task": "zero", "S": "J", "T": "J", "bogus": 1})").field(), "/bogus");

  e = parse_error("{\"task\":\n \"zero\",, }");
  EXPECT_TRUE(e.position().has_value());
  EXPECT_NE(e.message().find("line 2"), std::string::npos);
}

TEST(Scenario, NonconvexInputFailsDownstream) {
  const auto s = parse_scenario(fixture("nonconvex.json"));
  try {
    run(s);
    FAIL() << "expected a convexity diagnostic";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.field(), "/definitions/S");
    EXPECT_NE(e.message().find("convexity_check failed"), std::string::npos);
  }
}

TEST(Scenario, RoundTripOnRandomScenarios) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto text = random_scenario(rng);
    const auto s = parse_scenario(text);
    const auto again = parse_scenario(render_scenario(s));
    EXPECT_EQ(again, s) << text;
    EXPECT_EQ(render_scenario(again), render_scenario(s));
  }
}

TEST(Runner, Example1ConditionTable) {
  const auto r = run(parse_scenario(fixture("example1.json")));
  EXPECT_FALSE(r.disagreement);
  const auto& c = r.report["result"]["conditions"];
  for (const char* k : {"dom_f_T_whole", "difference_whole", "sqri", "core"}) EXPECT_EQ(c[k], "FAILS") << k;
  EXPECT_TRUE(r.report["result"]["rc_bar"]["all_yes"].get<bool>());
  EXPECT_EQ(r.report["result"]["rc_tilde"]["verdict"], "YES");
  EXPECT_EQ(r.report["result"]["rc_bar"]["oracle_range_text"], "(-inf, +inf)");
  EXPECT_NE(r.text.find("(RC-bar)                                    YES on grid (7/7)"), std::string::npos) << r.text;
  EXPECT_EQ(r.report["schema"], kReportSchema);
}

TEST(Runner, RockafellarFixtureAllYes) {
  const auto r = run(parse_scenario(fixture("rockafellar.json")));
  EXPECT_FALSE(r.disagreement);
  EXPECT_TRUE(r.report["result"]["all_yes"].get<bool>());
  EXPECT_EQ(r.report["result"]["entries"].size(), 21u);
}

TEST(Runner, FuzzFixtureHasNoDisagreementAndIsDeterministic) {
  const auto s = parse_scenario(fixture("fuzz.json"));
  const auto a = run(s), b = run(s);
  EXPECT_FALSE(a.disagreement);
  EXPECT_EQ(a.report["result"]["summary"]["disagreements"], 0);
  EXPECT_EQ(a.report["result"]["summary"]["count"], 200);
  EXPECT_EQ(a.report.dump(), b.report.dump());
  EXPECT_EQ(a.text, b.text);
  RunOptions o;
  o.seed = 8;
  EXPECT_NE(run(s, o).report.dump(), a.report.dump());
}

TEST(Runner, OverridesTakePrecedence) {
  const auto s = parse_scenario(R"({"task": "zero", "S": "J", "T": "J", "grid": {"n": 33}})");
  EXPECT_EQ(run(s).report["config"]["grid"]["n"], 33);
  RunOptions o;
  o.grid_n = 17;
  o.box = 2;
  o.tol = 1e-4;
  const auto r = run(s, o);
  EXPECT_EQ(r.report["config"]["grid"]["n"], 17);
  EXPECT_EQ(r.report["config"]["grid"]["box"], 2.0);
  EXPECT_EQ(r.report["config"]["tol"]["grid"], 1e-4);
}

TEST(Runner, EveryFixtureRunsClean) {
  for (const char* f : {"example1.json", "example1_sweep.json", "rockafellar.json", "subdiff_example1.json",
                        "total_duality.json", "single_staircase.json", "normal_cone.json"}) {
    const auto r = run(parse_scenario(fixture(f)));
    EXPECT_FALSE(r.disagreement) << f;
    EXPECT_NE(r.text.find("no disagreement"), std::string::npos) << f;
  }
}

TEST(Runner, TotalDualityWithoutZeroInRange) {
  const auto r = run(parse_scenario(R"({"task": "total-duality", "S": "ncone[1,1]", "T": "ncone[0,0]"})"));
  EXPECT_FALSE(r.disagreement);
  EXPECT_TRUE(r.report["result"]["total_duality"].is_null());
}
