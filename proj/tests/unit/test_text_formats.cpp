#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "elmopp/csv.hpp"
#include "elmopp/kvfile.hpp"
#include "elmopp/run_config.hpp"

namespace {

using namespace elmopp;

TEST(Kv, ParsesSectionsCommentsAndOrder) {
  const auto doc = parse_kv_string(
      "# top\n"
      "[sim]\n"
      "  n_steps = 40   \n"
      "\n"
      "dt=0.5\n"
      "[sweep]\n"
      "totals = 1, 2 ,3\n"
      "[sim]\n"
      "t_min = 5\n");
  ASSERT_EQ(doc.sections.size(), 3u);
  EXPECT_EQ(doc.sections[0].name, "sim");
  EXPECT_EQ(doc.sections[0].get("n_steps"), "40");
  EXPECT_EQ(doc.sections[0].get("dt"), "0.5");
  EXPECT_FALSE(doc.sections[0].get("t_min").has_value());
  EXPECT_EQ(split_list(*doc.sections[1].get("totals")), (std::vector<std::string>{"1", "2", "3"}));
  EXPECT_TRUE(split_list("").empty());
}

TEST(Kv, ErrorsCarryTheLine) {
  try {
    parse_kv_string("[a]\nx = 1\nnot a pair\n");
    FAIL();
  } catch (const KvParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_kv_string("[unterminated\n"), KvParseError);
}

TEST(Kv, WriteThenParseIsIdentity) {
  KvDocument doc;
  auto& s = doc.add("alpha");
  s.set("k1", "v1");
  s.set("k2", "a, b");
  doc.add("beta").set("x", "-3.5e-7");
  EXPECT_EQ(parse_kv_string(write_kv_string(doc)), doc);
}

TEST(Csv, NumbersRoundTripExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.25), "0.25");
  EXPECT_EQ(parse_int("-42"), -42);
  EXPECT_THROW(parse_double("1.5x"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
  EXPECT_THROW(parse_int("4.2"), std::invalid_argument);
}

TEST(Csv, WriterAndReader) {
  std::stringstream buf;
  {
    CsvWriter w(buf, {"a", "b", "c"});
    w.field(std::size_t{1}).field(2.5).field(true);
    w.end_row();
    w.field("x").field(-3).field(false);
    w.end_row();
  }
  EXPECT_EQ(buf.str(), "a,b,c\n1,2.5,true\nx,-3,false\n");
  const auto t = read_csv(buf);
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][0], "x");
  EXPECT_EQ(t.column("c"), 2u);
  EXPECT_THROW(t.column("zz"), std::out_of_range);
}

TEST(RunConfig, EmptyTextGivesDefaults) {
  const RunConfig cfg = parse_run_config_string("");
  const RunConfig def;
  EXPECT_EQ(serialize_run_config(cfg), serialize_run_config(def));
  EXPECT_EQ(cfg.sim.n_steps, 2000u);
  EXPECT_EQ(cfg.sim.timing.t_min, 10);
  EXPECT_EQ(cfg.sim.timing.t_max, 120);
  EXPECT_EQ(cfg.predictor.units, 16u);
  EXPECT_EQ(cfg.predictor.epochs, 100u);
  EXPECT_EQ(cfg.predictor.batch_size, 10u);
  EXPECT_EQ(cfg.sweep.trials, 30u);
  EXPECT_EQ(cfg.sweep.totals.size(), 5u);
}

TEST(RunConfig, OverridesAreApplied) {
  const RunConfig cfg = parse_run_config_string(
      "[run]\nseed = 77\n"
      "[sim]\nt_min = 5\nlane_split = 0.2, 0.6, 0.2\n"
      "[controller]\nkind = fixed-cycle\nclamp_timing = false\n"
      "[inflow]\nbudget_scope = network\ntotal = 1234.5\n"
      "[sweep]\ncontrollers = naive-urgency, elmopp\ntotals = 100\n");
  EXPECT_EQ(cfg.seed, 77u);
  EXPECT_EQ(cfg.sim.timing.t_min, 5);
  EXPECT_EQ(cfg.sim.lane_split[1], 0.6);
  EXPECT_EQ(cfg.controller.kind, ControllerKind::FixedCycle);
  EXPECT_FALSE(cfg.controller.clamp_timing);
  EXPECT_EQ(cfg.inflow.scope, BudgetScope::Network);
  EXPECT_EQ(cfg.inflow.total, 1234.5);
  EXPECT_EQ(cfg.sweep.controllers,
            (std::vector<ControllerKind>{ControllerKind::NaiveUrgency, ControllerKind::Elmopp}));
  EXPECT_EQ(cfg.sweep.totals, std::vector<double>{100.0});
}

TEST(RunConfig, NormalizedFormRoundTrips) {
  RunConfig cfg;
  cfg.seed = 123456789012345ull;
  cfg.sim.dt = 0.1;
  cfg.sim.startup_delay = 1.0 / 3.0;
  cfg.predictor.adam.learning_rate = 3e-4;
  cfg.sweep.totals = {10.0, 20.5};
  const std::string text = serialize_run_config(cfg);
  const RunConfig back = parse_run_config_string(text);
  EXPECT_EQ(serialize_run_config(back), text);
  EXPECT_EQ(back.sim.startup_delay, 1.0 / 3.0);
  EXPECT_EQ(back.seed, cfg.seed);
}

void expect_error_naming(const std::string& text, const std::string& key) {
  try {
    parse_run_config_string(text);
    FAIL() << "no error for " << text;
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
  }
}

TEST(RunConfig, ErrorsNameTheKey) {
  expect_error_naming("[sim]\nbogus = 1\n", "sim.bogus");
  expect_error_naming("[nowhere]\nx = 1\n", "nowhere");
  expect_error_naming("[sim]\nn_steps = many\n", "sim.n_steps");
  expect_error_naming("[controller]\nkind = magic\n", "controller.kind");
  expect_error_naming("[sim]\nt_min = 500\n", "t_min");
  expect_error_naming("[inflow]\ntotal = -4\n", "inflow.total");
}

}  // namespace
