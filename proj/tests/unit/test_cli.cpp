#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "elmopp/csv.hpp"
#include "elmopp/experiment.hpp"

namespace {

namespace fs = std::filesystem;
using namespace elmopp;

const fs::path kRoot = ELMOPP_TEST_TMP;

struct RunResult {
  int status = 0;
  std::string output;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI with stdout and stderr captured to a file.
RunResult run(const std::string& args) {
  fs::create_directories(kRoot);
  const fs::path log = kRoot / "last_output.txt";
  const std::string cmd = std::string("\"") + ELMOPP_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  RunResult r;
  const int raw = std::system(cmd.c_str());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.output = slurp(log);
  return r;
}

fs::path fresh(const std::string& name) {
  const fs::path d = kRoot / name;
  fs::remove_all(d);
  return d;
}

TEST(Cli, GenInflowSumsToTotalAndRepeatsExactly) {
  const auto a = fresh("gen_a"), b = fresh("gen_b");
  auto r = run("--seed 3 --out " + a.string() + " gen-inflow --steps 2000 --total 800");
  ASSERT_EQ(r.status, 0) << r.output;
  const auto at = r.output.find("sum ");
  ASSERT_NE(at, std::string::npos) << r.output;
  EXPECT_NEAR(std::stod(r.output.substr(at + 4)), 800.0, 800.0 * 1e-6);
  std::ifstream in(a / "inflow.csv");
  const auto series = read_inflow_csv(in);
  ASSERT_EQ(series.size(), 2000u);
  double sum = 0.0;
  for (const auto& v : series) {
    for (double x : v) sum += x;
  }
  EXPECT_NEAR(sum, 800.0, 800.0 * 1e-6);
  ASSERT_EQ(run("--seed 3 --out " + b.string() + " gen-inflow --steps 2000 --total 800").status, 0);
  EXPECT_EQ(slurp(a / "inflow.csv"), slurp(b / "inflow.csv"));
  EXPECT_EQ(slurp(a / "manifest.ini").substr(slurp(a / "manifest.ini").find("[run]")),
            slurp(b / "manifest.ini").substr(slurp(b / "manifest.ini").find("[run]")));
}

TEST(Cli, GenInflowZeroTotal) {
  const auto d = fresh("gen_zero");
  ASSERT_EQ(run("--out " + d.string() + " gen-inflow --steps 50 --total 0").status, 0);
  std::ifstream in(d / "inflow.csv");
  for (const auto& v : read_inflow_csv(in)) {
    for (double x : v) EXPECT_EQ(x, 0.0);
  }
}

TEST(Cli, TrainOneEpochIsReproducible) {
  const auto a = fresh("train_a"), b = fresh("train_b");
  auto r = run("--seed 4 --out " + a.string() + " train --epochs 1 --units 4");
  ASSERT_EQ(r.status, 0) << r.output;
  std::ifstream loss(a / "loss.csv");
  const auto table = read_csv(loss);
  EXPECT_EQ(table.header, (std::vector<std::string>{"epoch", "loss"}));
  EXPECT_EQ(table.rows.size(), 1u);
  ASSERT_EQ(run("--seed 4 --out " + b.string() + " train --epochs 1 --units 4").status, 0);
  EXPECT_EQ(slurp(a / "model.ckpt"), slurp(b / "model.ckpt"));
  EXPECT_FALSE(slurp(a / "model.ckpt").empty());
}

TEST(Cli, SimulateBaselineAndElmopp) {
  const auto d = fresh("sim");
  auto r = run("--out " + d.string() + " simulate --controller fixed-cycle");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("throughput "), std::string::npos);
  std::ifstream trace(d / "trial.csv");
  EXPECT_EQ(read_csv(trace).rows.size(), 2000u);

  r = run("--out " + d.string() + " simulate --controller elmopp");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("--model"), std::string::npos);
  r = run("--out " + d.string() + " simulate --controller elmopp --model " + (d / "missing.ckpt").string());
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("not found"), std::string::npos);

  const auto m = fresh("sim_model");
  ASSERT_EQ(run("--out " + m.string() + " train --epochs 1 --units 4").status, 0);
  const auto cfg = kRoot / "small_model.ini";
  std::ofstream(cfg) << "[predictor]\nunits = 4\n";
  r = run("--config " + cfg.string() + " --out " + d.string() + " simulate --controller elmopp --model " +
          (m / "model.ckpt").string());
  EXPECT_EQ(r.status, 0) << r.output;
}

TEST(Cli, ConfigErrorNamesTheKey) {
  const auto d = fresh("bad_cfg");
  const auto cfg = kRoot / "bad.ini";
  std::ofstream(cfg) << "[sim]\nt_mni = 3\n";
  const auto r = run("--config " + cfg.string() + " --out " + d.string() + " simulate --controller fixed-cycle");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("sim.t_mni"), std::string::npos) << r.output;
}

TEST(Cli, ManifestReloadsToTheSameConfig) {
  const auto d = fresh("manifest");
  ASSERT_EQ(run("--seed 11 --out " + d.string() + " gen-inflow --steps 10").status, 0);
  const auto first = slurp(d / "manifest.ini");
  const auto e = fresh("manifest2");
  ASSERT_EQ(run("--config " + (d / "manifest.ini").string() + " --out " + e.string() + " gen-inflow --steps 10")
                .status,
            0);
  EXPECT_EQ(first.substr(first.find("[run]")), slurp(e / "manifest.ini").substr(slurp(e / "manifest.ini").find("[run]")));
  EXPECT_NE(first.find("seed = 11"), std::string::npos);
}

TEST(Cli, SweepSingleTrialSingleTotal) {
  const auto d = fresh("sweep");
  const auto r = run("--out " + d.string() +
                     " sweep --trials 1 --totals 800 --controllers fixed-cycle,naive-urgency,longest-queue");
  ASSERT_EQ(r.status, 0) << r.output;
  std::ifstream in(d / "sweep.csv");
  const auto sweep = read_sweep_csv(in);
  EXPECT_EQ(sweep.records.size(), 3u);
  for (const auto& rec : sweep.records) EXPECT_EQ(rec.total, 800.0);
  std::ifstream sum(d / "summary.csv");
  const auto table = read_csv(sum);
  ASSERT_EQ(table.rows.size(), 3u);
  for (const auto& row : table.rows) EXPECT_EQ(row[table.column("sd")], "0");
  EXPECT_TRUE(fs::exists(d / "stats.csv"));
}

TEST(Cli, TableCommandPrintsPublishedValues) {
  const auto d = fresh("table");
  const auto r = run("--out " + d.string() + " paper-table");
  ASSERT_EQ(r.status, 0) << r.output;
  for (const char* t : {"17.6799", "69.4727", "85.0275", "1.6500"}) {
    EXPECT_NE(r.output.find(t), std::string::npos) << t;
  }
  std::ifstream in(d / "ttest_table.csv");
  const auto table = read_csv(in);
  ASSERT_EQ(table.rows.size(), 3u);
  for (const auto& row : table.rows) EXPECT_EQ(row[table.column("significant")], "true");
}

TEST(Cli, UnknownSubcommandFails) {
  EXPECT_NE(run("frobnicate").status, 0);
  EXPECT_NE(run("").status, 0);
}

}  // namespace
