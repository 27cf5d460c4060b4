// elmopp: inflow generation, predictor training, single trials, sweeps and
// the published t-tests.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elmopp/chaos.hpp"
#include "elmopp/csv.hpp"
#include "elmopp/experiment.hpp"
#include "elmopp/predictor.hpp"
#include "elmopp/run_config.hpp"
#include "elmopp/stats.hpp"

namespace fs = std::filesystem;
using namespace elmopp;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_dir = "out";
};

RunConfig load_config(const Globals& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

fs::path prepare_out(const Globals& g) {
  fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + g.out_dir + "': " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

// The manifest is itself a loadable config; the header lines are comments.
void write_manifest(const fs::path& dir, const std::string& command, const Globals& g, const RunConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  const fs::path path = dir / "manifest.ini";
  auto out = open_out(path);
  out << "# command = " << command << '\n';
  out << "# config = " << (g.config_path.empty() ? "(defaults)" : g.config_path) << '\n';
  out << "# out = " << g.out_dir << '\n';
  for (const auto& [k, v] : extra) out << "# " << k << " = " << v << '\n';
  out << '\n' << serialize_run_config(cfg);
  finish(out, path);
}

void cmd_gen_inflow(const Globals& g, std::optional<std::size_t> steps, std::optional<double> total) {
  RunConfig cfg = load_config(g);
  const std::size_t n = steps.value_or(cfg.sim.n_steps);
  const double budget = total.value_or(network_budget(cfg.inflow, cfg.inflow.total));
  const InflowSeries series = make_inflow(cfg.seed, n, budget);
  const fs::path dir = prepare_out(g);
  const fs::path path = dir / "inflow.csv";
  auto out = open_out(path);
  write_inflow_csv(out, series.values);
  finish(out, path);
  write_manifest(dir, "gen-inflow", g, cfg,
                 {{"steps", std::to_string(n)}, {"total", format_double(budget)}});
  std::cout << "wrote " << path.string() << " (" << n << " steps, sum " << format_double(series.sum())
            << ")\n";
}

void cmd_train(const Globals& g, std::optional<std::size_t> epochs, std::optional<std::size_t> depth,
               std::optional<std::size_t> units) {
  RunConfig cfg = load_config(g);
  if (epochs) cfg.predictor.epochs = *epochs;
  if (depth) cfg.predictor.depth = *depth;
  if (units) cfg.predictor.units = *units;
  cfg.validate();
  const PreparedTrial prepared = prepare_trial(cfg, cfg.seed, true);
  const fs::path dir = prepare_out(g);
  const fs::path model_path = dir / "model.ckpt";
  save_checkpoint_file(model_path.string(), *prepared.model);
  const fs::path loss_path = dir / "loss.csv";
  auto out = open_out(loss_path);
  write_loss_csv(out, prepared.report);
  finish(out, loss_path);
  write_manifest(dir, "train", g, cfg);
  const auto& loss = prepared.report.epoch_loss;
  std::cout << "trained " << loss.size() << " epochs on " << prepared.report.train_points << " points\n";
  if (!loss.empty()) {
    std::cout << "loss first " << format_double(loss.front()) << " last " << format_double(loss.back()) << '\n';
  }
  std::cout << "held-out one-step mse " << format_double(prepared.report.heldout_mse) << " (variance "
            << format_double(prepared.report.heldout_variance) << ")\n";
  std::cout << "wrote " << model_path.string() << " and " << loss_path.string() << '\n';
}

void cmd_simulate(const Globals& g, const std::string& model_path, const std::string& controller,
                  std::optional<double> total) {
  RunConfig cfg = load_config(g);
  if (!controller.empty()) {
    const auto kind = parse_controller(controller);
    if (!kind) throw std::invalid_argument("unknown controller '" + controller + "'");
    cfg.controller.kind = *kind;
  }
  if (total) cfg.inflow.total = *total;
  cfg.validate();

  PreparedTrial prepared = prepare_trial(cfg, cfg.seed, false);
  if (cfg.controller.kind == ControllerKind::Elmopp) {
    if (model_path.empty()) throw std::invalid_argument("--model is required for the elmopp controller");
    if (!fs::exists(model_path)) throw std::runtime_error("checkpoint '" + model_path + "' not found");
    prepared.model = load_checkpoint_file(model_path);
  }
  const TrialResult result = run_prepared_trial(cfg, cfg.controller.kind, prepared, cfg.inflow.total);

  const fs::path dir = prepare_out(g);
  const fs::path path = dir / "trial.csv";
  auto out = open_out(path);
  write_trial_csv(out, result);
  finish(out, path);
  write_manifest(dir, "simulate", g, cfg, {{"model", model_path.empty() ? "(none)" : model_path}});
  std::cout << "controller " << controller_name(cfg.controller.kind) << " total "
            << format_double(cfg.inflow.total) << '\n';
  std::cout << "throughput " << format_double(result.throughput) << " veh/s\n";
  std::cout << "activations " << result.activations.size() << ", dropped "
            << format_double(result.ledger.dropped) << ", remaining " << format_double(result.ledger.remaining)
            << '\n';
  std::cout << "wrote " << path.string() << '\n';
}

void cmd_sweep(const Globals& g, std::optional<std::size_t> trials, const std::vector<double>& totals,
               const std::vector<std::string>& controllers, std::optional<std::size_t> threads) {
  RunConfig cfg = load_config(g);
  if (trials) cfg.sweep.trials = *trials;
  if (!totals.empty()) cfg.sweep.totals = totals;
  if (!controllers.empty()) {
    cfg.sweep.controllers.clear();
    for (const auto& name : controllers) {
      const auto kind = parse_controller(name);
      if (!kind) throw std::invalid_argument("unknown controller '" + name + "'");
      cfg.sweep.controllers.push_back(*kind);
    }
  }
  if (threads) cfg.sweep.threads = *threads;
  cfg.validate();

  const SweepResult sweep = run_sweep(cfg, [&](std::size_t done) {
    std::cerr << "\rtrials " << done << "/" << cfg.sweep.trials << std::flush;
  });
  std::cerr << '\n';

  const fs::path dir = prepare_out(g);
  const fs::path sweep_path = dir / "sweep.csv";
  auto out = open_out(sweep_path);
  write_sweep_csv(out, sweep);
  finish(out, sweep_path);

  const auto cells = sweep.cells();
  const fs::path summary_path = dir / "summary.csv";
  auto sum_out = open_out(summary_path);
  write_summary_csv(sum_out, cells);
  finish(sum_out, summary_path);

  const auto rows = sweep_comparisons(sweep, cfg.sweep.alpha);
  const fs::path stats_path = dir / "stats.csv";
  auto stats_out = open_out(stats_path);
  write_stats_csv(stats_out, rows);
  finish(stats_out, stats_path);
  write_manifest(dir, "sweep", g, cfg);

  for (const auto& c : cells) {
    std::printf("%-14s total %6s mean %.5f sd %.5f n %zu\n", std::string(controller_name(c.controller)).c_str(),
                format_double(c.total).c_str(), c.summary.mean, c.summary.sd, c.summary.n);
  }
  for (const auto& r : rows) {
    std::printf("%-30s t %10.4f df %4.0f critical %.4f %s\n", r.comparison.c_str(), r.result.t, r.result.df,
                r.result.critical, r.result.significant ? "significant" : "not significant");
  }
  std::cout << "wrote " << sweep_path.string() << ", " << summary_path.string() << ", " << stats_path.string()
            << '\n';
}

void cmd_paper_table(const Globals& g) {
  RunConfig cfg = load_config(g);
  const auto rows = paper_table(cfg.sweep.alpha);
  const fs::path dir = prepare_out(g);
  const fs::path path = dir / "ttest_table.csv";
  auto out = open_out(path);
  write_stats_csv(out, rows);
  finish(out, path);
  write_manifest(dir, "paper-table", g, cfg);
  std::printf("%-12s %12s %8s %10s  %s\n", "comparison", "t", "df", "critical", "significant");
  for (const auto& r : rows) {
    std::printf("%-12s %12.4f %8.0f %10.4f  %s\n", r.comparison.c_str(), r.result.t, r.result.df,
                r.result.critical, r.result.significant ? "yes" : "no");
  }
  std::cout << "wrote " << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ELMOPP single-intersection signal control simulator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed (overrides run.seed)");
  app.add_option("--config", g.config_path, "Run configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();

  auto* gen = app.add_subcommand("gen-inflow", "Write a hyperchaotic inflow series as CSV");
  std::optional<std::size_t> gen_steps;
  std::optional<double> gen_total;
  gen->add_option("--steps", gen_steps, "Number of timesteps (default sim.n_steps)");
  gen->add_option("--total", gen_total, "Series sum in vehicles (default: network budget of inflow.total)");

  auto* trn = app.add_subcommand("train", "Pre-train the inflow predictor and save a checkpoint");
  std::optional<std::size_t> epochs, depth, units;
  trn->add_option("--epochs", epochs, "Training epochs");
  trn->add_option("--depth", depth, "NLSTM nesting depth");
  trn->add_option("--units", units, "Hidden units");

  auto* sim = app.add_subcommand("simulate", "Run one trial and write its per-step trace");
  std::string model_path, controller;
  std::optional<double> sim_total;
  sim->add_option("--model", model_path, "Predictor checkpoint (required for elmopp)");
  sim->add_option("--controller", controller, "elmopp, naive-urgency, fixed-cycle or longest-queue");
  sim->add_option("--total", sim_total, "Inflow total (overrides inflow.total)");

  auto* swp = app.add_subcommand("sweep", "Run totals x trials x controllers and the pairwise t-tests");
  std::optional<std::size_t> trials, threads;
  std::vector<double> totals;
  std::vector<std::string> controllers;
  swp->add_option("--trials", trials, "Trials per total");
  swp->add_option("--totals", totals, "Inflow totals")->delimiter(',');
  swp->add_option("--controllers", controllers, "Controllers to compare")->delimiter(',');
  swp->add_option("--threads", threads, "Worker threads");

  auto* tab = app.add_subcommand("paper-table", "Recompute the comparison table from the published summaries");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) cmd_gen_inflow(g, gen_steps, gen_total);
    if (trn->parsed()) cmd_train(g, epochs, depth, units);
    if (sim->parsed()) cmd_simulate(g, model_path, controller, sim_total);
    if (swp->parsed()) cmd_sweep(g, trials, totals, controllers, threads);
    if (tab->parsed()) cmd_paper_table(g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
