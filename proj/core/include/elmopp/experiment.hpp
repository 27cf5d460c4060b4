#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elmopp/chaos.hpp"
#include "elmopp/controllers.hpp"
#include "elmopp/intersection.hpp"
#include "elmopp/predictor.hpp"
#include "elmopp/run_config.hpp"
#include "elmopp/stats.hpp"

namespace elmopp {

/// Vehicles the whole network receives over a trial for `total`.
double network_budget(const InflowConfig& inflow, double total);

/// Per-seed material shared by every total and controller: the unit-budget
/// series and, when requested, the predictor trained on its leading part.
struct PreparedTrial {
  std::uint64_t seed = 0;
  std::vector<Inflow> shape;  // unit total over series_points
  std::size_t train_points = 0;
  std::optional<PredictorModel> model;
  TrainReport report;
};

/// Seeds the series with `seed` and the model with child_seed(seed, 1).
PreparedTrial prepare_trial(const RunConfig& cfg, std::uint64_t seed, bool with_model);

/// The simulated window (the points after the training part) rescaled so
/// that it sums to network_budget(total).
struct TrialInflow {
  std::vector<Inflow> series;
  double factor = 0.0;
  Inflow previous{};  // last training point, same units
};

TrialInflow trial_inflow(const RunConfig& cfg, const PreparedTrial& prepared, double total);

/// Builds the controller. Elmopp needs `prepared.model`; throws
/// std::invalid_argument otherwise.
std::unique_ptr<Controller> make_controller(const RunConfig& cfg, ControllerKind kind,
                                            const PreparedTrial& prepared, const TrialInflow& inflow);

TrialResult run_prepared_trial(const RunConfig& cfg, ControllerKind kind, const PreparedTrial& prepared,
                               double total);

struct SweepRecord {
  ControllerKind controller = ControllerKind::Elmopp;
  double total = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double throughput = 0.0;
};

struct SweepCell {
  ControllerKind controller = ControllerKind::Elmopp;
  double total = 0.0;
  SampleSummary summary;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // ordered by trial, total, controller

  std::vector<double> throughputs(ControllerKind kind) const;
  std::vector<double> throughputs(ControllerKind kind, double total) const;
  std::vector<SweepCell> cells() const;
};

/// Trial i uses seed child_seed(cfg.seed, i) for every total and controller,
/// so comparisons are paired. Trials run on cfg.sweep.threads threads.
/// `progress` is called after each finished trial with the count done.
SweepResult run_sweep(const RunConfig& cfg, const std::function<void(std::size_t)>& progress = {});

/// One-sided tests between every controller pair, greater mean first, df =
/// n_a + n_b - 2.
std::vector<ComparisonRow> sweep_comparisons(const SweepResult& sweep, double alpha);

// CSV input and output.
void write_inflow_csv(std::ostream& out, std::span<const Inflow> series);
std::vector<Inflow> read_inflow_csv(std::istream& in);
void write_trial_csv(std::ostream& out, const TrialResult& result);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
SweepResult read_sweep_csv(std::istream& in);
void write_stats_csv(std::ostream& out, std::span<const ComparisonRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SweepCell> cells);
void write_loss_csv(std::ostream& out, const TrainReport& report);

}  // namespace elmopp
