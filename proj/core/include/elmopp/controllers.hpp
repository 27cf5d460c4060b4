#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "elmopp/intersection.hpp"
#include "elmopp/predictor.hpp"

namespace elmopp {

enum class ControllerKind { Elmopp, NaiveUrgency, FixedCycle, LongestQueue };

std::string_view controller_name(ControllerKind kind);
/// Accepts "elmopp", "naive-urgency", "fixed-cycle", "longest-queue".
std::optional<ControllerKind> parse_controller(std::string_view name);

/// Source of future inflow for the cumulative controller.
class InflowForecaster {
 public:
  virtual ~InflowForecaster() = default;
  /// Called once per step with the inflow that just arrived.
  virtual void observe(const Inflow& arrived) = 0;
  /// Predicted inflow for the next `steps` steps.
  virtual std::vector<Inflow> horizon(std::size_t steps) = 0;
};

/// NLSTM forecaster with pointwise online learning. `previous` is the last
/// observation the model's state has not consumed yet.
class NlstmForecaster final : public InflowForecaster {
 public:
  NlstmForecaster(PredictorModel model, std::optional<Inflow> previous, bool online_learning = true);

  void observe(const Inflow& arrived) override;
  std::vector<Inflow> horizon(std::size_t steps) override;

  const PredictorModel& model() const { return model_; }
  const std::vector<double>& online_losses() const { return losses_; }

 private:
  PredictorModel model_;
  std::optional<Inflow> previous_;
  bool online_;
  std::vector<double> losses_;
};

/// Predicts no further arrivals: every future load equals the current one.
class ZeroForecaster final : public InflowForecaster {
 public:
  void observe(const Inflow&) override {}
  std::vector<Inflow> horizon(std::size_t steps) override;
};

/// Replays a known series, for oracle comparisons.
class ReplayForecaster final : public InflowForecaster {
 public:
  explicit ReplayForecaster(std::vector<Inflow> series) : series_(std::move(series)) {}
  void observe(const Inflow&) override { ++seen_; }
  std::vector<Inflow> horizon(std::size_t steps) override;

 private:
  std::vector<Inflow> series_;
  std::size_t seen_ = 0;
};

/// Future load of every subedge over a t_max horizon: the current load plus
/// the lane share of cumulative predicted inflow over lane capacity, clamped
/// to [0, 1]. Entry 0 is the current load.
std::vector<std::vector<double>> predicted_load_profiles(const Observation& obs,
                                                         std::span<const Inflow> forecast);

/// Cumulative-urgency controller (triangular kernel over forecast loads).
class ElmoppController final : public Controller {
 public:
  ElmoppController(std::unique_ptr<InflowForecaster> forecaster, bool clamp_timing = true);
  std::size_t decide(const Observation& obs) override;
  InflowForecaster& forecaster() { return *forecaster_; }
  const std::vector<double>& last_urgencies() const { return urgencies_; }

 private:
  std::unique_ptr<InflowForecaster> forecaster_;
  bool clamp_;
  std::vector<double> urgencies_;
};

/// Instantaneous urgency controller.
class NaiveUrgencyController final : public Controller {
 public:
  explicit NaiveUrgencyController(bool clamp_timing = true) : clamp_(clamp_timing) {}
  std::size_t decide(const Observation& obs) override;
  const std::vector<double>& last_urgencies() const { return urgencies_; }

 private:
  bool clamp_;
  std::vector<double> urgencies_;
};

/// Rotates through every configuration in order with equal green time.
class FixedCycleController final : public Controller {
 public:
  explicit FixedCycleController(double green_seconds = 30.0);
  std::size_t decide(const Observation& obs) override;

 private:
  double green_;
};

/// Greatest summed vehicle count, subject to the t_min / t_max clamp.
class LongestQueueController final : public Controller {
 public:
  std::size_t decide(const Observation& obs) override;
};

/// Reinterprets urgencies under the configured clamp mode.
std::size_t apply_decision(const Observation& obs, std::span<const double> urgencies, bool clamp_timing);

}  // namespace elmopp
