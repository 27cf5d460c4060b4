#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "elmopp/adam.hpp"
#include "elmopp/nlstm.hpp"
#include "elmopp/types.hpp"

namespace elmopp {

struct TrainConfig {
  std::size_t depth = 1;
  std::size_t units = 16;
  std::size_t epochs = 100;
  std::size_t batch_size = 10;
  double train_fraction = 0.8;
  AdamConfig adam{};
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean window MSE per epoch, normalized units
  std::size_t train_points = 0;
  double heldout_mse = 0.0;        // one-step MSE on the held-out tail, vehicle units
  double heldout_variance = 0.0;   // mean per-channel variance of that tail
};

/// Next-step inflow predictor: an NLSTM regressor over the four inroad
/// channels, with per-channel input scaling and Adam state.
///
/// The model is stateful. `predict_next` and `online_update` advance the
/// recurrent state; `predict_horizon` restores it before returning.
class PredictorModel {
 public:
  static constexpr std::size_t kChannels = kInroads;

  /// Uniform init in [-1/sqrt(H), 1/sqrt(H)], forget-gate biases 1.
  PredictorModel(std::size_t depth, std::size_t hidden_size, std::uint64_t seed,
                 AdamConfig adam = {});

  const NlstmRegressor& network() const { return net_; }
  std::size_t depth() const { return net_.cell().depth(); }
  std::size_t hidden_size() const { return net_.cell().hidden_size(); }
  std::uint64_t seed() const { return seed_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  const AdamState& optimizer() const { return adam_; }
  AdamState& optimizer() { return adam_; }
  const AdamConfig& adam_config() const { return adam_cfg_; }
  void set_adam_config(const AdamConfig& cfg) { adam_cfg_ = cfg; }

  const Inflow& scale() const { return scale_; }
  void set_scale(const Inflow& scale);
  /// Multiplies every channel scale by `factor`, so a model trained on one
  /// vehicle budget serves the same series rescaled to another.
  void rescale_units(double factor);

  const NlstmCell::State& state() const { return state_; }
  void set_state(NlstmCell::State s) { state_ = std::move(s); }
  void reset_state();

  /// One cell step on `x` plus readout; output clamped at 0.
  Inflow predict_next(const Inflow& x);

  /// Feeds each prediction back as the next input. Recurrent state is left
  /// as it was on entry.
  std::vector<Inflow> predict_horizon(const Inflow& x0, std::size_t steps);

  /// Single-sample Adam step on (x_prev -> x_obs). Returns the sample MSE
  /// (normalized units) before the step. Advances the state past x_prev.
  double online_update(const Inflow& x_prev, const Inflow& x_obs);

  /// Consumes inputs without learning.
  void warm_up(std::span<const Inflow> inputs);

  Eigen::VectorXd normalize(const Inflow& x) const;
  Inflow denormalize(const Eigen::VectorXd& y) const;

  friend TrainReport train(PredictorModel& model, std::span<const Inflow> series,
                           const TrainConfig& cfg);
  friend void save_checkpoint(std::ostream& out, const PredictorModel& model);
  friend PredictorModel load_checkpoint(std::istream& in);

 private:
  NlstmRegressor net_;
  std::vector<double> params_;
  std::vector<double> grad_;
  AdamState adam_;
  AdamConfig adam_cfg_;
  Inflow scale_{1.0, 1.0, 1.0, 1.0};
  std::uint64_t seed_;
  NlstmCell::State state_;
};

/// Fits next-step prediction on the leading `train_fraction` of `series`
/// with truncated BPTT over consecutive windows of `batch_size` steps, one
/// Adam step per window. Input scaling is set from the per-channel maximum of
/// the training part. The held-out evaluation runs on the remaining tail.
/// Throws std::invalid_argument if the series has fewer than 2 points.
TrainReport train(PredictorModel& model, std::span<const Inflow> series, const TrainConfig& cfg);

/// One-step MSE (vehicle units) on series[begin..end) after warming the state
/// on series[0..begin). Leaves the model state as it was.
double one_step_mse(PredictorModel& model, std::span<const Inflow> series, std::size_t begin);

/// Plain-text checkpoint. Doubles are written in shortest round-trip form, so
/// a loaded model predicts bitwise identically.
void save_checkpoint(std::ostream& out, const PredictorModel& model);
PredictorModel load_checkpoint(std::istream& in);
void save_checkpoint_file(const std::string& path, const PredictorModel& model);
PredictorModel load_checkpoint_file(const std::string& path);

}  // namespace elmopp
