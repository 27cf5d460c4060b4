#include "elmopp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "elmopp/random.hpp"

namespace elmopp {

using Eigen::VectorXd;

PredictorModel::PredictorModel(std::size_t depth, std::size_t hidden_size, std::uint64_t seed,
                               AdamConfig adam)
    : net_(kChannels, hidden_size, depth, kChannels),
      params_(net_.param_count(), 0.0),
      grad_(net_.param_count(), 0.0),
      adam_(net_.param_count()),
      adam_cfg_(adam),
      seed_(seed),
      state_(net_.cell().zero_state()) {
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  for (double& p : params_) p = uniform(rng, -bound, bound);

  const auto& cell = net_.cell();
  const std::size_t H = cell.hidden_size();
  for (std::size_t l = 0; l < cell.depth(); ++l) {
    const std::size_t n = cell.level_input_size(l) + H;
    const std::size_t bias = cell.weight_offset(l) + 4 * H * n;
    for (std::size_t j = 0; j < H; ++j) params_[bias + H + j] = 1.0;
  }
}

void PredictorModel::set_scale(const Inflow& scale) {
  for (double s : scale) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("PredictorModel: scale must be positive");
  }
  scale_ = scale;
}

void PredictorModel::rescale_units(double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("rescale_units: factor must be positive");
  for (double& s : scale_) s *= factor;
}

void PredictorModel::reset_state() { state_ = net_.cell().zero_state(); }

VectorXd PredictorModel::normalize(const Inflow& x) const {
  VectorXd v(kChannels);
  for (std::size_t c = 0; c < kChannels; ++c) v[c] = x[c] / scale_[c];
  return v;
}

Inflow PredictorModel::denormalize(const VectorXd& y) const {
  Inflow out{};
  for (std::size_t c = 0; c < kChannels; ++c) out[c] = std::max(0.0, y[c] * scale_[c]);
  return out;
}

Inflow PredictorModel::predict_next(const Inflow& x) {
  thread_local NlstmCell::StepCache cache;
  if (cache.levels.size() != depth() ||
      (depth() > 0 && static_cast<std::size_t>(cache.levels[0].out.size()) != hidden_size())) {
    cache = net_.cell().make_cache();
  }
  net_.cell().step(params_, state_, normalize(x), cache);
  return denormalize(net_.readout(params_, state_.h));
}

std::vector<Inflow> PredictorModel::predict_horizon(const Inflow& x0, std::size_t steps) {
  const auto saved = state_;
  std::vector<Inflow> out;
  out.reserve(steps);
  Inflow x = x0;
  for (std::size_t s = 0; s < steps; ++s) {
    x = predict_next(x);
    out.push_back(x);
  }
  state_ = saved;
  return out;
}

double PredictorModel::online_update(const Inflow& x_prev, const Inflow& x_obs) {
  const VectorXd in = normalize(x_prev);
  const VectorXd target = normalize(x_obs);
  std::fill(grad_.begin(), grad_.end(), 0.0);
  const double loss = net_.window_loss_and_gradient(params_, state_, std::span(&in, 1),
                                                    std::span(&target, 1), grad_);
  adam_step(params_, grad_, adam_, adam_cfg_);
  return loss;
}

void PredictorModel::warm_up(std::span<const Inflow> inputs) {
  for (const auto& x : inputs) (void)predict_next(x);
}

TrainReport train(PredictorModel& model, std::span<const Inflow> series, const TrainConfig& cfg) {
  if (series.size() < 2) throw std::invalid_argument("train: series needs at least 2 points");
  if (cfg.batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction <= 1.0)) {
    throw std::invalid_argument("train: train_fraction must be in (0, 1]");
  }
  const std::size_t n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(series.size()))),
      2, series.size());
  const auto training = series.first(n_train);

  Inflow scale{};
  for (const auto& x : training) {
    for (std::size_t c = 0; c < PredictorModel::kChannels; ++c) scale[c] = std::max(scale[c], x[c]);
  }
  for (double& s : scale) {
    if (!(s > 0.0)) s = 1.0;
  }
  model.set_scale(scale);
  model.set_adam_config(cfg.adam);

  std::vector<VectorXd> inputs;
  std::vector<VectorXd> targets;
  inputs.reserve(n_train - 1);
  targets.reserve(n_train - 1);
  for (std::size_t t = 0; t + 1 < n_train; ++t) {
    inputs.push_back(model.normalize(training[t]));
    targets.push_back(model.normalize(training[t + 1]));
  }
  const std::size_t pairs = inputs.size();

  TrainReport report;
  report.train_points = n_train;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto state = model.net_.cell().zero_state();
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < pairs; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, pairs - start);
      std::fill(model.grad_.begin(), model.grad_.end(), 0.0);
      const double loss = model.net_.window_loss_and_gradient(
          model.params_, state, std::span(inputs).subspan(start, len),
          std::span(targets).subspan(start, len), model.grad_);
      adam_step(model.params_, model.grad_, model.adam_, cfg.adam);
      loss_sum += loss * static_cast<double>(len);
    }
    report.epoch_loss.push_back(loss_sum / static_cast<double>(pairs));
  }

  if (n_train < series.size()) {
    report.heldout_mse = one_step_mse(model, series, n_train);
    const auto tail = series.subspan(n_train);
    double var_sum = 0.0;
    for (std::size_t c = 0; c < PredictorModel::kChannels; ++c) {
      double mean = 0.0;
      for (const auto& x : tail) mean += x[c];
      mean /= static_cast<double>(tail.size());
      double v = 0.0;
      for (const auto& x : tail) v += (x[c] - mean) * (x[c] - mean);
      var_sum += v / static_cast<double>(tail.size());
    }
    report.heldout_variance = var_sum / static_cast<double>(PredictorModel::kChannels);
  }

  // Leave the state ready to consume the last training point.
  model.reset_state();
  model.warm_up(training.first(n_train - 1));
  return report;
}

double one_step_mse(PredictorModel& model, std::span<const Inflow> series, std::size_t begin) {
  if (begin == 0 || begin >= series.size()) throw std::invalid_argument("one_step_mse: bad split");
  const auto saved = model.state();
  model.reset_state();
  model.warm_up(series.first(begin - 1));
  double sum = 0.0;
  for (std::size_t t = begin; t < series.size(); ++t) {
    const Inflow pred = model.predict_next(series[t - 1]);
    for (std::size_t c = 0; c < PredictorModel::kChannels; ++c) {
      const double e = pred[c] - series[t][c];
      sum += e * e;
    }
  }
  model.set_state(saved);
  return sum / static_cast<double>((series.size() - begin) * PredictorModel::kChannels);
}

}  // namespace elmopp
