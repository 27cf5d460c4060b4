#include "elmopp/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace elmopp {

std::string_view controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::Elmopp: return "elmopp";
    case ControllerKind::NaiveUrgency: return "naive-urgency";
    case ControllerKind::FixedCycle: return "fixed-cycle";
    case ControllerKind::LongestQueue: return "longest-queue";
  }
  return "elmopp";
}

std::optional<ControllerKind> parse_controller(std::string_view name) {
  for (auto k : {ControllerKind::Elmopp, ControllerKind::NaiveUrgency, ControllerKind::FixedCycle,
                 ControllerKind::LongestQueue}) {
    if (controller_name(k) == name) return k;
  }
  return std::nullopt;
}

NlstmForecaster::NlstmForecaster(PredictorModel model, std::optional<Inflow> previous,
                                 bool online_learning)
    : model_(std::move(model)), previous_(previous), online_(online_learning) {}

void NlstmForecaster::observe(const Inflow& arrived) {
  if (previous_) {
    if (online_) {
      losses_.push_back(model_.online_update(*previous_, arrived));
    } else {
      model_.predict_next(*previous_);
    }
  }
  previous_ = arrived;
}

std::vector<Inflow> NlstmForecaster::horizon(std::size_t steps) {
  if (!previous_) return std::vector<Inflow>(steps, Inflow{});
  return model_.predict_horizon(*previous_, steps);
}

std::vector<Inflow> ZeroForecaster::horizon(std::size_t steps) {
  return std::vector<Inflow>(steps, Inflow{});
}

std::vector<Inflow> ReplayForecaster::horizon(std::size_t steps) {
  std::vector<Inflow> out(steps, Inflow{});
  for (std::size_t s = 0; s < steps && seen_ + s < series_.size(); ++s) out[s] = series_[seen_ + s];
  return out;
}

std::vector<std::vector<double>> predicted_load_profiles(const Observation& obs,
                                                         std::span<const Inflow> forecast) {
  const auto& cfg = *obs.config;
  const auto& st = *obs.state;
  const auto t_max = static_cast<std::size_t>(cfg.timing.t_max);
  std::vector<std::vector<double>> profiles(kSubedges, std::vector<double>(t_max + 1, 0.0));
  for (std::size_t r = 0; r < kInroads; ++r) {
    for (std::size_t k = 0; k < kLaneGroups; ++k) {
      const std::size_t s = r * kLaneGroups + k;
      const auto& sub = st.subedges[s];
      auto& p = profiles[s];
      p[0] = st.load(s);
      if (sub.capacity <= 0.0) continue;
      double arrived = 0.0;
      for (std::size_t t = 1; t <= t_max; ++t) {
        if (t - 1 < forecast.size()) arrived += forecast[t - 1][r] * cfg.lane_split[k];
        p[t] = std::clamp((sub.count + arrived) / sub.capacity, 0.0, 1.0);
      }
    }
  }
  return profiles;
}

std::size_t apply_decision(const Observation& obs, std::span<const double> urgencies, bool clamp_timing) {
  const auto& st = *obs.state;
  if (!st.has_active) return select_configuration(urgencies);
  const auto d = clamp_timing ? hold_or_switch(st.active, st.active_elapsed, urgencies, obs.config->timing)
                              : argmax_or_hold(st.active, urgencies);
  return d.target;
}

ElmoppController::ElmoppController(std::unique_ptr<InflowForecaster> forecaster, bool clamp_timing)
    : forecaster_(std::move(forecaster)), clamp_(clamp_timing) {
  if (!forecaster_) throw std::invalid_argument("ElmoppController: forecaster required");
}

std::size_t ElmoppController::decide(const Observation& obs) {
  forecaster_->observe(obs.arrived);
  const int t_max = obs.config->timing.t_max;
  const auto forecast = forecaster_->horizon(static_cast<std::size_t>(t_max));
  const auto profiles = predicted_load_profiles(obs, forecast);
  const auto& configs = obs.layout->configurations;
  urgencies_.assign(configs.size(), 0.0);
  for (std::size_t c = 0; c < configs.size(); ++c) {
    double u = 0.0;
    for (std::size_t s : configs[c]) {
      u += cumulative_urgency(profiles[s], obs.state->subedges[s].since_active, t_max);
    }
    urgencies_[c] = u;
  }
  return apply_decision(obs, urgencies_, clamp_);
}

std::size_t NaiveUrgencyController::decide(const Observation& obs) {
  const auto& configs = obs.layout->configurations;
  const double t_max = obs.config->timing.t_max;
  urgencies_.assign(configs.size(), 0.0);
  for (std::size_t c = 0; c < configs.size(); ++c) {
    double u = 0.0;
    for (std::size_t s : configs[c]) {
      u += subedge_urgency(obs.state->load(s), obs.state->subedges[s].since_active, t_max);
    }
    urgencies_[c] = u;
  }
  return apply_decision(obs, urgencies_, clamp_);
}

FixedCycleController::FixedCycleController(double green_seconds) : green_(green_seconds) {
  if (!(green_seconds > 0.0)) throw std::invalid_argument("FixedCycleController: green must be positive");
}

std::size_t FixedCycleController::decide(const Observation& obs) {
  const auto& st = *obs.state;
  const std::size_t n = obs.layout->configurations.size();
  if (!st.has_active) return 0;
  if (st.active_elapsed + 1e-9 >= green_) return (st.active + 1) % n;
  return st.active;
}

std::size_t LongestQueueController::decide(const Observation& obs) {
  const auto& configs = obs.layout->configurations;
  std::vector<double> queue(configs.size(), 0.0);
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::size_t s : configs[c]) queue[c] += obs.state->subedges[s].count;
  }
  return apply_decision(obs, queue, true);
}

}  // namespace elmopp
