#include "elmopp/urgency.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace elmopp {

double subedge_urgency(double load, double since_active, double t_max) {
  if (!(t_max > 0.0)) throw std::invalid_argument("subedge_urgency: t_max must be positive");
  return load * std::exp(since_active / t_max - 1.0);
}

double configuration_urgency(std::span<const double> member_urgencies) {
  return std::accumulate(member_urgencies.begin(), member_urgencies.end(), 0.0);
}

double triangle_kernel(int t, int t_max) {
  if (t_max <= 0) throw std::invalid_argument("triangle_kernel: t_max must be positive");
  if (t < 0 || t > t_max) {
    throw std::out_of_range("triangle_kernel: t=" + std::to_string(t) + " outside [0, " +
                            std::to_string(t_max) + "]");
  }
  const double tm = t_max;
  return 2.0 * (1.0 / tm - t / (tm * tm));
}

double cumulative_urgency(std::span<const double> predicted_loads, double since_active,
                          int t_max) {
  if (predicted_loads.size() != static_cast<std::size_t>(t_max) + 1) {
    throw std::invalid_argument("cumulative_urgency: profile has " +
                                std::to_string(predicted_loads.size()) + " entries, expected " +
                                std::to_string(t_max + 1));
  }
  const double clock_factor = std::exp(since_active / t_max - 1.0);
  double sum = 0.0;
  for (int t = 0; t <= t_max; ++t) {
    sum += predicted_loads[t] * clock_factor * triangle_kernel(t, t_max);
  }
  return sum;
}

double cumulative_configuration_urgency(std::span<const std::vector<double>> profiles,
                                        std::span<const double> clocks, int t_max) {
  if (profiles.size() != clocks.size()) {
    throw std::invalid_argument("cumulative_configuration_urgency: profiles/clocks size mismatch");
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < profiles.size(); ++m) {
    sum += cumulative_urgency(profiles[m], clocks[m], t_max);
  }
  return sum;
}

std::size_t select_configuration(std::span<const double> urgencies) {
  if (urgencies.empty()) throw std::invalid_argument("select_configuration: no configurations");
  std::size_t best = 0;
  for (std::size_t i = 1; i < urgencies.size(); ++i) {
    if (urgencies[i] > urgencies[best]) best = i;
  }
  return best;
}

namespace {

// Argmax over all configurations except `current`; nullopt-like sentinel when
// there is no other configuration.
std::size_t best_other(std::size_t current, std::span<const double> urgencies) {
  std::size_t best = urgencies.size();
  for (std::size_t i = 0; i < urgencies.size(); ++i) {
    if (i == current) continue;
    if (best == urgencies.size() || urgencies[i] > urgencies[best]) best = i;
  }
  return best;
}

}  // namespace

SwitchDecision hold_or_switch(std::size_t current, double current_elapsed,
                              std::span<const double> urgencies, const SignalTiming& timing) {
  if (current >= urgencies.size()) {
    throw std::out_of_range("hold_or_switch: current configuration out of range");
  }
  const SwitchDecision hold{true, current};
  if (current_elapsed < timing.t_min) return hold;
  const std::size_t other = best_other(current, urgencies);
  if (other == urgencies.size()) return hold;  // nothing to hand over to
  if (current_elapsed >= timing.t_max || urgencies[other] >= urgencies[current]) {
    return SwitchDecision{false, other};
  }
  return hold;
}

SwitchDecision argmax_or_hold(std::size_t current, std::span<const double> urgencies) {
  const std::size_t best = select_configuration(urgencies);
  if (current < urgencies.size() && urgencies[current] == urgencies[best]) {
    return SwitchDecision{true, current};
  }
  return SwitchDecision{false, best};
}

}  // namespace elmopp
