#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace elmopp {

/// Legal green-time bounds, in seconds. The maximum also fixes the length of
/// the prediction horizon used by cumulative urgency.
struct SignalTiming {
  int t_min = 10;
  int t_max = 120;
};

/// load * exp(T / t_max - 1). Throws std::invalid_argument if t_max <= 0.
double subedge_urgency(double load, double since_active, double t_max);

double configuration_urgency(std::span<const double> member_urgencies);

/// Triangular weight 2 (1/t_max - t/t_max^2) on 0..t_max, whose continuous mass
/// over [0, t_max] is 1. Throws std::out_of_range outside that interval.
double triangle_kernel(int t, int t_max);

/// Discrete convolution of the triangular kernel with the urgency profile.
/// `predicted_loads` holds t_max + 1 loads starting with the observed one; the
/// clock T is held at its present value over the whole horizon.
double cumulative_urgency(std::span<const double> predicted_loads, double since_active,
                          int t_max);

/// Sum of member cumulative urgencies. Profiles and clocks are per member.
double cumulative_configuration_urgency(std::span<const std::vector<double>> profiles,
                                        std::span<const double> clocks, int t_max);

/// Index of the largest urgency, lowest index on ties. Throws on empty input.
std::size_t select_configuration(std::span<const double> urgencies);

struct SwitchDecision {
  bool hold = true;
  std::size_t target = 0;  // configuration to run next step (== current when holding)
};

/// Green is held below t_min, forced off at t_max, and otherwise handed over
/// as soon as the best other configuration is at least as urgent.
SwitchDecision hold_or_switch(std::size_t current, double current_elapsed,
                              std::span<const double> urgencies, const SignalTiming& timing);

/// Unclamped variant: keep the current configuration only while it is the
/// maximum, else move to the argmax.
SwitchDecision argmax_or_hold(std::size_t current, std::span<const double> urgencies);

}  // namespace elmopp
