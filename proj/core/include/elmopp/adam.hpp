#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace elmopp {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// Bias-corrected Adam update in place. Throws std::invalid_argument when the
/// parameter, gradient and moment sizes disagree.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace elmopp
