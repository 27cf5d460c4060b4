#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "elmopp/types.hpp"

namespace elmopp {

/// 4-D autonomous hyperchaotic system
///   x' = a(y - x) - e w,  y' = x z - h y,  z' = b - x y - c z,  w' = k y - d w.
struct HyperchaosParams {
  double a = 5.0;
  double b = 20.0;
  double c = 1.0;
  double d = 0.1;
  double e = 20.6;
  double h = 1.0;
  double k = 0.1;
};

// Published properties of the default attractor; recorded, not recomputed.
inline constexpr double kLargestLyapunovExponent = 0.24;
inline constexpr double kStiffnessRatio = -7.56 / 0.23;

inline constexpr double kDefaultStep = 0.01;
inline constexpr double kDefaultSpan = 2000.0;

using State4 = std::array<double, 4>;

State4 derivative(const State4& s, const HyperchaosParams& p);

struct Trajectory {
  std::vector<State4> points;  // steps + 1 entries, starting at the initial state
  double dt = kDefaultStep;
};

/// Forward Euler: h_{n+1} = h_n + h'(h_n) dt. Throws std::invalid_argument for
/// dt <= 0 or steps == 0 and std::runtime_error naming the step index if the
/// state leaves the finite range.
Trajectory euler_integrate(const State4& h0, double dt, std::size_t steps,
                           const HyperchaosParams& p = {});

/// Per-timestep inflow on the four inroads. Channels map x->N, y->E, z->S, w->W.
struct InflowSeries {
  std::vector<Inflow> values;
  double total = 0.0;

  double sum() const;
};

/// Seeded initial state in the unit hypercube, Euler over [0, span], uniform
/// stride down to `n_steps` samples, channelwise absolute value, division by
/// the L1 norm of the sampled series, then scaling to `total` vehicles.
/// Throws std::invalid_argument if total < 0 or n_steps is 0 or exceeds the
/// trajectory length.
InflowSeries make_inflow(std::uint64_t seed, std::size_t n_steps, double total,
                         const HyperchaosParams& p = {}, double dt = kDefaultStep,
                         double span = kDefaultSpan);

/// The same pipeline sampled to `n_points` for predictor training.
InflowSeries training_series(std::uint64_t seed, std::size_t n_points, double total,
                             const HyperchaosParams& p = {});

/// The initial state make_inflow draws for `seed`.
State4 seeded_initial_state(std::uint64_t seed);

}  // namespace elmopp
