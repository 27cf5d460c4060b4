#include "elmopp/chaos.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "elmopp/random.hpp"

namespace elmopp {

State4 derivative(const State4& s, const HyperchaosParams& p) {
  const auto [x, y, z, w] = s;
  return {p.a * (y - x) - p.e * w, x * z - p.h * y, p.b - x * y - p.c * z, p.k * y - p.d * w};
}

Trajectory euler_integrate(const State4& h0, double dt, std::size_t steps,
                           const HyperchaosParams& p) {
  if (!(dt > 0.0)) throw std::invalid_argument("euler_integrate: dt must be positive");
  if (steps == 0) throw std::invalid_argument("euler_integrate: steps must be >= 1");
  Trajectory traj;
  traj.dt = dt;
  traj.points.reserve(steps + 1);
  traj.points.push_back(h0);
  State4 h = h0;
  for (std::size_t n = 0; n < steps; ++n) {
    const State4 d = derivative(h, p);
    for (std::size_t i = 0; i < 4; ++i) h[i] += d[i] * dt;
    for (double v : h) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("euler_integrate: non-finite state at step " + std::to_string(n + 1));
      }
    }
    traj.points.push_back(h);
  }
  return traj;
}

double InflowSeries::sum() const {
  double s = 0.0;
  for (const auto& v : values) {
    for (double x : v) s += x;
  }
  return s;
}

State4 seeded_initial_state(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  State4 h0{};
  for (double& v : h0) v = uniform01(rng);
  return h0;
}

InflowSeries make_inflow(std::uint64_t seed, std::size_t n_steps, double total,
                         const HyperchaosParams& p, double dt, double span) {
  if (!(total >= 0.0)) throw std::invalid_argument("make_inflow: total must be >= 0");
  if (n_steps == 0) throw std::invalid_argument("make_inflow: n_steps must be >= 1");
  const auto steps = static_cast<std::size_t>(std::llround(span / dt));
  if (n_steps > steps + 1) {
    throw std::invalid_argument("make_inflow: more samples requested than trajectory points");
  }
  const Trajectory traj = euler_integrate(seeded_initial_state(seed), dt, steps, p);
  const std::size_t stride = traj.points.size() / n_steps;

  InflowSeries series;
  series.total = total;
  series.values.resize(n_steps);
  double l1 = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const auto& pt = traj.points[i * stride];
    for (std::size_t c = 0; c < 4; ++c) {
      series.values[i][c] = std::abs(pt[c]);
      l1 += series.values[i][c];
    }
  }
  const double factor = l1 > 0.0 ? total / l1 : 0.0;
  for (auto& v : series.values) {
    for (double& x : v) x *= factor;
  }
  return series;
}

InflowSeries training_series(std::uint64_t seed, std::size_t n_points, double total,
                             const HyperchaosParams& p) {
  return make_inflow(seed, n_points, total, p);
}

}  // namespace elmopp
