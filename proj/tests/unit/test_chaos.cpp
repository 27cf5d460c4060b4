#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "elmopp/chaos.hpp"

namespace {

using namespace elmopp;

TEST(Hyperchaos, DefaultsAndConstants) {
  const HyperchaosParams p;
  EXPECT_EQ(p.a, 5.0);
  EXPECT_EQ(p.b, 20.0);
  EXPECT_EQ(p.c, 1.0);
  EXPECT_EQ(p.d, 0.1);
  EXPECT_EQ(p.e, 20.6);
  EXPECT_EQ(p.h, 1.0);
  EXPECT_EQ(p.k, 0.1);
  EXPECT_EQ(kLargestLyapunovExponent, 0.24);
  EXPECT_NEAR(kStiffnessRatio, -32.8695, 1e-4);
}

TEST(Hyperchaos, DerivativeExamples) {
  EXPECT_EQ(derivative({0, 0, 0, 0}, {}), (State4{0, 0, 20, 0}));
  const State4 d = derivative({1, 1, 1, 1}, {});
  EXPECT_DOUBLE_EQ(d[0], -20.6);
  EXPECT_DOUBLE_EQ(d[1], 0.0);
  EXPECT_DOUBLE_EQ(d[2], 18.0);
  EXPECT_NEAR(d[3], 0.0, 1e-17);
  EXPECT_EQ(derivative({1, 0, 0, 0}, {}), (State4{-5, 0, 20, 0}));
}

TEST(Euler, OneStepFromOrigin) {
  const auto traj = euler_integrate({0, 0, 0, 0}, 0.01, 1);
  ASSERT_EQ(traj.points.size(), 2u);
  EXPECT_EQ(traj.points[0], (State4{0, 0, 0, 0}));
  EXPECT_NEAR(traj.points[1][2], 0.2, 1e-15);
  EXPECT_EQ(traj.points[1][0], 0.0);
  EXPECT_EQ(traj.points[1][1], 0.0);
  EXPECT_EQ(traj.points[1][3], 0.0);
}

TEST(Euler, FixedPointIsPreserved) {
  HyperchaosParams p;
  p.b = 0.0;  // the origin becomes an equilibrium
  for (double dt : {0.001, 0.1, 3.0}) {
    const auto traj = euler_integrate({0, 0, 0, 0}, dt, 50, p);
    for (const auto& s : traj.points) EXPECT_EQ(s, (State4{0, 0, 0, 0}));
  }
}

TEST(Euler, LongTrajectoryIsBounded) {
  const State4 h0 = seeded_initial_state(2024);
  for (double v : h0) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  const auto traj = euler_integrate(h0, 0.01, 200000);
  EXPECT_EQ(traj.points.size(), 200001u);
  double worst = 0.0;
  for (const auto& s : traj.points) {
    for (double v : s) worst = std::max(worst, std::abs(v));
  }
  EXPECT_LT(worst, 1e3);
}

TEST(Euler, FirstOrderConvergence) {
  const State4 h0{0.3, 0.6, 0.2, 0.9};
  const double t_end = 0.5;
  auto endpoint = [&](double dt) {
    return euler_integrate(h0, dt, static_cast<std::size_t>(std::llround(t_end / dt))).points.back();
  };
  const State4 ref = endpoint(1e-5);
  auto err = [&](const State4& s) {
    double e = 0.0;
    for (std::size_t i = 0; i < 4; ++i) e = std::max(e, std::abs(s[i] - ref[i]));
    return e;
  };
  const double ratio = err(endpoint(0.01)) / err(endpoint(0.005));
  EXPECT_GE(ratio, 1.5);
  EXPECT_LE(ratio, 3.0);
}

TEST(Euler, InvalidArgumentsAndBlowUp) {
  EXPECT_THROW(euler_integrate({0, 0, 0, 0}, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(euler_integrate({0, 0, 0, 0}, 0.01, 0), std::invalid_argument);
  try {
    euler_integrate({1e200, 1e200, 1e200, 1e200}, 1.0, 100);
    FAIL() << "expected blow-up";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(Inflow, SumsToBudget) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    for (double total : {1.0, 200.0, 800.0, 3200.0}) {
      const auto s = make_inflow(seed, 2000, total);
      EXPECT_EQ(s.values.size(), 2000u);
      EXPECT_LE(std::abs(s.sum() - total), 1e-6 * std::max(total, 1.0));
      for (const auto& v : s.values) {
        for (double x : v) EXPECT_GE(x, 0.0);
      }
    }
  }
}

TEST(Inflow, ZeroTotalAndErrors) {
  const auto s = make_inflow(3, 100, 0.0);
  for (const auto& v : s.values) {
    for (double x : v) EXPECT_EQ(x, 0.0);
  }
  EXPECT_THROW(make_inflow(3, 100, -1.0), std::invalid_argument);
  EXPECT_THROW(make_inflow(3, 0, 10.0), std::invalid_argument);
  EXPECT_THROW(make_inflow(3, 300000, 10.0), std::invalid_argument);
}

TEST(Inflow, Deterministic) {
  const auto a = make_inflow(7, 2000, 800);
  const auto b = make_inflow(7, 2000, 800);
  EXPECT_EQ(a.values, b.values);
}

TEST(Inflow, DownsamplesWithUniformStride) {
  const auto s = make_inflow(5, 2000, 1.0);
  const auto traj = euler_integrate(seeded_initial_state(5), 0.01, 200000);
  const std::size_t stride = 200001 / 2000;
  double l1 = 0.0;
  for (std::size_t i = 0; i < 2000; ++i) {
    for (double v : traj.points[i * stride]) l1 += std::abs(v);
  }
  for (std::size_t i : {0u, 1u, 777u, 1999u}) {
    for (std::size_t c = 0; c < 4; ++c) {
      EXPECT_NEAR(s.values[i][c], std::abs(traj.points[i * stride][c]) / l1, 1e-15);
    }
  }
}

TEST(TrainingSeries, LengthSumAndSensitivity) {
  const auto a = training_series(1, 10000, 1.0);
  const auto b = training_series(2, 10000, 1.0);
  EXPECT_EQ(a.values.size(), 10000u);
  EXPECT_NEAR(a.sum(), 1.0, 1e-6);
  EXPECT_NE(a.values, b.values);
}

}  // namespace
