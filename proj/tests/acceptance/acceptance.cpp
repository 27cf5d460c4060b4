// Acceptance checks. Each criterion prints one PASS or FAIL line; detail lines
// are indented. Usage: elmopp_acceptance [criterion ...] (no argument runs all).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "elmopp/chaos.hpp"
#include "elmopp/experiment.hpp"
#include "elmopp/nlstm.hpp"
#include "elmopp/random.hpp"
#include "elmopp/road_graph.hpp"
#include "elmopp/stats.hpp"
#include "elmopp/urgency.hpp"

using namespace elmopp;

namespace {

// Tolerances and reference values.
constexpr double kTTol = 0.001;
constexpr double kCriticalTol = 0.0005;
constexpr double kTableSeconds = 1.0;
constexpr double kKernelDiscreteTol = 1e-12;
constexpr double kKernelContinuousTol = 1e-6;
constexpr double kAnchorTol = 1e-12;
constexpr double kTrajectoryBound = 1e3;
constexpr double kConvergenceLo = 1.5;
constexpr double kConvergenceHi = 3.0;
constexpr double kBudgetRelTol = 1e-6;
constexpr double kGradientTol = 1e-4;
constexpr double kGradientSeconds = 60.0;
constexpr double kConstantMse = 1e-4;
constexpr double kConservationTol = 1e-9;
constexpr double kBandFraction = 0.15;
constexpr double kSweepSeconds = 600.0;
constexpr std::size_t kInvariantTrials = 30;

const std::map<double, double> kReferenceThroughput = {
    {200.0, 2.31937}, {400.0, 2.17839}, {600.0, 2.06249}, {800.0, 1.97497}, {1000.0, 1.92143}};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      std::printf("  failed: %s\n", what.c_str());
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool ttest_table() {
  Check c;
  const auto t0 = Clock::now();
  const auto rows = paper_table(0.05);
  const double elapsed = seconds_since(t0);
  const double expected[] = {17.6799, 69.4727, 85.0275};
  const char* names[] = {"ELMOPP>ITLC", "ELMOPP>OAF", "ITLC>OAF"};
  c.expect(rows.size() == 3, "three rows");
  for (std::size_t i = 0; i < rows.size() && i < 3; ++i) {
    const auto& r = rows[i].result;
    std::printf("  %-12s t %.4f df %.0f critical %.4f %s\n", rows[i].comparison.c_str(), r.t, r.df, r.critical,
                r.significant ? "significant" : "not significant");
    c.expect(rows[i].comparison == names[i], "row name " + rows[i].comparison);
    c.expect(std::abs(r.t - expected[i]) <= kTTol, fmt("t %.6f vs %.4f", r.t, expected[i]));
    c.expect(std::abs(r.critical - 1.6500) <= kCriticalTol, fmt("critical %.6f", r.critical));
    c.expect(r.df == 298.0, "df 298");
    c.expect(r.significant, "significant");
  }
  c.expect(elapsed < kTableSeconds, fmt("runtime %.3f s", elapsed));
  return c.ok;
}

bool kernel_mass() {
  Check c;
  for (int t_max : {10, 60, 120, 1000}) {
    double s = 0.0;
    for (int t = 0; t <= t_max; ++t) s += triangle_kernel(t, t_max);
    const double want = (t_max + 1.0) / t_max;
    std::printf("  t_max %4d discrete mass %.15f\n", t_max, s);
    c.expect(std::abs(s - want) <= kKernelDiscreteTol, fmt("discrete mass %.15f at t_max %.0f", s, t_max));

    // The kernel depends on t / t_max only, so a t_max scaled by M samples the
    // same continuous shape on a grid of spacing t_max / (t_max M), each sample
    // already multiplied by the spacing. Trapezoid rule over that grid.
    const int fine = t_max * 1000;
    double q = 0.0;
    for (int t = 0; t <= fine; ++t) {
      const double w = (t == 0 || t == fine) ? 0.5 : 1.0;
      q += w * triangle_kernel(t, fine);
    }
    std::printf("  t_max %4d continuous mass %.12f\n", t_max, q);
    c.expect(std::abs(q - 1.0) <= kKernelContinuousTol, fmt("continuous mass %.12f", q));
  }
  return c.ok;
}

bool urgency_anchors() {
  Check c;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst0 = 0.0, worst1 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double load = u(rng);
    worst0 = std::max(worst0, std::abs(subedge_urgency(load, 0.0, 120.0) - load / std::exp(1.0)));
    worst1 = std::max(worst1, std::abs(subedge_urgency(load, 120.0, 120.0) - load));
  }
  std::printf("  worst |u(T=0) - load/e| %.3e, worst |u(T=t_max) - load| %.3e\n", worst0, worst1);
  c.expect(worst0 <= kAnchorTol, "T=0 anchor");
  c.expect(worst1 <= kAnchorTol, "T=t_max anchor");
  return c.ok;
}

bool euler_ode() {
  Check c;
  c.expect(derivative({0, 0, 0, 0}, {}) == State4{0, 0, 20, 0}, "derivative at origin");
  const auto one = euler_integrate({0, 0, 0, 0}, 0.01, 1).points.back();
  c.expect(one[0] == 0 && one[1] == 0 && std::abs(one[2] - 0.2) < 1e-15 && one[3] == 0, "one Euler step");

  const auto traj = euler_integrate(seeded_initial_state(1), 0.01, 200000);
  double worst = 0.0;
  for (const auto& s : traj.points) {
    for (double v : s) worst = std::max(worst, std::abs(v));
  }
  std::printf("  200000-step trajectory max |state| %.4f\n", worst);
  c.expect(traj.points.size() == 200001 && std::isfinite(worst) && worst < kTrajectoryBound, "bounded trajectory");

  const State4 h0{0.3, 0.6, 0.2, 0.9};
  const double t_end = 0.5;
  auto endpoint = [&](double dt) {
    return euler_integrate(h0, dt, static_cast<std::size_t>(std::llround(t_end / dt))).points.back();
  };
  const State4 ref = endpoint(1e-5);
  auto err = [&](double dt) {
    const State4 s = endpoint(dt);
    double e = 0.0;
    for (std::size_t i = 0; i < 4; ++i) e = std::max(e, std::abs(s[i] - ref[i]));
    return e;
  };
  const double ratio = err(0.01) / err(0.005);
  std::printf("  convergence ratio err(0.01)/err(0.005) = %.4f\n", ratio);
  c.expect(ratio >= kConvergenceLo && ratio <= kConvergenceHi, fmt("ratio %.4f", ratio));

  double worst_rel = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (double total : {200.0, 800.0, 4000.0}) {
      const auto s = make_inflow(seed, 2000, total);
      worst_rel = std::max(worst_rel, std::abs(s.sum() - total) / total);
    }
  }
  std::printf("  worst relative budget error %.3e\n", worst_rel);
  c.expect(worst_rel <= kBudgetRelTol, "budget");
  return c.ok;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

bool gradient_check() {
  Check c;
  const auto t0 = Clock::now();
  const std::size_t in = 4, out = 4, T = 5;
  double worst_all = 0.0;
  for (std::size_t depth : {1u, 2u}) {
    double worst_depth = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const std::size_t H = 1 + seed % 4;
      std::mt19937_64 rng(seed * 7919 + depth);
      NlstmRegressor net(in, H, depth, out);
      auto p = random_vector(net.param_count(), rng, 0.6);
      std::vector<Eigen::VectorXd> xs(T), ys(T);
      for (std::size_t t = 0; t < T; ++t) {
        const auto x = random_vector(in, rng, 1.0);
        const auto y = random_vector(out, rng, 1.0);
        xs[t] = Eigen::Map<const Eigen::VectorXd>(x.data(), in);
        ys[t] = Eigen::Map<const Eigen::VectorXd>(y.data(), out);
      }
      const auto s0 = net.cell().zero_state();
      std::vector<double> grad(p.size(), 0.0);
      auto s = s0;
      net.window_loss_and_gradient(p, s, xs, ys, grad);
      const double h = 1e-5;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double keep = p[k];
        p[k] = keep + h;
        auto sp = s0;
        const double fp = net.window_loss(p, sp, xs, ys);
        p[k] = keep - h;
        auto sm = s0;
        const double fm = net.window_loss(p, sm, xs, ys);
        p[k] = keep;
        const double fd = (fp - fm) / (2 * h);
        const double rel = std::abs(grad[k] - fd) / std::max({std::abs(grad[k]), std::abs(fd), 1e-6});
        worst_depth = std::max(worst_depth, rel);
      }
    }
    std::printf("  depth %zu worst relative error %.3e\n", depth, worst_depth);
    worst_all = std::max(worst_all, worst_depth);
  }
  const double elapsed = seconds_since(t0);
  std::printf("  runtime %.2f s\n", elapsed);
  c.expect(worst_all < kGradientTol, fmt("worst relative error %.3e", worst_all));
  c.expect(elapsed < kGradientSeconds, "runtime");
  return c.ok;
}

bool training_learnability() {
  Check c;
  {
    const std::vector<Inflow> series(1000, Inflow{0.4, 0.1, 0.25, 0.7});
    PredictorModel m(1, 16, 3);
    const auto report = train(m, series, TrainConfig{});
    const double mse = report.epoch_loss.back();
    std::printf("  constant series: %zu epochs, final training mse %.3e, held-out mse %.3e\n",
                report.epoch_loss.size(), mse, report.heldout_mse);
    c.expect(report.epoch_loss.size() == 100, "100 epochs");
    c.expect(mse < kConstantMse, fmt("constant series mse %.3e", mse));
    c.expect(report.heldout_mse < kConstantMse, fmt("constant series held-out mse %.3e", report.heldout_mse));
  }
  {
    const std::uint64_t seed = child_seed(1, 0);
    const auto series = training_series(seed, 10000, 1.0).values;
    PredictorModel m(1, 16, child_seed(seed, 1));
    const auto report = train(m, series, TrainConfig{});
    std::printf("  hyperchaotic series: first loss %.3e, final loss %.3e, held-out mse %.3e, variance %.3e\n",
                report.epoch_loss.front(), report.epoch_loss.back(), report.heldout_mse,
                report.heldout_variance);
    c.expect(report.heldout_mse < report.heldout_variance, "held-out mse below variance");
  }
  return c.ok;
}

bool same_trial(const TrialResult& a, const TrialResult& b) {
  return a.discharged == b.discharged && a.config_active == b.config_active && a.loads == b.loads &&
         a.throughput == b.throughput;
}

bool simulation_invariants() {
  Check c;
  const RunConfig cfg;
  double worst_imbalance = 0.0, min_load = 1.0, max_load = 0.0;
  std::size_t bad_activations = 0, activations = 0;
  for (std::size_t i = 0; i < kInvariantTrials; ++i) {
    const std::uint64_t seed = child_seed(cfg.seed, i);
    const PreparedTrial prepared = prepare_trial(cfg, seed, true);
    const TrialResult r = run_prepared_trial(cfg, ControllerKind::Elmopp, prepared, cfg.inflow.total);
    worst_imbalance = std::max(worst_imbalance, std::abs(r.ledger.imbalance()));
    min_load = std::min(min_load, r.min_load);
    max_load = std::max(max_load, r.max_load);
    for (std::size_t k = 0; k < r.activations.size(); ++k) {
      const auto len = static_cast<int>(r.activations[k].length);
      const bool last = k + 1 == r.activations.size();
      ++activations;
      if (len > cfg.sim.timing.t_max || (!last && len < cfg.sim.timing.t_min)) ++bad_activations;
    }
    const TrialResult again = run_prepared_trial(cfg, ControllerKind::Elmopp, prepared, cfg.inflow.total);
    c.expect(same_trial(r, again), "rerun differs for trial " + std::to_string(i));
    if (i < 3) {
      const PreparedTrial fresh = prepare_trial(cfg, seed, true);
      const TrialResult r3 = run_prepared_trial(cfg, ControllerKind::Elmopp, fresh, cfg.inflow.total);
      c.expect(same_trial(r, r3), "retrained trial differs for trial " + std::to_string(i));
    }
    if (i == 0) {
      std::printf("  trial 0: throughput %.6f veh/s, %zu activations, dropped %.3g\n", r.throughput,
                  r.activations.size(), r.ledger.dropped);
    }
  }
  std::printf("  %zu trials: worst imbalance %.3e, loads in [%.4f, %.4f], %zu/%zu activations out of range\n",
              kInvariantTrials, worst_imbalance, min_load, max_load, bad_activations, activations);
  c.expect(worst_imbalance <= kConservationTol, "conservation");
  c.expect(min_load >= 0.0 && max_load <= 1.0, "loads in [0, 1]");
  c.expect(bad_activations == 0, "activation lengths");
  return c.ok;
}

bool throughput_band() {
  Check c;
  RunConfig cfg;
  cfg.sweep.controllers = {ControllerKind::Elmopp, ControllerKind::NaiveUrgency, ControllerKind::FixedCycle};
  const auto t0 = Clock::now();
  const SweepResult sweep = run_sweep(cfg);
  const double elapsed = seconds_since(t0);
  for (const auto& [total, ref] : kReferenceThroughput) {
    const auto el = describe(sweep.throughputs(ControllerKind::Elmopp, total));
    const auto nv = describe(sweep.throughputs(ControllerKind::NaiveUrgency, total));
    const auto fc = describe(sweep.throughputs(ControllerKind::FixedCycle, total));
    const double lo = ref * (1 - kBandFraction), hi = ref * (1 + kBandFraction);
    std::printf("  total %4.0f: elmopp %.5f (sd %.5f) band [%.5f, %.5f] | naive %.5f | fixed %.5f\n", total,
                el.mean, el.sd, lo, hi, nv.mean, fc.mean);
    c.expect(el.n == cfg.sweep.trials, "trial count");
    c.expect(el.mean >= lo && el.mean <= hi, fmt("elmopp mean %.5f outside band around %.5f", el.mean, ref));
  }
  const auto el = describe(sweep.throughputs(ControllerKind::Elmopp));
  const auto nv = describe(sweep.throughputs(ControllerKind::NaiveUrgency));
  const auto fc = describe(sweep.throughputs(ControllerKind::FixedCycle));
  std::printf("  over %zu paired runs: elmopp %.6f, naive %.6f, fixed %.6f; runtime %.1f s\n", el.n, el.mean,
              nv.mean, fc.mean, elapsed);
  c.expect(el.mean >= nv.mean, fmt("elmopp mean %.6f < naive %.6f", el.mean, nv.mean));
  c.expect(el.mean >= fc.mean, fmt("elmopp mean %.6f < fixed-cycle %.6f", el.mean, fc.mean));
  c.expect(elapsed < kSweepSeconds, "runtime");
  return c.ok;
}

RoadGraph star(const std::vector<Approach>& sides) {
  RoadGraph g;
  const auto a = g.add_vertex("a");
  for (auto side : sides) {
    const auto v = g.add_vertex(std::string("leaf_") + std::string(approach_label(side)));
    g.add_edge(v, a, {250, 500, 250}, side);
    g.add_edge(a, v, {250, 500, 250}, opposite(side));
  }
  return g;
}

std::set<std::set<SubedgeRef>> brute_force(const RoadGraph& g) {
  const auto inroads = inroads_of(g, 0);
  std::vector<Approach> legs;
  for (const auto& r : inroads) legs.push_back(r.approach);
  std::vector<std::pair<SubedgeRef, Approach>> subs;
  for (const auto& r : inroads) {
    for (std::size_t k = 0; k < kLaneGroups; ++k) {
      subs.push_back({SubedgeRef{r.source, r.index, static_cast<LaneGroup>(k)}, r.approach});
    }
  }
  const std::size_t n = subs.size();
  std::vector<unsigned> legal;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = i + 1; j < n && ok; ++j) {
        ok = !((mask >> i & 1u) && (mask >> j & 1u) &&
               subedges_conflict(subs[i].second, subs[i].first.lane, subs[j].second, subs[j].first.lane, legs));
      }
    }
    if (ok) legal.push_back(mask);
  }
  std::set<std::set<SubedgeRef>> out;
  for (unsigned m : legal) {
    if (std::any_of(legal.begin(), legal.end(), [m](unsigned o) { return o != m && (o & m) == m; })) continue;
    std::set<SubedgeRef> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1u) s.insert(subs[i].first);
    }
    out.insert(s);
  }
  return out;
}

bool configurations() {
  Check c;
  const auto g = star({Approach::North, Approach::East, Approach::South, Approach::West});
  const auto set = enumerate_configurations(g, 0);
  std::set<std::set<std::string>> got;
  for (const auto& conf : set.configurations) {
    std::set<std::string> names;
    for (const auto& m : conf.members) {
      names.insert(std::string(approach_label(*g.edges[m.index].approach)) + "." + std::string(lane_label(m.lane)));
    }
    got.insert(names);
  }
  const std::set<std::set<std::string>> expected = {
      {"N.left", "S.left"},
      {"N.middle", "N.right", "S.middle", "S.right"},
      {"E.left", "W.left"},
      {"E.middle", "E.right", "W.middle", "W.right"},
      {"N.left", "N.middle", "N.right"},
      {"S.left", "S.middle", "S.right"},
      {"E.left", "E.middle", "E.right"},
      {"W.left", "W.middle", "W.right"},
  };
  std::printf("  4-leg vertex: %zu configurations\n", set.configurations.size());
  c.expect(set.configurations.size() == 8 && got == expected, "4-leg configuration list");

  const std::vector<std::vector<Approach>> instances = {
      {Approach::North, Approach::East, Approach::South, Approach::West},
      {Approach::North, Approach::East, Approach::South},
      {Approach::East, Approach::South, Approach::West},
      {Approach::South, Approach::West, Approach::North},
      {Approach::West, Approach::North, Approach::East},
  };
  for (const auto& sides : instances) {
    const auto gi = star(sides);
    const auto si = enumerate_configurations(gi, 0);
    std::set<std::set<SubedgeRef>> enumerated;
    for (const auto& conf : si.configurations) enumerated.insert({conf.members.begin(), conf.members.end()});
    const auto oracle = brute_force(gi);
    std::printf("  %zu-leg instance: enumerator %zu, brute force %zu\n", sides.size(), si.configurations.size(),
                oracle.size());
    c.expect(enumerated == oracle && enumerated.size() == si.configurations.size(),
             std::to_string(sides.size()) + "-leg brute-force agreement");
  }
  return c.ok;
}

const std::vector<std::pair<std::string, std::function<bool()>>> kCriteria = {
    {"ttest_table", ttest_table},
    {"kernel_mass", kernel_mass},
    {"urgency_anchors", urgency_anchors},
    {"euler_ode", euler_ode},
    {"gradient_check", gradient_check},
    {"training_learnability", training_learnability},
    {"simulation_invariants", simulation_invariants},
    {"throughput_band", throughput_band},
    {"configurations", configurations},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  if (wanted.empty()) {
    for (const auto& [name, fn] : kCriteria) wanted.push_back(name);
  }
  int failures = 0;
  for (const auto& name : wanted) {
    const auto it = std::find_if(kCriteria.begin(), kCriteria.end(), [&](const auto& c) { return c.first == name; });
    if (it == kCriteria.end()) {
      std::printf("FAIL %s (unknown criterion)\n", name.c_str());
      ++failures;
      continue;
    }
    const bool ok = it->second();
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", name.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
