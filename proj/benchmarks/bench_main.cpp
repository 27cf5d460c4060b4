#include <benchmark/benchmark.h>

#include <vector>

#include "elmopp/chaos.hpp"
#include "elmopp/controllers.hpp"
#include "elmopp/experiment.hpp"
#include "elmopp/nlstm.hpp"
#include "elmopp/predictor.hpp"
#include "elmopp/random.hpp"
#include "elmopp/urgency.hpp"

namespace {

using namespace elmopp;

void BM_CellStep(benchmark::State& state) {
  const auto depth = static_cast<std::size_t>(state.range(0));
  PredictorModel model(depth, 16, 7);
  const Inflow x{0.3, 0.1, 0.7, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_next(x));
}
BENCHMARK(BM_CellStep)->Arg(1)->Arg(2)->Arg(3);

void BM_WindowGradient(benchmark::State& state) {
  const auto depth = static_cast<std::size_t>(state.range(0));
  NlstmRegressor net(4, 16, depth, 4);
  std::mt19937_64 rng(3);
  std::vector<double> params(net.param_count());
  for (double& p : params) p = uniform(rng, -0.25, 0.25);
  std::vector<double> grad(net.param_count());
  std::vector<Eigen::VectorXd> xs(10, Eigen::VectorXd::Constant(4, 0.4));
  std::vector<Eigen::VectorXd> ys(10, Eigen::VectorXd::Constant(4, 0.5));
  for (auto _ : state) {
    auto s = net.cell().zero_state();
    benchmark::DoNotOptimize(net.window_loss_and_gradient(params, s, xs, ys, grad));
  }
}
BENCHMARK(BM_WindowGradient)->Arg(1)->Arg(3);

void BM_CumulativeUrgency(benchmark::State& state) {
  const int t_max = static_cast<int>(state.range(0));
  std::vector<double> profile(static_cast<std::size_t>(t_max) + 1);
  for (std::size_t t = 0; t < profile.size(); ++t) profile[t] = 0.2 + 0.001 * static_cast<double>(t);
  for (auto _ : state) benchmark::DoNotOptimize(cumulative_urgency(profile, 30.0, t_max));
}
BENCHMARK(BM_CumulativeUrgency)->Arg(60)->Arg(120)->Arg(1000);

void BM_EulerTrajectory(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(euler_integrate({0.5, 0.5, 0.5, 0.5}, 0.01, steps));
}
BENCHMARK(BM_EulerTrajectory)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

void BM_TrialNaive(benchmark::State& state) {
  RunConfig cfg;
  const auto prepared = prepare_trial(cfg, 11, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_prepared_trial(cfg, ControllerKind::NaiveUrgency, prepared, 800.0));
  }
}
BENCHMARK(BM_TrialNaive)->Unit(benchmark::kMillisecond);

void BM_TrialElmopp(benchmark::State& state) {
  RunConfig cfg;
  cfg.predictor.epochs = 1;
  const auto prepared = prepare_trial(cfg, 11, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_prepared_trial(cfg, ControllerKind::Elmopp, prepared, 800.0));
  }
}
BENCHMARK(BM_TrialElmopp)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
  const auto series = training_series(5, 10000, 1.0).values;
  TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    PredictorModel model(1, 16, 9);
    benchmark::DoNotOptimize(train(model, series, cfg));
  }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
