#include "elmopp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "elmopp/csv.hpp"
#include "elmopp/random.hpp"

namespace elmopp {

double network_budget(const InflowConfig& inflow, double total) {
  return inflow.scope == BudgetScope::PerInroad ? total * static_cast<double>(kInroads) : total;
}

namespace {

std::size_t training_points(const RunConfig& cfg) {
  const auto n = static_cast<std::size_t>(
      std::floor(cfg.predictor.train_fraction * static_cast<double>(cfg.inflow.series_points)));
  return std::clamp<std::size_t>(n, 2, cfg.inflow.series_points);
}

}  // namespace

PreparedTrial prepare_trial(const RunConfig& cfg, std::uint64_t seed, bool with_model) {
  cfg.validate();
  PreparedTrial p;
  p.seed = seed;
  p.shape = training_series(seed, cfg.inflow.series_points, 1.0).values;
  p.train_points = training_points(cfg);
  if (with_model) {
    PredictorModel model(cfg.predictor.depth, cfg.predictor.units, child_seed(seed, 1), cfg.predictor.adam);
    p.report = train(model, p.shape, cfg.predictor);
    p.model = std::move(model);
  }
  return p;
}

TrialInflow trial_inflow(const RunConfig& cfg, const PreparedTrial& prepared, double total) {
  const std::size_t begin = prepared.train_points;
  if (begin + cfg.sim.n_steps > prepared.shape.size() || begin == 0) {
    throw std::invalid_argument("trial_inflow: series too short for the simulated window");
  }
  double sum = 0.0;
  for (std::size_t t = begin; t < begin + cfg.sim.n_steps; ++t) {
    for (double x : prepared.shape[t]) sum += x;
  }
  TrialInflow out;
  const double budget = network_budget(cfg.inflow, total);
  out.factor = sum > 0.0 ? budget / sum : 0.0;
  out.series.reserve(cfg.sim.n_steps);
  for (std::size_t t = begin; t < begin + cfg.sim.n_steps; ++t) {
    Inflow v = prepared.shape[t];
    for (double& x : v) x *= out.factor;
    out.series.push_back(v);
  }
  out.previous = prepared.shape[begin - 1];
  for (double& x : out.previous) x *= out.factor;
  return out;
}

std::unique_ptr<Controller> make_controller(const RunConfig& cfg, ControllerKind kind,
                                            const PreparedTrial& prepared, const TrialInflow& inflow) {
  switch (kind) {
    case ControllerKind::Elmopp: {
      if (!prepared.model) throw std::invalid_argument("elmopp controller requires a trained model");
      PredictorModel model = *prepared.model;
      if (inflow.factor > 0.0) model.rescale_units(inflow.factor);
      auto forecaster =
          std::make_unique<NlstmForecaster>(std::move(model), inflow.previous, cfg.controller.online_learning);
      return std::make_unique<ElmoppController>(std::move(forecaster), cfg.controller.clamp_timing);
    }
    case ControllerKind::NaiveUrgency:
      return std::make_unique<NaiveUrgencyController>(cfg.controller.clamp_timing);
    case ControllerKind::FixedCycle:
      return std::make_unique<FixedCycleController>(cfg.controller.fixed_green);
    case ControllerKind::LongestQueue:
      return std::make_unique<LongestQueueController>();
  }
  throw std::invalid_argument("unknown controller kind");
}

TrialResult run_prepared_trial(const RunConfig& cfg, ControllerKind kind, const PreparedTrial& prepared,
                               double total) {
  const TrialInflow inflow = trial_inflow(cfg, prepared, total);
  auto controller = make_controller(cfg, kind, prepared, inflow);
  return run_trial(cfg.sim, inflow.series, *controller, prepared.seed);
}

std::vector<double> SweepResult::throughputs(ControllerKind kind) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.controller == kind) out.push_back(r.throughput);
  }
  return out;
}

std::vector<double> SweepResult::throughputs(ControllerKind kind, double total) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.controller == kind && r.total == total) out.push_back(r.throughput);
  }
  return out;
}

std::vector<SweepCell> SweepResult::cells() const {
  std::vector<SweepCell> out;
  for (const auto& r : records) {
    const bool seen = std::any_of(out.begin(), out.end(), [&](const SweepCell& c) {
      return c.controller == r.controller && c.total == r.total;
    });
    if (seen) continue;
    SweepCell cell;
    cell.controller = r.controller;
    cell.total = r.total;
    cell.summary = describe(throughputs(r.controller, r.total));
    out.push_back(cell);
  }
  std::sort(out.begin(), out.end(), [](const SweepCell& a, const SweepCell& b) {
    if (a.controller != b.controller) return a.controller < b.controller;
    return a.total < b.total;
  });
  return out;
}

SweepResult run_sweep(const RunConfig& cfg, const std::function<void(std::size_t)>& progress) {
  cfg.validate();
  const bool need_model = std::find(cfg.sweep.controllers.begin(), cfg.sweep.controllers.end(),
                                    ControllerKind::Elmopp) != cfg.sweep.controllers.end();
  const std::size_t trials = cfg.sweep.trials;
  std::vector<std::vector<SweepRecord>> per_trial(trials);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        const std::uint64_t seed = child_seed(cfg.seed, i);
        const PreparedTrial prepared = prepare_trial(cfg, seed, need_model);
        auto& rows = per_trial[i];
        for (double total : cfg.sweep.totals) {
          for (auto kind : cfg.sweep.controllers) {
            const TrialResult r = run_prepared_trial(cfg, kind, prepared, total);
            rows.push_back({kind, total, i, seed, r.throughput});
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(trials);
        return;
      }
      const std::size_t n = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(n);
      }
    }
  };

  const std::size_t threads = std::min(cfg.sweep.threads, trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  for (auto& rows : per_trial) {
    result.records.insert(result.records.end(), rows.begin(), rows.end());
  }
  return result;
}

std::vector<ComparisonRow> sweep_comparisons(const SweepResult& sweep, double alpha) {
  std::vector<ControllerKind> kinds;
  for (const auto& r : sweep.records) {
    if (std::find(kinds.begin(), kinds.end(), r.controller) == kinds.end()) kinds.push_back(r.controller);
  }
  std::vector<ComparisonRow> rows;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    for (std::size_t j = i + 1; j < kinds.size(); ++j) {
      const auto a_samples = sweep.throughputs(kinds[i]);
      const auto b_samples = sweep.throughputs(kinds[j]);
      if (a_samples.size() < 2 || b_samples.size() < 2) continue;
      auto a = summarize(a_samples);
      auto b = summarize(b_samples);
      auto ka = kinds[i];
      auto kb = kinds[j];
      if (b.mean > a.mean) {
        std::swap(a, b);
        std::swap(ka, kb);
      }
      const double df = static_cast<double>(a.n + b.n - 2);
      rows.push_back({std::string(controller_name(ka)) + ">" + std::string(controller_name(kb)),
                      t_test(a, b, df, alpha)});
    }
  }
  return rows;
}

void write_inflow_csv(std::ostream& out, std::span<const Inflow> series) {
  CsvWriter w(out, {"t", "n", "e", "s", "w"});
  for (std::size_t t = 0; t < series.size(); ++t) {
    w.field(t);
    for (double x : series[t]) w.field(x);
    w.end_row();
  }
}

std::vector<Inflow> read_inflow_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t cols[] = {table.column("n"), table.column("e"), table.column("s"), table.column("w")};
  std::vector<Inflow> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Inflow v{};
    for (std::size_t c = 0; c < kInroads; ++c) v[c] = parse_double(row.at(cols[c]));
    out.push_back(v);
  }
  return out;
}

void write_trial_csv(std::ostream& out, const TrialResult& result) {
  CsvWriter w(out, {"step", "config_active", "discharged", "load_n", "load_e", "load_s", "load_w"});
  for (std::size_t t = 0; t < result.discharged.size(); ++t) {
    w.field(t).field(result.config_active[t]).field(result.discharged[t]);
    for (double l : result.loads[t]) w.field(l);
    w.end_row();
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  CsvWriter w(out, {"controller", "total_vehicles", "trial", "seed", "throughput"});
  for (const auto& r : sweep.records) {
    w.field(controller_name(r.controller)).field(r.total).field(r.trial).field(
        static_cast<unsigned long long>(r.seed));
    w.field(r.throughput);
    w.end_row();
  }
}

SweepResult read_sweep_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t c_ctl = table.column("controller");
  const std::size_t c_total = table.column("total_vehicles");
  const std::size_t c_trial = table.column("trial");
  const std::size_t c_seed = table.column("seed");
  const std::size_t c_tp = table.column("throughput");
  SweepResult result;
  for (const auto& row : table.rows) {
    const auto kind = parse_controller(row.at(c_ctl));
    if (!kind) throw std::invalid_argument("sweep csv: unknown controller '" + row.at(c_ctl) + "'");
    SweepRecord r;
    r.controller = *kind;
    r.total = parse_double(row.at(c_total));
    r.trial = static_cast<std::size_t>(parse_int(row.at(c_trial)));
    r.seed = std::stoull(row.at(c_seed));
    r.throughput = parse_double(row.at(c_tp));
    result.records.push_back(r);
  }
  return result;
}

void write_stats_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  CsvWriter w(out, {"comparison", "t", "df", "critical", "significant"});
  for (const auto& row : rows) {
    w.field(row.comparison).field(row.result.t).field(row.result.df).field(row.result.critical);
    w.field(row.result.significant);
    w.end_row();
  }
}

void write_summary_csv(std::ostream& out, std::span<const SweepCell> cells) {
  CsvWriter w(out, {"controller", "total_vehicles", "mean", "sd", "n"});
  for (const auto& c : cells) {
    w.field(controller_name(c.controller)).field(c.total).field(c.summary.mean).field(c.summary.sd);
    w.field(c.summary.n);
    w.end_row();
  }
}

void write_loss_csv(std::ostream& out, const TrainReport& report) {
  CsvWriter w(out, {"epoch", "loss"});
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    w.field(e + 1).field(report.epoch_loss[e]);
    w.end_row();
  }
}

}  // namespace elmopp
