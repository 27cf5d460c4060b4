#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "elmopp/controllers.hpp"
#include "elmopp/intersection.hpp"
#include "elmopp/kvfile.hpp"
#include "elmopp/predictor.hpp"

namespace elmopp {

/// How an inflow total is spread: per inroad (the network receives four times
/// the total) or over the whole network.
enum class BudgetScope { PerInroad, Network };

struct InflowConfig {
  double total = 800.0;
  BudgetScope scope = BudgetScope::PerInroad;
  std::size_t series_points = 10000;
};

struct ControllerConfig {
  ControllerKind kind = ControllerKind::Elmopp;
  bool clamp_timing = true;
  double fixed_green = 30.0;
  bool online_learning = true;
};

struct SweepConfig {
  std::vector<double> totals{200.0, 400.0, 600.0, 800.0, 1000.0};
  std::size_t trials = 30;
  std::vector<ControllerKind> controllers{ControllerKind::Elmopp, ControllerKind::NaiveUrgency,
                                          ControllerKind::FixedCycle, ControllerKind::LongestQueue};
  std::size_t threads = 1;
  double alpha = 0.05;
};

/// Everything a command needs. An empty config file gives the defaults, which
/// describe the single-intersection experiment.
struct RunConfig {
  std::uint64_t seed = 1;
  SimConfig sim;
  ControllerConfig controller;
  TrainConfig predictor;
  InflowConfig inflow;
  SweepConfig sweep;

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

/// Sections [run], [sim], [controller], [predictor], [inflow], [sweep].
/// Unknown sections or keys and malformed values throw std::invalid_argument
/// whose message contains "section.key".
RunConfig parse_run_config(const KvDocument& doc);
RunConfig parse_run_config_string(std::string_view text);
RunConfig load_run_config(const std::string& path);

/// Normalized form: every key, fixed order, shortest round-trip numbers.
KvDocument run_config_to_kv(const RunConfig& cfg);
std::string serialize_run_config(const RunConfig& cfg);

std::string_view budget_scope_name(BudgetScope scope);

}  // namespace elmopp
