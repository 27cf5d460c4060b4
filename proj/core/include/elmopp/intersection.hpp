#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "elmopp/road_graph.hpp"
#include "elmopp/types.hpp"
#include "elmopp/urgency.hpp"

namespace elmopp {

/// Greenshield outflow q = L v_f (1 - L / k_j). Throws std::invalid_argument
/// if load is negative or exceeds k_j.
double greenshield_outflow(double load, double free_flow_speed, double jam_density);

inline constexpr std::size_t kSubedges = kInroads * kLaneGroups;

/// Index of lane group `lane` of inroad `inroad` (N, E, S, W order).
constexpr std::size_t subedge_index(std::size_t inroad, LaneGroup lane) {
  return inroad * kLaneGroups + static_cast<std::size_t>(lane);
}

struct SimConfig {
  std::size_t n_steps = 2000;
  double dt = 1.0;                   // seconds per step
  double inroad_capacity = 1000.0;   // vehicles
  std::array<double, kLaneGroups> lane_split{0.25, 0.5, 0.25};
  double jam_density = 1.0;
  double free_flow_speed = 10.0;     // m/s
  double startup_delay = 1.5;        // seconds of lost discharge per activation
  double initial_load = 200.0;       // vehicles per inroad
  SignalTiming timing{};

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

/// The simulated intersection: the centre of the 4-star and its eight
/// configurations expressed as subedge indices.
struct IntersectionLayout {
  RoadGraph graph;
  std::size_t center = 0;
  std::array<std::size_t, kInroads> inbound_edge{};   // N, E, S, W
  std::array<std::size_t, kInroads> outbound_edge{};
  std::vector<std::vector<std::size_t>> configurations;
};

IntersectionLayout make_layout(const SimConfig& cfg);

struct SubedgeState {
  double count = 0.0;
  double capacity = 0.0;
  double since_active = 0.0;  // T
  double startup_left = 0.0;  // seconds of start-up loss still to serve
};

struct IntersectionState {
  std::array<SubedgeState, kSubedges> subedges{};
  bool has_active = false;
  std::size_t active = 0;
  double active_elapsed = 0.0;  // seconds `active` has been green so far

  double load(std::size_t s) const;
  double inroad_count(std::size_t inroad) const;
};

IntersectionState initial_state(const SimConfig& cfg);

/// Quantity tensor of the layout graph for `state`; outbound roads stay empty.
Tensor3 quantity_tensor(const IntersectionLayout& layout, const IntersectionState& state);

/// What a controller sees before choosing the next green.
struct Observation {
  std::size_t step = 0;
  const IntersectionState* state = nullptr;
  const IntersectionLayout* layout = nullptr;
  const SimConfig* config = nullptr;
  Inflow arrived{};  // inflow added this step
};

class Controller {
 public:
  virtual ~Controller() = default;
  /// Configuration to keep green for this step.
  virtual std::size_t decide(const Observation& obs) = 0;
};

struct Activation {
  std::size_t configuration = 0;
  std::size_t start = 0;
  std::size_t length = 0;  // steps
};

struct ConservationLedger {
  double initial = 0.0;
  double inflow = 0.0;
  double discharged = 0.0;
  double remaining = 0.0;
  double dropped = 0.0;

  /// initial + inflow - (discharged + remaining + dropped).
  double imbalance() const { return initial + inflow - (discharged + remaining + dropped); }
};

struct TrialResult {
  double throughput = 0.0;  // vehicles per second
  std::vector<double> discharged;                   // per step
  std::vector<std::size_t> config_active;           // per step
  std::vector<std::array<double, kInroads>> loads;  // per step, after discharge
  std::vector<Activation> activations;              // the last one may be truncated
  std::array<double, kInroads> discharged_by_inroad{};
  ConservationLedger ledger;
  double min_load = 0.0;
  double max_load = 0.0;
  bool discharge_within_count = true;
  std::uint64_t seed = 0;
};

/// Advances one step: adds inflow (overflow dropped), asks the controller,
/// starts start-up timers on lane groups that just turned green, discharges
/// active lane groups and updates clocks. Returns vehicles discharged.
double step(IntersectionState& state, const IntersectionLayout& layout, const SimConfig& cfg,
            const Inflow& inflow, std::size_t step_index, Controller& controller,
            TrialResult* record = nullptr);

/// Throws std::invalid_argument if the series length differs from n_steps.
TrialResult run_trial(const SimConfig& cfg, std::span<const Inflow> inflow, Controller& controller,
                      std::uint64_t seed = 0);

}  // namespace elmopp
