#include "elmopp/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "elmopp/graph_io.hpp"

namespace elmopp {

namespace {

std::size_t inroad_of(Approach a) {
  switch (a) {
    case Approach::North: return 0;
    case Approach::East: return 1;
    case Approach::South: return 2;
    case Approach::West: return 3;
  }
  return 0;
}

// Neumaier compensated sum.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

void require(bool ok, const char* field) {
  if (!ok) throw std::invalid_argument(std::string("SimConfig: invalid ") + field);
}

}  // namespace

double greenshield_outflow(double load, double free_flow_speed, double jam_density) {
  if (!(load >= 0.0) || load > jam_density) {
    throw std::invalid_argument("greenshield_outflow: load outside [0, jam_density]");
  }
  return load * free_flow_speed * (1.0 - load / jam_density);
}

void SimConfig::validate() const {
  require(n_steps >= 1, "n_steps");
  require(dt > 0.0 && std::isfinite(dt), "dt");
  require(inroad_capacity > 0.0 && std::isfinite(inroad_capacity), "inroad_capacity");
  double split = 0.0;
  for (double r : lane_split) {
    require(r >= 0.0 && std::isfinite(r), "lane_split");
    split += r;
  }
  require(std::abs(split - 1.0) < 1e-9, "lane_split (must sum to 1)");
  require(jam_density > 0.0 && std::isfinite(jam_density), "jam_density");
  require(free_flow_speed >= 0.0 && std::isfinite(free_flow_speed), "free_flow_speed");
  require(startup_delay >= 0.0 && std::isfinite(startup_delay), "startup_delay");
  require(initial_load >= 0.0 && initial_load <= inroad_capacity, "initial_load");
  require(timing.t_min > 0 && timing.t_min < timing.t_max, "t_min/t_max");
}

IntersectionLayout make_layout(const SimConfig& cfg) {
  LaneCapacity lanes{};
  for (std::size_t k = 0; k < kLaneGroups; ++k) lanes[k] = cfg.inroad_capacity * cfg.lane_split[k];

  IntersectionLayout layout;
  layout.graph = four_star_graph(lanes);
  layout.center = *layout.graph.find_vertex("a");
  for (std::size_t e = 0; e < layout.graph.edges.size(); ++e) {
    const auto& edge = layout.graph.edges[e];
    if (edge.head == layout.center) {
      layout.inbound_edge[inroad_of(*edge.approach)] = e;
    } else {
      layout.outbound_edge[inroad_of(opposite(*edge.approach))] = e;
    }
  }
  const auto set = enumerate_configurations(layout.graph, layout.center);
  for (const auto& conf : set.configurations) {
    std::vector<std::size_t> members;
    for (const auto& m : conf.members) {
      const auto& edge = layout.graph.edges[m.index];
      members.push_back(subedge_index(inroad_of(*edge.approach), m.lane));
    }
    std::sort(members.begin(), members.end());
    layout.configurations.push_back(std::move(members));
  }
  return layout;
}

double IntersectionState::load(std::size_t s) const {
  const auto& sub = subedges[s];
  return sub.capacity > 0.0 ? sub.count / sub.capacity : 0.0;
}

double IntersectionState::inroad_count(std::size_t inroad) const {
  double n = 0.0;
  for (std::size_t k = 0; k < kLaneGroups; ++k) n += subedges[inroad * kLaneGroups + k].count;
  return n;
}

IntersectionState initial_state(const SimConfig& cfg) {
  IntersectionState st;
  for (std::size_t r = 0; r < kInroads; ++r) {
    for (std::size_t k = 0; k < kLaneGroups; ++k) {
      auto& sub = st.subedges[r * kLaneGroups + k];
      sub.capacity = cfg.inroad_capacity * cfg.lane_split[k];
      sub.count = cfg.initial_load * cfg.lane_split[k];
    }
  }
  return st;
}

Tensor3 quantity_tensor(const IntersectionLayout& layout, const IntersectionState& state) {
  Tensor3 q(layout.graph.vertices.size());
  for (std::size_t r = 0; r < kInroads; ++r) {
    const auto& edge = layout.graph.edges[layout.inbound_edge[r]];
    for (std::size_t k = 0; k < kLaneGroups; ++k) {
      q(edge.tail, edge.head, k) = state.subedges[r * kLaneGroups + k].count;
    }
  }
  return q;
}

double step(IntersectionState& state, const IntersectionLayout& layout, const SimConfig& cfg,
            const Inflow& inflow, std::size_t step_index, Controller& controller,
            TrialResult* record) {
  for (double x : inflow) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("step: inflow must be finite and non-negative at step " +
                                  std::to_string(step_index));
    }
  }

  double dropped = 0.0;
  for (std::size_t r = 0; r < kInroads; ++r) {
    for (std::size_t k = 0; k < kLaneGroups; ++k) {
      auto& sub = state.subedges[r * kLaneGroups + k];
      const double add = inflow[r] * cfg.lane_split[k];
      const double room = sub.capacity - sub.count;
      if (add > room) {
        dropped += add - room;
        sub.count = sub.capacity;
      } else {
        sub.count += add;
      }
    }
  }

  Observation obs;
  obs.step = step_index;
  obs.state = &state;
  obs.layout = &layout;
  obs.config = &cfg;
  obs.arrived = inflow;
  const std::size_t chosen = controller.decide(obs);
  if (chosen >= layout.configurations.size()) {
    throw std::out_of_range("step: controller chose configuration " + std::to_string(chosen));
  }

  if (!state.has_active || chosen != state.active) {
    std::array<bool, kSubedges> was_green{};
    if (state.has_active) {
      for (std::size_t s : layout.configurations[state.active]) was_green[s] = true;
    }
    for (std::size_t s : layout.configurations[chosen]) {
      if (!was_green[s]) state.subedges[s].startup_left = cfg.startup_delay;
    }
    if (record && state.has_active) {
      const auto length = static_cast<std::size_t>(std::llround(state.active_elapsed / cfg.dt));
      record->activations.push_back({state.active, step_index - length, length});
    }
    state.has_active = true;
    state.active = chosen;
    state.active_elapsed = 0.0;
  }

  std::array<bool, kSubedges> green{};
  for (std::size_t s : layout.configurations[chosen]) green[s] = true;

  double discharged = 0.0;
  for (std::size_t s = 0; s < kSubedges; ++s) {
    auto& sub = state.subedges[s];
    if (!green[s]) {
      sub.since_active += cfg.dt;
      sub.startup_left = 0.0;
      continue;
    }
    sub.since_active = 0.0;
    const double effective = std::max(0.0, cfg.dt - sub.startup_left);
    sub.startup_left = std::max(0.0, sub.startup_left - cfg.dt);
    const double load = state.load(s);
    const double rate =
        load >= cfg.jam_density ? 0.0 : greenshield_outflow(load, cfg.free_flow_speed, cfg.jam_density);
    const double d = std::min(rate * effective, sub.count);
    if (record && d > sub.count) record->discharge_within_count = false;
    sub.count -= d;
    discharged += d;
    if (record) record->discharged_by_inroad[s / kLaneGroups] += d;
  }
  state.active_elapsed += cfg.dt;

  if (record) {
    record->ledger.dropped += dropped;
    record->discharged.push_back(discharged);
    record->config_active.push_back(chosen);
    std::array<double, kInroads> loads{};
    for (std::size_t r = 0; r < kInroads; ++r) loads[r] = state.inroad_count(r) / cfg.inroad_capacity;
    record->loads.push_back(loads);
    for (std::size_t s = 0; s < kSubedges; ++s) {
      record->min_load = std::min(record->min_load, state.load(s));
      record->max_load = std::max(record->max_load, state.load(s));
    }
  }
  return discharged;
}

TrialResult run_trial(const SimConfig& cfg, std::span<const Inflow> inflow, Controller& controller,
                      std::uint64_t seed) {
  cfg.validate();
  if (inflow.size() != cfg.n_steps) {
    throw std::invalid_argument("run_trial: inflow has " + std::to_string(inflow.size()) +
                                " steps, expected " + std::to_string(cfg.n_steps));
  }
  const IntersectionLayout layout = make_layout(cfg);
  IntersectionState state = initial_state(cfg);

  TrialResult result;
  result.seed = seed;
  result.discharged.reserve(cfg.n_steps);
  result.config_active.reserve(cfg.n_steps);
  result.loads.reserve(cfg.n_steps);
  result.min_load = std::numeric_limits<double>::infinity();
  result.max_load = -std::numeric_limits<double>::infinity();

  Accumulator initial, arrived, discharged;
  for (const auto& sub : state.subedges) initial.add(sub.count);
  for (std::size_t t = 0; t < cfg.n_steps; ++t) {
    for (double x : inflow[t]) arrived.add(x);
    discharged.add(step(state, layout, cfg, inflow[t], t, controller, &result));
  }
  if (state.has_active) {
    const auto length = static_cast<std::size_t>(std::llround(state.active_elapsed / cfg.dt));
    result.activations.push_back({state.active, cfg.n_steps - length, length});
  }

  Accumulator remaining;
  for (const auto& sub : state.subedges) remaining.add(sub.count);
  result.ledger.initial = initial.value();
  result.ledger.inflow = arrived.value();
  result.ledger.discharged = discharged.value();
  result.ledger.remaining = remaining.value();
  result.throughput = result.ledger.discharged / (static_cast<double>(cfg.n_steps) * cfg.dt);
  return result;
}

}  // namespace elmopp
