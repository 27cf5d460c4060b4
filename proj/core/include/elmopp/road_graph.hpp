#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elmopp/types.hpp"

namespace elmopp {

enum class LaneGroup : std::uint8_t { Left = 0, Middle = 1, Right = 2 };

/// Compass side of an intersection from which an inroad arrives.
enum class Approach : std::uint8_t { East = 0, North = 1, West = 2, South = 3 };

std::optional<Approach> parse_approach(std::string_view label);
std::string_view approach_label(Approach a);
std::string_view lane_label(LaneGroup lane);
Approach opposite(Approach a);

using LaneCapacity = std::array<double, kLaneGroups>;

struct DirectedEdge {
  std::size_t tail = 0;
  std::size_t head = 0;
  LaneCapacity capacity{};
  // Side of `head` this road enters from. Required for edges feeding a vertex
  // whose configurations are enumerated.
  std::optional<Approach> approach;

  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Inbound-only road attached to a single vertex. It carries inflow but never
/// appears in the adjacency, capacity or quantity tensors.
struct PseudoDiedge {
  std::size_t vertex = 0;
  Approach approach = Approach::North;
  LaneCapacity capacity{};

  friend bool operator==(const PseudoDiedge&, const PseudoDiedge&) = default;
};

struct RoadGraph {
  std::vector<std::string> vertices;
  std::vector<DirectedEdge> edges;
  std::vector<PseudoDiedge> pseudo_diedges;

  std::optional<std::size_t> find_vertex(std::string_view name) const;
  std::size_t add_vertex(std::string name);
  std::size_t add_edge(std::size_t tail, std::size_t head, LaneCapacity capacity,
                       std::optional<Approach> approach = std::nullopt);
  std::optional<std::size_t> find_edge(std::size_t tail, std::size_t head) const;

  friend bool operator==(const RoadGraph&, const RoadGraph&) = default;
};

/// Dense order-3 tensor of shape (n, n, 3): tail vertex, head vertex, lane group.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t vertices, double fill = 0.0)
      : n_(vertices), cells_(vertices * vertices * kLaneGroups, fill) {}

  std::size_t vertices() const { return n_; }
  std::size_t size() const { return cells_.size(); }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return cells_[index(i, j, k)];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return cells_[index(i, j, k)];
  }

  const std::vector<double>& cells() const { return cells_; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * n_ + j) * kLaneGroups + k;
  }

  std::size_t n_ = 0;
  std::vector<double> cells_;
};

Tensor3 capacity_tensor(const RoadGraph& graph);

/// Hadamard quotient Q / C with dead (zero-capacity) cells forced to 0.
/// Throws std::invalid_argument on shape mismatch or negative cells and
/// std::domain_error when Q exceeds C at a positive-capacity cell.
Tensor3 load_tensor(const Tensor3& quantity, const Tensor3& capacity);

enum class InroadSource : std::uint8_t { Edge = 0, Pseudo = 1 };

/// One lane group of one road entering a vertex.
struct SubedgeRef {
  InroadSource source = InroadSource::Edge;
  std::size_t index = 0;  // into RoadGraph::edges or RoadGraph::pseudo_diedges
  LaneGroup lane = LaneGroup::Left;

  auto operator<=>(const SubedgeRef&) const = default;
};

struct Configuration {
  std::size_t vertex = 0;
  std::vector<SubedgeRef> members;  // sorted

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct ConfigurationSet {
  std::size_t vertex = 0;
  std::vector<Configuration> configurations;
};

/// A road entering a vertex, with the compass side it arrives from.
struct Inroad {
  InroadSource source = InroadSource::Edge;
  std::size_t index = 0;
  Approach approach = Approach::North;
};

/// Roads entering `vertex`, edges first then pseudo-diedges. Throws
/// std::invalid_argument if one lacks an approach label or two share one.
std::vector<Inroad> inroads_of(const RoadGraph& graph, std::size_t vertex);

/// Non-crossing predicate. Lane groups of one inroad never conflict; lane
/// groups of inroads that are not antiparallel always conflict; lane groups of
/// antiparallel inroads conflict iff one of their movement chords crosses the
/// other inside the intersection disk or both feed the same outbound road.
/// `legs` lists the sides of the vertex that have a road; movements towards
/// a missing side do not exist.
bool subedges_conflict(Approach a, LaneGroup lane_a, Approach b, LaneGroup lane_b,
                       const std::vector<Approach>& legs);

/// All maximal sets of pairwise non-conflicting inbound subedges at `vertex`.
ConfigurationSet enumerate_configurations(const RoadGraph& graph, std::size_t vertex);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks graph invariants and tensor consistency. Never throws; every breach
/// is listed. `quantity` is optional.
ValidationReport validate_graph(const RoadGraph& graph, const Tensor3& capacity,
                                const Tensor3* quantity = nullptr);

}  // namespace elmopp
