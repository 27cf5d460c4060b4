#include "elmopp/road_graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace elmopp {

std::optional<Approach> parse_approach(std::string_view label) {
  if (label == "N") return Approach::North;
  if (label == "E") return Approach::East;
  if (label == "S") return Approach::South;
  if (label == "W") return Approach::West;
  return std::nullopt;
}

std::string_view approach_label(Approach a) {
  switch (a) {
    case Approach::North: return "N";
    case Approach::East: return "E";
    case Approach::South: return "S";
    case Approach::West: return "W";
  }
  return "?";
}

std::string_view lane_label(LaneGroup lane) {
  switch (lane) {
    case LaneGroup::Left: return "left";
    case LaneGroup::Middle: return "middle";
    case LaneGroup::Right: return "right";
  }
  return "?";
}

Approach opposite(Approach a) {
  return static_cast<Approach>((static_cast<int>(a) + 2) % 4);
}

std::optional<std::size_t> RoadGraph::find_vertex(std::string_view name) const {
  auto it = std::find(vertices.begin(), vertices.end(), name);
  if (it == vertices.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vertices.begin());
}

std::size_t RoadGraph::add_vertex(std::string name) {
  vertices.push_back(std::move(name));
  return vertices.size() - 1;
}

std::size_t RoadGraph::add_edge(std::size_t tail, std::size_t head, LaneCapacity capacity,
                                std::optional<Approach> approach) {
  edges.push_back(DirectedEdge{tail, head, capacity, approach});
  return edges.size() - 1;
}

std::optional<std::size_t> RoadGraph::find_edge(std::size_t tail, std::size_t head) const {
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].tail == tail && edges[e].head == head) return e;
  }
  return std::nullopt;
}

Tensor3 capacity_tensor(const RoadGraph& graph) {
  Tensor3 c(graph.vertices.size());
  for (const auto& e : graph.edges) {
    if (e.tail >= c.vertices() || e.head >= c.vertices()) {
      throw std::invalid_argument("capacity_tensor: edge endpoint out of range");
    }
    for (std::size_t k = 0; k < kLaneGroups; ++k) c(e.tail, e.head, k) = e.capacity[k];
  }
  return c;
}

Tensor3 load_tensor(const Tensor3& quantity, const Tensor3& capacity) {
  if (quantity.vertices() != capacity.vertices()) {
    throw std::invalid_argument("load_tensor: quantity and capacity shapes differ");
  }
  const std::size_t n = capacity.vertices();
  Tensor3 load(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < kLaneGroups; ++k) {
        const double q = quantity(i, j, k);
        const double c = capacity(i, j, k);
        if (q < 0.0 || c < 0.0) {
          throw std::invalid_argument("load_tensor: negative cell");
        }
        if (c == 0.0) continue;  // dead subedge
        if (q > c) {
          std::ostringstream msg;
          msg << "load_tensor: quantity " << q << " exceeds capacity " << c << " at (" << i
              << "," << j << "," << k << ")";
          throw std::domain_error(msg.str());
        }
        load(i, j, k) = q / c;
      }
    }
  }
  return load;
}

std::vector<Inroad> inroads_of(const RoadGraph& graph, std::size_t vertex) {
  std::vector<Inroad> out;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    if (edge.head != vertex) continue;
    if (!edge.approach) {
      throw std::invalid_argument("inroad " + std::to_string(e) + " to vertex " +
                                  std::to_string(vertex) + " has no approach label");
    }
    out.push_back(Inroad{InroadSource::Edge, e, *edge.approach});
  }
  for (std::size_t p = 0; p < graph.pseudo_diedges.size(); ++p) {
    const auto& pd = graph.pseudo_diedges[p];
    if (pd.vertex != vertex) continue;
    out.push_back(Inroad{InroadSource::Pseudo, p, pd.approach});
  }
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (std::size_t b = a + 1; b < out.size(); ++b) {
      if (out[a].approach == out[b].approach) {
        throw std::invalid_argument("two inroads share approach " +
                                    std::string(approach_label(out[a].approach)));
      }
    }
  }
  return out;
}

namespace {

// Boundary of the intersection disk, counter-clockwise from east. Each leg k
// owns two points: its outbound lanes at 2k and its inbound lanes at 2k + 1
// (right-hand traffic).
constexpr int kBoundaryPoints = 8;

int outbound_point(int leg) { return (2 * leg) % kBoundaryPoints; }
int inbound_point(int leg) { return (2 * leg + 1) % kBoundaryPoints; }

struct Chord {
  int from;
  int to;
};

// Exit legs relative to the entry leg, counter-clockwise: right turn +1,
// straight +2, left turn +3, U-turn +0.
std::vector<Chord> movement_chords(Approach from, LaneGroup lane,
                                   const std::vector<Approach>& legs) {
  const int k = static_cast<int>(from);
  std::vector<int> offsets;
  switch (lane) {
    case LaneGroup::Left: offsets = {3, 0}; break;
    case LaneGroup::Middle: offsets = {2}; break;
    case LaneGroup::Right: offsets = {1}; break;
  }
  std::vector<Chord> chords;
  for (int off : offsets) {
    const auto exit = static_cast<Approach>((k + off) % 4);
    if (std::find(legs.begin(), legs.end(), exit) == legs.end()) continue;
    chords.push_back(Chord{inbound_point(k), outbound_point(static_cast<int>(exit))});
  }
  return chords;
}

// Strictly between `from` and `to` walking counter-clockwise.
bool strictly_inside(int from, int to, int p) {
  const int span = (to - from + kBoundaryPoints) % kBoundaryPoints;
  const int rel = (p - from + kBoundaryPoints) % kBoundaryPoints;
  return rel > 0 && rel < span;
}

bool chords_conflict(const Chord& a, const Chord& b) {
  if (a.to == b.to) return true;  // merge into one outbound road
  if (a.from == b.from || a.from == b.to || a.to == b.from) return false;
  return strictly_inside(a.from, a.to, b.from) != strictly_inside(a.from, a.to, b.to);
}

}  // namespace

bool subedges_conflict(Approach a, LaneGroup lane_a, Approach b, LaneGroup lane_b,
                       const std::vector<Approach>& legs) {
  if (a == b) return false;
  if (b != opposite(a)) return true;
  for (const auto& ca : movement_chords(a, lane_a, legs)) {
    for (const auto& cb : movement_chords(b, lane_b, legs)) {
      if (chords_conflict(ca, cb)) return true;
    }
  }
  return false;
}

namespace {

using Bitset = std::uint64_t;

// Bron-Kerbosch with pivoting over the compatibility graph.
void maximal_cliques(const std::vector<Bitset>& adj, Bitset r, Bitset p, Bitset x,
                     std::vector<Bitset>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  const Bitset px = p | x;
  int pivot = std::countr_zero(px);
  int best = -1;
  for (Bitset rem = px; rem != 0; rem &= rem - 1) {
    const int u = std::countr_zero(rem);
    const int deg = std::popcount(p & adj[u]);
    if (deg > best) {
      best = deg;
      pivot = u;
    }
  }
  for (Bitset cand = p & ~adj[pivot]; cand != 0; cand &= cand - 1) {
    const int v = std::countr_zero(cand);
    const Bitset bit = Bitset{1} << v;
    maximal_cliques(adj, r | bit, p & adj[v], x & adj[v], out);
    p &= ~bit;
    x |= bit;
  }
}

}  // namespace

ConfigurationSet enumerate_configurations(const RoadGraph& graph, std::size_t vertex) {
  if (vertex >= graph.vertices.size()) {
    throw std::out_of_range("enumerate_configurations: no such vertex");
  }
  ConfigurationSet set{vertex, {}};
  const auto inroads = inroads_of(graph, vertex);
  if (inroads.empty()) return set;

  std::vector<Approach> legs;
  for (const auto& r : inroads) legs.push_back(r.approach);

  struct Node {
    SubedgeRef ref;
    Approach approach;
  };
  std::vector<Node> nodes;
  for (const auto& r : inroads) {
    for (std::size_t k = 0; k < kLaneGroups; ++k) {
      nodes.push_back(Node{SubedgeRef{r.source, r.index, static_cast<LaneGroup>(k)}, r.approach});
    }
  }
  // Approaches are unique per vertex, so at most 4 inroads x 3 lane groups.
  std::vector<Bitset> adj(nodes.size(), 0);
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (u == v) continue;
      if (!subedges_conflict(nodes[u].approach, nodes[u].ref.lane, nodes[v].approach,
                             nodes[v].ref.lane, legs)) {
        adj[u] |= Bitset{1} << v;
      }
    }
  }
  std::vector<Bitset> cliques;
  const Bitset all = nodes.size() == 64 ? ~Bitset{0} : (Bitset{1} << nodes.size()) - 1;
  maximal_cliques(adj, 0, all, 0, cliques);

  for (Bitset c : cliques) {
    Configuration conf{vertex, {}};
    for (Bitset rem = c; rem != 0; rem &= rem - 1) {
      conf.members.push_back(nodes[std::countr_zero(rem)].ref);
    }
    std::sort(conf.members.begin(), conf.members.end());
    set.configurations.push_back(std::move(conf));
  }
  std::sort(set.configurations.begin(), set.configurations.end(),
            [](const Configuration& a, const Configuration& b) { return a.members < b.members; });
  return set;
}

ValidationReport validate_graph(const RoadGraph& graph, const Tensor3& capacity,
                                const Tensor3* quantity) {
  ValidationReport report;
  auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };
  const std::size_t n = graph.vertices.size();

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (graph.vertices[a] == graph.vertices[b]) fail("duplicate vertex '" + graph.vertices[a] + "'");
    }
  }

  std::vector<std::vector<bool>> has_edge(n, std::vector<bool>(n, false));
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    const std::string tag = "edge " + std::to_string(e);
    if (edge.tail >= n || edge.head >= n) {
      fail(tag + ": endpoint not in vertex list");
      continue;
    }
    if (edge.tail == edge.head) fail(tag + ": tail equals head");
    if (has_edge[edge.tail][edge.head]) fail(tag + ": duplicate of an earlier edge");
    has_edge[edge.tail][edge.head] = true;
    bool any_positive = false;
    for (double c : edge.capacity) {
      if (!(c >= 0.0) || !std::isfinite(c)) fail(tag + ": capacity must be finite and >= 0");
      any_positive = any_positive || c > 0.0;
    }
    if (!any_positive) fail(tag + ": all lane groups have zero capacity");
  }
  for (std::size_t p = 0; p < graph.pseudo_diedges.size(); ++p) {
    const auto& pd = graph.pseudo_diedges[p];
    if (pd.vertex >= n) fail("pseudo-diedge " + std::to_string(p) + ": vertex not in vertex list");
    for (double c : pd.capacity) {
      if (!(c >= 0.0) || !std::isfinite(c)) {
        fail("pseudo-diedge " + std::to_string(p) + ": capacity must be finite and >= 0");
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    try {
      (void)inroads_of(graph, v);
    } catch (const std::exception& ex) {
      fail("vertex '" + graph.vertices[v] + "': " + ex.what());
    }
  }

  auto cell_name = [](std::size_t i, std::size_t j, std::size_t k) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")";
  };

  if (capacity.vertices() != n) {
    fail("capacity tensor has " + std::to_string(capacity.vertices()) + " vertices, graph has " +
         std::to_string(n));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto e = graph.find_edge(i, j);
        for (std::size_t k = 0; k < kLaneGroups; ++k) {
          const double c = capacity(i, j, k);
          if (!(c >= 0.0)) fail("capacity " + cell_name(i, j, k) + " is negative");
          if (!e && c != 0.0) fail("capacity " + cell_name(i, j, k) + " is positive on a non-edge");
          if (e && c != graph.edges[*e].capacity[k]) {
            fail("capacity " + cell_name(i, j, k) + " disagrees with edge " + std::to_string(*e));
          }
        }
      }
    }
  }

  if (quantity != nullptr) {
    if (quantity->vertices() != capacity.vertices()) {
      fail("quantity tensor shape differs from capacity tensor");
    } else {
      const std::size_t m = capacity.vertices();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t k = 0; k < kLaneGroups; ++k) {
            const double q = (*quantity)(i, j, k);
            const double c = capacity(i, j, k);
            if (q < 0.0) fail("quantity " + cell_name(i, j, k) + " is negative");
            if (c > 0.0 && q > c) fail("quantity " + cell_name(i, j, k) + " exceeds capacity");
            if (c == 0.0 && q != 0.0) fail("quantity " + cell_name(i, j, k) + " on a dead cell");
          }
        }
      }
    }
  }
  return report;
}

}  // namespace elmopp
