#include "elmopp/graph_io.hpp"

#include <istream>
#include <stdexcept>

#include "elmopp/csv.hpp"

namespace elmopp {

namespace {

std::string_view require(const KvSection& s, std::string_view key) {
  auto v = s.get(key);
  if (!v) throw std::invalid_argument("[" + s.name + "] missing key '" + std::string(key) + "'");
  return *v;
}

void reject_unknown(const KvSection& s, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : s.entries) {
    bool known = false;
    for (auto a : allowed) known = known || k == a;
    if (!known) throw std::invalid_argument("[" + s.name + "] unknown key '" + k + "'");
  }
}

std::size_t vertex_index(const RoadGraph& g, const KvSection& s, std::string_view key) {
  const auto name = require(s, key);
  auto idx = g.find_vertex(name);
  if (!idx) {
    throw std::invalid_argument("[" + s.name + "] " + std::string(key) + ": unknown vertex '" +
                                std::string(name) + "'");
  }
  return *idx;
}

LaneCapacity parse_capacity(const KvSection& s) {
  const auto items = split_list(require(s, "capacity"));
  if (items.size() != kLaneGroups) {
    throw std::invalid_argument("[" + s.name + "] capacity: expected 3 values");
  }
  LaneCapacity cap{};
  for (std::size_t k = 0; k < kLaneGroups; ++k) {
    try {
      cap[k] = parse_double(items[k]);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("[" + s.name + "] capacity: '" + items[k] + "' is not a number");
    }
  }
  return cap;
}

Approach parse_approach_key(const KvSection& s) {
  const auto label = require(s, "approach");
  auto a = parse_approach(label);
  if (!a) {
    throw std::invalid_argument("[" + s.name + "] approach: expected N, E, S or W, got '" +
                                std::string(label) + "'");
  }
  return *a;
}

std::string capacity_string(const LaneCapacity& cap) {
  return format_double(cap[0]) + ", " + format_double(cap[1]) + ", " + format_double(cap[2]);
}

}  // namespace

RoadGraph parse_graph(const KvDocument& doc) {
  RoadGraph g;
  for (const auto& s : doc.sections) {
    if (s.name == "vertices") {
      reject_unknown(s, {"names"});
      for (auto& name : split_list(require(s, "names"))) {
        if (name.empty()) throw std::invalid_argument("[vertices] names: empty vertex name");
        if (g.find_vertex(name)) {
          throw std::invalid_argument("[vertices] names: duplicate vertex '" + name + "'");
        }
        g.add_vertex(name);
      }
    } else if (s.name == "edge") {
      reject_unknown(s, {"tail", "head", "capacity", "approach"});
      DirectedEdge e;
      e.tail = vertex_index(g, s, "tail");
      e.head = vertex_index(g, s, "head");
      e.capacity = parse_capacity(s);
      if (s.get("approach")) e.approach = parse_approach_key(s);
      g.edges.push_back(e);
    } else if (s.name == "pseudo") {
      reject_unknown(s, {"vertex", "approach", "capacity"});
      PseudoDiedge p;
      p.vertex = vertex_index(g, s, "vertex");
      p.approach = parse_approach_key(s);
      p.capacity = parse_capacity(s);
      g.pseudo_diedges.push_back(p);
    } else {
      throw std::invalid_argument("unknown section [" + s.name + "]");
    }
  }
  return g;
}

RoadGraph parse_graph(std::istream& in) { return parse_graph(parse_kv(in)); }

KvDocument graph_to_kv(const RoadGraph& g) {
  KvDocument doc;
  std::string names;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (v) names += ", ";
    names += g.vertices[v];
  }
  doc.add("vertices").set("names", names);
  for (const auto& e : g.edges) {
    auto& s = doc.add("edge");
    s.set("tail", g.vertices.at(e.tail));
    s.set("head", g.vertices.at(e.head));
    s.set("capacity", capacity_string(e.capacity));
    if (e.approach) s.set("approach", std::string(approach_label(*e.approach)));
  }
  for (const auto& p : g.pseudo_diedges) {
    auto& s = doc.add("pseudo");
    s.set("vertex", g.vertices.at(p.vertex));
    s.set("approach", std::string(approach_label(p.approach)));
    s.set("capacity", capacity_string(p.capacity));
  }
  return doc;
}

std::string serialize_graph(const RoadGraph& graph) { return write_kv_string(graph_to_kv(graph)); }

RoadGraph four_star_graph(const LaneCapacity& lane_capacity) {
  RoadGraph g;
  const auto a = g.add_vertex("a");
  struct Leaf {
    const char* name;
    Approach side;  // side of `a` where the leaf lies
  };
  const Leaf leaves[] = {{"n", Approach::North},
                         {"e", Approach::East},
                         {"s", Approach::South},
                         {"w", Approach::West}};
  for (const auto& leaf : leaves) {
    const auto v = g.add_vertex(leaf.name);
    g.add_edge(v, a, lane_capacity, leaf.side);
    g.add_edge(a, v, lane_capacity, opposite(leaf.side));
  }
  return g;
}

}  // namespace elmopp
