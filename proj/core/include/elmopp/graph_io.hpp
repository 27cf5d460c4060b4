#pragma once

#include <iosfwd>
#include <string>

#include "elmopp/kvfile.hpp"
#include "elmopp/road_graph.hpp"

namespace elmopp {

/// Graph description file:
///
///   [vertices]
///   names = a, n, e, s, w
///
///   [edge]              # one section per directed edge
///   tail = n
///   head = a
///   capacity = 250, 500, 250   # left, middle, right
///   approach = N               # optional side of `head`
///
///   [pseudo]            # one section per pseudo-diedge
///   vertex = a
///   approach = W
///   capacity = 250, 500, 250
///
/// Throws KvParseError (bad syntax) or std::invalid_argument (bad content,
/// message names the offending key).
RoadGraph parse_graph(const KvDocument& doc);
RoadGraph parse_graph(std::istream& in);
KvDocument graph_to_kv(const RoadGraph& graph);
std::string serialize_graph(const RoadGraph& graph);

/// The simple 4-star: center `a` with leaves n, e, s, w joined by roads in
/// both directions. Inbound roads to `a` are labelled N, E, S, W.
RoadGraph four_star_graph(const LaneCapacity& lane_capacity);

}  // namespace elmopp
