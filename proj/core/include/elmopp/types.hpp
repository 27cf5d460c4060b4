#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace elmopp {

/// Vehicles arriving during one timestep on each of the four inroads of the
/// simulated intersection, ordered N, E, S, W.
using Inflow = std::array<double, 4>;

inline constexpr std::size_t kInroads = 4;
inline constexpr std::size_t kLaneGroups = 3;

}  // namespace elmopp
