// Outage sum-rate regions built from percentile surrogate states.

#pragma once

#include "fogran/capacity.hpp"
#include "fogran/fsmc.hpp"
#include "fogran/state_space.hpp"

#include <span>
#include <vector>

namespace fogran {

enum class Split { dran, cran, fran };

/// Per-process (or per-user) outage budget that keeps the joint outage at
/// `eps`: 1 - (1 - eps)^(1/K) for D-RAN and F-RAN, 1 - (1 - eps)^(1/K^2)
/// for C-RAN.
double eps_bar_for(Split split, int users, double eps);

/// 1 - (1 - eps)^(1/count), computed without cancellation.
double split_budget(double eps, double count);

/// Percentile surrogate of each source state, one table per process kind.
struct PercentileMap {
    int delay = 0;
    double eps_bar = 0.0;
    std::vector<int> direct;
    std::vector<int> cross;
};

PercentileMap percentile_map(const MarkovChannelSpec& direct, const MarkovChannelSpec& cross,
                             int delay, double eps_bar);

/// Applies the map to every process of a delayed joint state.
void percentile_levels(const StateSpace& space, const PercentileMap& map,
                       std::span<const int> delayed, std::span<int> out);

struct OutageRegionSpec {
    int delay = 0;
    double eps_bar = 0.0;
    ChannelStateTuple source_state;
    ChannelStateTuple percentile_state;
};

OutageRegionSpec make_outage_region_spec(const MarkovChannelSpec& direct,
                                         const MarkovChannelSpec& cross,
                                         const ChannelStateTuple& delayed, int delay,
                                         double eps_bar);

/// Capacity region evaluated at the percentile surrogate of `delayed`.
CapacityRegion outage_region(const MarkovChannelSpec& direct, const MarkovChannelSpec& cross,
                             const ChannelStateTuple& delayed, int delay, double eps_bar,
                             const CapacityOracle& oracle);

}  // namespace fogran
