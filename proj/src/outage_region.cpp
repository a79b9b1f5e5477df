#include "fogran/outage_region.hpp"

#include <cmath>
#include <stdexcept>

namespace fogran {

double split_budget(double eps, double count) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("outage budget must lie in [0,1]");
    if (!(count > 0.0)) throw std::invalid_argument("budget split count must be positive");
    if (eps == 1.0) return 1.0;
    return -std::expm1(std::log1p(-eps) / count);
}

double eps_bar_for(Split split, int users, double eps) {
    if (users < 1) throw std::invalid_argument("K must be positive");
    const double k = static_cast<double>(users);
    return split_budget(eps, split == Split::cran ? k * k : k);
}

PercentileMap percentile_map(const MarkovChannelSpec& direct, const MarkovChannelSpec& cross,
                             int delay, double eps_bar) {
    PercentileMap map;
    map.delay = delay;
    map.eps_bar = eps_bar;
    map.direct = percentile_table(d_step(direct, delay), eps_bar);
    map.cross = percentile_table(d_step(cross, delay), eps_bar);
    return map;
}

void percentile_levels(const StateSpace& space, const PercentileMap& map,
                       std::span<const int> delayed, std::span<int> out) {
    for (int p = 0; p < space.processes(); ++p) {
        const auto& table = space.is_direct(p) ? map.direct : map.cross;
        out[static_cast<std::size_t>(p)] =
            table[static_cast<std::size_t>(delayed[static_cast<std::size_t>(p)])];
    }
}

OutageRegionSpec make_outage_region_spec(const MarkovChannelSpec& direct,
                                         const MarkovChannelSpec& cross,
                                         const ChannelStateTuple& delayed, int delay,
                                         double eps_bar) {
    if (delay < 0) throw std::invalid_argument("outage region needs a non-negative delay");
    const StateSpace space(delayed.users(), direct.size(), cross.size());
    const PercentileMap map = percentile_map(direct, cross, delay, eps_bar);
    const std::vector<int> source = space.from_tuple(delayed);
    std::vector<int> surrogate(source.size());
    percentile_levels(space, map, source, surrogate);
    return {delay, eps_bar, delayed, space.to_tuple(surrogate)};
}

CapacityRegion outage_region(const MarkovChannelSpec& direct, const MarkovChannelSpec& cross,
                             const ChannelStateTuple& delayed, int delay, double eps_bar,
                             const CapacityOracle& oracle) {
    const OutageRegionSpec spec = make_outage_region_spec(direct, cross, delayed, delay, eps_bar);
    return capacity_region(oracle, spec.percentile_state);
}

}  // namespace fogran
