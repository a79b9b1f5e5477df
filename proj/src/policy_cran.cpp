#include "fogran/policy_cran.hpp"

#include "fogran/outage_region.hpp"
#include "fogran/parallel.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fogran {

RatePair cran_two_user_rates(const TwoUserBinarySpec& s, int delay, int x, int y, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in [0,1]");
    auto P = [&](int a, int b) { return s.beta(a, x, delay) * s.beta(b, y, delay); };
    const double p_ll = P(kLow, kLow);
    const double p_lh = P(kLow, kHigh);
    const double p_hl = P(kHigh, kLow);
    const double p_hh = P(kHigh, kHigh);
    const double tilde = std::min(p_lh, p_hl) + p_ll;
    const double single = s.single_bound;

    if (eps <= p_ll) return {s.C_LL / 2.0, s.C_LL / 2.0, 'A'};
    if (eps > 1.0 - p_hh) return {s.C_HH / 2.0, s.C_HH / 2.0, 'B'};
    if (s.C_LH <= 2.0 * single) return {s.C_LH / 2.0, s.C_LH / 2.0, 'C'};
    if (eps <= tilde) return {single, single, 'D'};
    if (p_hl <= p_lh) return {s.C_LH - single, single, 'E'};
    return {single, s.C_LH - single, 'F'};
}

double cran_two_user_sum_rate(const TwoUserBinarySpec& s, int delay, double eps) {
    double total = 0.0;
    const double first = cran_two_user_rates(s, delay, kLow, kLow, eps).sum();
    bool constant = true;
    for (int x : {kLow, kHigh}) {
        for (int y : {kLow, kHigh}) {
            const double r = cran_two_user_rates(s, delay, x, y, eps).sum();
            constant = constant && r == first;
            total += s.pi(x) * s.pi(y) * r;
        }
    }
    // The weights need not sum to exactly one in floating point.
    return constant ? first : total;
}

lp::Solution max_sum_rate(const CapacityRegion& region) {
    const int k = region.users;
    lp::LinearProgram prog;
    prog.objective.assign(static_cast<std::size_t>(k), 1.0);
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        std::vector<double> row(static_cast<std::size_t>(k), 0.0);
        for (int j = 0; j < k; ++j) {
            if (mask & (1u << j)) row[static_cast<std::size_t>(j)] = 1.0;
        }
        prog.rows.push_back(std::move(row));
        prog.rhs.push_back(std::max(0.0, region.bound(mask)));
    }
    return lp::solve_max(prog);
}

bool is_submodular(const CapacityRegion& region, double tol) {
    const std::uint32_t full = (1u << region.users) - 1u;
    auto f = [&](std::uint32_t m) { return m == 0 ? 0.0 : region.bound(m); };
    for (std::uint32_t a = 1; a <= full; ++a) {
        for (std::uint32_t b = a + 1; b <= full; ++b) {
            if (f(a) + f(b) < f(a | b) + f(a & b) - tol) return false;
        }
    }
    return true;
}

CranLpPolicy::CranLpPolicy(const Scenario& scenario, int delay, double eps)
    : users_(scenario.config().users),
      delay_(delay),
      eps_bar_(eps_bar_for(Split::cran, scenario.config().users, eps)) {
    if (delay < 0) throw std::invalid_argument("delay must be >= 0");
    const StateSpace& space = scenario.space();
    const std::uint64_t count = space.global_count();
    if (count > kJointEnumerationCap) {
        std::ostringstream os;
        os << "joint state space has " << count << " states, above the cap of "
           << kJointEnumerationCap;
        throw std::length_error(os.str());
    }
    const PercentileMap map = percentile_map(scenario.direct(), scenario.cross(), delay, eps_bar_);
    const auto procs = static_cast<std::size_t>(space.processes());

    // Group delayed states by their surrogate state.
    std::unordered_map<std::uint64_t, std::uint32_t> slot_by_signature;
    std::vector<std::uint64_t> signatures;
    slot_of_.resize(static_cast<std::size_t>(count));
    std::vector<int> levels(procs), surrogate(procs);
    for (std::uint64_t g = 0; g < count; ++g) {
        space.decode(g, levels);
        percentile_levels(space, map, levels, surrogate);
        const std::uint64_t sig = space.encode(surrogate);
        auto [it, fresh] =
            slot_by_signature.try_emplace(sig, static_cast<std::uint32_t>(signatures.size()));
        if (fresh) signatures.push_back(sig);
        slot_of_[static_cast<std::size_t>(g)] = it->second;
    }
    region_count_ = signatures.size();

    const auto k = static_cast<std::size_t>(users_);
    rates_.assign(region_count_ * k, 0.0);
    std::vector<char> submodular(region_count_), tight(region_count_);
    std::vector<double> max_se(region_count_, 0.0);
    parallel_for(region_count_, [&](std::size_t r) {
        std::vector<int> lv(procs);
        space.decode(signatures[r], lv);
        const CapacityRegion region = capacity_region(scenario.oracle(), lv);
        const lp::Solution sol = max_sum_rate(region);
        std::copy(sol.x.begin(), sol.x.end(), rates_.begin() + static_cast<std::ptrdiff_t>(r * k));
        submodular[r] = is_submodular(region);
        tight[r] = sol.value >= region.bound((1u << users_) - 1u) - 1e-9;
        max_se[r] = *std::max_element(region.std_errors.begin(), region.std_errors.end());
    });
    for (std::size_t r = 0; r < region_count_; ++r) {
        if (!submodular[r]) ++non_submodular_;
        if (!tight[r]) ++non_tight_;
        max_std_error_ = std::max(max_std_error_, max_se[r]);
    }

    std::vector<double> region_sum(region_count_, 0.0);
    for (std::size_t r = 0; r < region_count_; ++r) {
        for (std::size_t j = 0; j < k; ++j) region_sum[r] += rates_[r * k + j];
    }
    bool constant = true;
    for (std::uint64_t g = 0; g < count; ++g) {
        space.decode(g, levels);
        const double s = region_sum[slot_of_[static_cast<std::size_t>(g)]];
        constant = constant && s == region_sum[slot_of_[0]];
        sum_rate_ += scenario.stationary_weight(levels) * s;
    }
    if (constant) sum_rate_ = region_sum[slot_of_[0]];
}

std::span<const double> CranLpPolicy::rates(std::uint64_t delayed_state) const {
    const auto k = static_cast<std::size_t>(users_);
    return {rates_.data() + slot_of_.at(static_cast<std::size_t>(delayed_state)) * k, k};
}

double cran_lp_sum_rate(const Scenario& scenario) {
    return CranLpPolicy(scenario, scenario.config().cran_delay(), scenario.config().epsilon)
        .sum_rate();
}

}  // namespace fogran
