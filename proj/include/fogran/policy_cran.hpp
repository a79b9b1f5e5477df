// Cloud rate selection with joint decoding and CSI delayed by d = d_e + d_c.

#pragma once

#include "fogran/capacity.hpp"
#include "fogran/lp.hpp"
#include "fogran/scenario.hpp"
#include "fogran/two_user.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fogran {

struct RatePair {
    double r1 = 0.0;
    double r2 = 0.0;
    char point = 'A';  ///< 'A','B','C','D','E' (E') or 'F' (E'')
    double sum() const { return r1 + r2; }
};

/// Two-user rule for delayed cross states (x, y) of (I_1, I_2).
RatePair cran_two_user_rates(const TwoUserBinarySpec& spec, int delay, int x, int y, double eps);

/// Stationary average of the per-pair sums.
double cran_two_user_sum_rate(const TwoUserBinarySpec& spec, int delay, double eps);

/// max sum_j R_j subject to the subset bounds of one region.
lp::Solution max_sum_rate(const CapacityRegion& region);

/// f(A) + f(B) >= f(A | B) + f(A & B) for every pair of subsets.
bool is_submodular(const CapacityRegion& region, double tol = 1e-9);

/// Per-delayed-state LP solutions over the outage regions.
class CranLpPolicy {
public:
    CranLpPolicy(const Scenario& scenario, int delay, double eps);

    int users() const { return users_; }
    int delay() const { return delay_; }
    double eps_bar() const { return eps_bar_; }
    double sum_rate() const { return sum_rate_; }

    /// Rates chosen for the given delayed global state index.
    std::span<const double> rates(std::uint64_t delayed_state) const;

    std::uint64_t states() const { return slot_of_.size(); }
    std::size_t distinct_regions() const { return region_count_; }
    std::size_t non_submodular_regions() const { return non_submodular_; }
    /// Regions whose optimum falls short of the full-set bound.
    std::size_t non_tight_regions() const { return non_tight_; }
    /// Largest Monte Carlo error among the bounds used.
    double max_std_error() const { return max_std_error_; }

private:
    int users_;
    int delay_;
    double eps_bar_;
    double sum_rate_ = 0.0;
    std::vector<std::uint32_t> slot_of_;
    std::vector<double> rates_;
    std::size_t region_count_ = 0;
    std::size_t non_submodular_ = 0;
    std::size_t non_tight_ = 0;
    double max_std_error_ = 0.0;
};

/// Uses d = d_e + d_c and the scenario's outage budget.
double cran_lp_sum_rate(const Scenario& scenario);

}  // namespace fogran
