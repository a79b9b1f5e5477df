// Edge rate selection with d_e-delayed local CSI and joint decoding at the cloud.

#pragma once

#include "fogran/lp.hpp"
#include "fogran/scenario.hpp"
#include "fogran/two_user.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fogran {

struct FranTwoUserRates {
    double R_L = 0.0;
    double R_H = 0.0;
    int rule = 1;  ///< which of the three base-rate cases applied
};

/// Zero-outage rates for local observations L and H.
FranTwoUserRates fran_two_user_base_rates(const TwoUserBinarySpec& spec);

/// False when the base pair leaves the all-high region (2 R_H > C_HH); the
/// closed form then overshoots the zero-outage program.
bool fran_base_rates_feasible(const TwoUserBinarySpec& spec, const FranTwoUserRates& base);

/// Objective of the base-rate program at a given R_L.
double fran_base_objective(const TwoUserBinarySpec& spec, double r_low);

/// Rate chosen by an edge node that observed `x` d_e slots ago.
double fran_two_user_rate(const TwoUserBinarySpec& spec, const FranTwoUserRates& base,
                          int edge_delay, double eps_bar, int x);

double fran_two_user_sum_rate(const TwoUserBinarySpec& spec, int edge_delay, double eps);

double fran_eps_bar(FranBudget budget, int users, double eps);

/// One coupled LP over per-user, per-local-combo rates. Variable j*C + c is
/// the rate of user j when its delayed local combo is c (C combos per user).
struct FranLpStats {
    std::size_t variables = 0;
    std::size_t raw_constraints = 0;      ///< states x subsets
    std::size_t unique_constraints = 0;   ///< after deduplication
    std::size_t active_rows = 0;          ///< rows in the final LP
    std::size_t rounds = 0;
    std::size_t pivots = 0;
};

constexpr std::uint64_t kFranConstraintCap = 1000000;

class FranLpPolicy {
public:
    FranLpPolicy(const Scenario& scenario, int edge_delay, double eps);

    int users() const { return users_; }
    int delay() const { return delay_; }
    double eps_bar() const { return eps_bar_; }
    double sum_rate() const { return sum_rate_; }
    std::uint64_t combos() const { return combos_; }
    double rate(int user, std::uint64_t combo) const {
        return rates_[static_cast<std::size_t>(user) * combos_ + combo];
    }
    std::span<const double> all_rates() const { return rates_; }
    const FranLpStats& stats() const { return stats_; }

private:
    int users_;
    int delay_;
    double eps_bar_;
    std::uint64_t combos_;
    double sum_rate_ = 0.0;
    std::vector<double> rates_;
    FranLpStats stats_;
};

/// The same LP written out row by row, optionally without deduplication.
lp::LinearProgram build_fran_lp(const Scenario& scenario, int edge_delay, double eps,
                                bool deduplicate);

/// Uses the scenario's edge delay and outage budget.
double fran_lp_sum_rate(const Scenario& scenario);

}  // namespace fogran
