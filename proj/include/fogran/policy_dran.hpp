// Edge-only rate selection: local delayed CSI, interference treated as noise.

#pragma once

#include "fogran/fsmc.hpp"
#include "fogran/scenario.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fogran {

/// log2(1 + S / (1 + sum I)).
double instantaneous_rate(double direct, std::span<const double> interference);

struct RateAtom {
    double rate = 0.0;
    double cumulative = 0.0;  ///< Pr[C <= rate]
};

/// Conditional distribution of a user's interference-as-noise rate given its
/// delayed local combo (S_j, I_{j,i} for i != j in increasing i).
class DranCdfTable {
public:
    DranCdfTable(int users, int direct_states, int cross_states, int delay,
                 std::vector<std::vector<RateAtom>> atoms);

    int users() const { return users_; }
    int delay() const { return delay_; }
    std::uint64_t combos() const { return atoms_.size(); }
    const std::vector<RateAtom>& atoms(std::uint64_t combo) const { return atoms_.at(combo); }

private:
    int users_;
    int direct_states_;
    int cross_states_;
    int delay_;
    std::vector<std::vector<RateAtom>> atoms_;
};

constexpr std::uint64_t kDranEnumerationCap = 1000000;

/// Exact enumeration over the current local states reachable in `delay`
/// slots. Refuses with std::length_error when N_S * N_I^(K-1) exceeds `cap`.
DranCdfTable build_cdf(const MarkovChannelSpec& direct, const MarkovChannelSpec& cross, int delay,
                       int users, std::uint64_t cap = kDranEnumerationCap);

/// Largest atom r_k with Pr[C < r_k] <= eps_bar; the lowest atom otherwise.
double dran_rate(const DranCdfTable& table, std::uint64_t combo, double eps_bar);

struct DranResult {
    double sum_rate = 0.0;
    std::vector<double> per_user;
    double eps_bar = 0.0;
};

DranResult dran_sum_rate(const Scenario& scenario, int edge_delay, double eps);
/// Uses the scenario's edge delay and outage budget.
DranResult dran_sum_rate(const Scenario& scenario);

}  // namespace fogran
