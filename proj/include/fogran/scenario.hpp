// Network configuration and the channel models derived from it.

#pragma once

#include "fogran/capacity.hpp"
#include "fogran/fsmc.hpp"
#include "fogran/state_space.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fogran {

constexpr double kSpeedOfLight = 3e8;

enum class PolicyKind { dran, cran_lp, fran_lp, cran_closed, fran_closed };

/// Budget split used for the general F-RAN outage region.
enum class FranBudget { per_user, per_process };

std::string policy_name(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);

/// Internal configuration; every physical quantity is linear / SI.
struct NetworkConfig {
    int users = 2;
    int edge_delay = 2;       ///< d_e, slots
    int fronthaul_delay = 0;  ///< d_c, slots
    double epsilon = 0.0;

    double direct_snr = 3.1622776601683795;  ///< 5 dB
    double cross_snr = 1.0;                  ///< 0 dB
    double velocity = 100.0 / 3.6;           ///< m/s
    double wavelength = kSpeedOfLight / 1e9; ///< m
    double slot_duration = 1e-4;             ///< s
    int direct_states = 15;
    int cross_states = 15;

    std::vector<PolicyKind> policies{PolicyKind::dran, PolicyKind::cran_lp, PolicyKind::fran_lp};
    AntennaMode antenna = AntennaMode::restricted;
    FranBudget fran_budget = FranBudget::per_user;
    std::size_t mc_samples = 200000;
    std::uint64_t seed = 1;

    bool simulate = true;
    std::uint64_t sim_slots = 1000000;
    std::uint64_t sim_seed = 1;

    int cran_delay() const { return edge_delay + fronthaul_delay; }
    /// Throws std::invalid_argument naming the first invalid field.
    void validate() const;
};

double db_to_linear(double db);
double linear_to_db(double linear);

/// Chains, state space and capacity oracle for one configuration.
/// Immutable; the oracle may be shared between scenarios with equal levels.
class Scenario {
public:
    explicit Scenario(NetworkConfig config, std::shared_ptr<const CapacityOracle> oracle = nullptr);
    /// Uses the given chains instead of the Clarke construction; the state
    /// counts of `config` are replaced by the chain sizes.
    Scenario(NetworkConfig config, MarkovChannelSpec direct, MarkovChannelSpec cross,
             std::shared_ptr<const CapacityOracle> oracle = nullptr);

    const NetworkConfig& config() const { return config_; }
    const MarkovChannelSpec& direct() const { return direct_; }
    const MarkovChannelSpec& cross() const { return cross_; }
    const StateSpace& space() const { return space_; }
    const CapacityOracle& oracle() const { return *oracle_; }
    std::shared_ptr<const CapacityOracle> oracle_ptr() const { return oracle_; }

    /// Stationary probability of a joint state (product over processes).
    double stationary_weight(std::span<const int> levels) const;
    /// Stationary probability of one user's local combo.
    double local_weight(std::uint64_t combo) const;

    /// True when `oracle` was built for this configuration's levels and options.
    bool oracle_compatible(const CapacityOracle& oracle) const;

private:
    void attach_oracle(std::shared_ptr<const CapacityOracle> oracle);

    NetworkConfig config_;
    MarkovChannelSpec direct_;
    MarkovChannelSpec cross_;
    StateSpace space_;
    std::shared_ptr<const CapacityOracle> oracle_;
};

}  // namespace fogran
