// Slot-level Monte Carlo of the Markov channels under a rate policy.

#pragma once

#include "fogran/fsmc.hpp"
#include "fogran/policy_cran.hpp"
#include "fogran/policy_fran.hpp"
#include "fogran/scenario.hpp"
#include "fogran/two_user.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace fogran {

/// Rates as a function of delayed CSI.
class RatePolicy {
public:
    virtual ~RatePolicy() = default;
    virtual PolicyKind kind() const = 0;
    /// Age of the CSI the policy acts on, in slots.
    virtual int delay() const = 0;
    /// Joint decoding (capacity region) or per-user interference-as-noise.
    virtual bool joint_decoding() const = 0;
    virtual double analytic_sum_rate() const = 0;
    virtual void select(std::span<const int> delayed, std::span<double> rates) const = 0;
};

/// Builds the policy for the scenario's delays and outage budget.
std::unique_ptr<RatePolicy> make_policy(const Scenario& scenario, PolicyKind kind);

/// Samples one chain: column `from` of the transition matrix as a CDF.
class ChainSampler {
public:
    explicit ChainSampler(const MarkovChannelSpec& chain);
    int initial(std::mt19937_64& rng) const;
    int step(int from, std::mt19937_64& rng) const;

private:
    std::vector<std::vector<std::pair<int, double>>> cdf_;
    std::vector<double> stationary_cdf_;
};

/// Stream `index` derived from a master seed.
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index);

struct SimOptions {
    std::uint64_t slots = 1000000;
    std::uint64_t seed = 1;
    std::size_t batches = 100;
    double tolerance = 1e-8;       ///< slack allowed on every rate bound
    std::ostream* trace = nullptr; ///< per-slot delimited dump when set
    bool per_state = true;         ///< tally outages per delayed joint state
};

struct SimResult {
    std::uint64_t slots = 0;
    std::uint64_t burn_in = 0;
    double credited_rate = 0.0;    ///< selected sum-rate averaged over all slots
    double loss_aware_rate = 0.0;  ///< slots in outage count as zero
    double credited_stderr = 0.0;  ///< batch means
    double loss_aware_stderr = 0.0;
    std::uint64_t outages = 0;
    double outage_rate = 0.0;
    std::vector<std::uint64_t> user_outages;  ///< interference-as-noise policies only
    /// Pearson statistic for independence of the first two users' outage
    /// flags (one degree of freedom); NaN when undefined.
    double user_outage_chi2 = 0.0;
    /// Visits and outages per delayed joint state (policy's CSI age).
    std::vector<std::uint32_t> state_visits;
    std::vector<std::uint32_t> state_outages;
    /// Largest amount by which a chosen rate exceeded its bound.
    double worst_excess = 0.0;
};

/// Runs `options.slots` slots after a burn-in of max(d_e + d_c, policy delay).
SimResult run(const Scenario& scenario, const RatePolicy& policy, const SimOptions& options);

/// Binomial standard deviation sqrt(p (1 - p) / n).
double binomial_sigma(double p, std::uint64_t n);

/// Empirical statistics of a single chain.
struct ChainStatistics {
    std::vector<std::uint64_t> visits;  ///< per state
    /// counts(m, n): transitions n -> m over disjoint windows of `delay` slots.
    Eigen::MatrixXd d_step_counts;
};

ChainStatistics chain_statistics(const MarkovChannelSpec& chain, int delay, std::uint64_t slots,
                                 std::uint64_t seed);

}  // namespace fogran
