#include "fogran/simulate.hpp"

#include "fogran/outage_region.hpp"
#include "fogran/policy_dran.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace fogran {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class DranPolicy final : public RatePolicy {
public:
    DranPolicy(const Scenario& s, int delay, double eps) : space_(s.space()), delay_(delay) {
        const DranCdfTable table = build_cdf(s.direct(), s.cross(), delay, s.config().users);
        const double eps_bar = eps_bar_for(Split::dran, s.config().users, eps);
        rate_.resize(static_cast<std::size_t>(table.combos()));
        double per_user = 0.0;
        for (std::uint64_t c = 0; c < table.combos(); ++c) {
            rate_[static_cast<std::size_t>(c)] = dran_rate(table, c, eps_bar);
            per_user += s.local_weight(c) * rate_[static_cast<std::size_t>(c)];
        }
        analytic_ = per_user * s.config().users;
    }
    PolicyKind kind() const override { return PolicyKind::dran; }
    int delay() const override { return delay_; }
    bool joint_decoding() const override { return false; }
    double analytic_sum_rate() const override { return analytic_; }
    void select(std::span<const int> delayed, std::span<double> rates) const override {
        for (int j = 0; j < space_.users(); ++j) {
            rates[static_cast<std::size_t>(j)] =
                rate_[static_cast<std::size_t>(space_.local_index(j, delayed))];
        }
    }

private:
    StateSpace space_;
    int delay_;
    std::vector<double> rate_;
    double analytic_ = 0.0;
};

class CranLpRatePolicy final : public RatePolicy {
public:
    CranLpRatePolicy(const Scenario& s, int delay, double eps)
        : space_(s.space()), policy_(s, delay, eps) {}
    PolicyKind kind() const override { return PolicyKind::cran_lp; }
    int delay() const override { return policy_.delay(); }
    bool joint_decoding() const override { return true; }
    double analytic_sum_rate() const override { return policy_.sum_rate(); }
    void select(std::span<const int> delayed, std::span<double> rates) const override {
        const auto r = policy_.rates(space_.encode(delayed));
        std::copy(r.begin(), r.end(), rates.begin());
    }

private:
    StateSpace space_;
    CranLpPolicy policy_;
};

class FranLpRatePolicy final : public RatePolicy {
public:
    FranLpRatePolicy(const Scenario& s, int delay, double eps)
        : space_(s.space()), policy_(s, delay, eps) {}
    PolicyKind kind() const override { return PolicyKind::fran_lp; }
    int delay() const override { return policy_.delay(); }
    bool joint_decoding() const override { return true; }
    double analytic_sum_rate() const override { return policy_.sum_rate(); }
    void select(std::span<const int> delayed, std::span<double> rates) const override {
        for (int j = 0; j < space_.users(); ++j) {
            rates[static_cast<std::size_t>(j)] = policy_.rate(j, space_.local_index(j, delayed));
        }
    }

private:
    StateSpace space_;
    FranLpPolicy policy_;
};

class CranClosedPolicy final : public RatePolicy {
public:
    CranClosedPolicy(const Scenario& s, int delay, double eps)
        : spec_(two_user_spec(s)), delay_(delay) {
        p12_ = s.space().cross_process(0, 1);
        p21_ = s.space().cross_process(1, 0);
        for (int x : {kLow, kHigh}) {
            for (int y : {kLow, kHigh}) pairs_[x][y] = cran_two_user_rates(spec_, delay, x, y, eps);
        }
        analytic_ = cran_two_user_sum_rate(spec_, delay, eps);
    }
    PolicyKind kind() const override { return PolicyKind::cran_closed; }
    int delay() const override { return delay_; }
    bool joint_decoding() const override { return true; }
    double analytic_sum_rate() const override { return analytic_; }
    void select(std::span<const int> delayed, std::span<double> rates) const override {
        const RatePair& r = pairs_[delayed[static_cast<std::size_t>(p12_)]]
                                  [delayed[static_cast<std::size_t>(p21_)]];
        rates[0] = r.r1;
        rates[1] = r.r2;
    }

private:
    TwoUserBinarySpec spec_;
    int delay_;
    int p12_ = 0;
    int p21_ = 0;
    RatePair pairs_[2][2];
    double analytic_ = 0.0;
};

class FranClosedPolicy final : public RatePolicy {
public:
    FranClosedPolicy(const Scenario& s, int delay, double eps)
        : spec_(two_user_spec(s)), delay_(delay) {
        p12_ = s.space().cross_process(0, 1);
        p21_ = s.space().cross_process(1, 0);
        const FranTwoUserRates base = fran_two_user_base_rates(spec_);
        const double eps_bar = eps_bar_for(Split::fran, 2, eps);
        for (int x : {kLow, kHigh}) rate_[x] = fran_two_user_rate(spec_, base, delay, eps_bar, x);
        analytic_ = fran_two_user_sum_rate(spec_, delay, eps);
    }
    PolicyKind kind() const override { return PolicyKind::fran_closed; }
    int delay() const override { return delay_; }
    bool joint_decoding() const override { return true; }
    double analytic_sum_rate() const override { return analytic_; }
    void select(std::span<const int> delayed, std::span<double> rates) const override {
        rates[0] = rate_[delayed[static_cast<std::size_t>(p12_)]];
        rates[1] = rate_[delayed[static_cast<std::size_t>(p21_)]];
    }

private:
    TwoUserBinarySpec spec_;
    int delay_;
    int p12_ = 0;
    int p21_ = 0;
    double rate_[2] = {0.0, 0.0};
    double analytic_ = 0.0;
};

/// Subset bounds of visited joint states, filled on first use.
class RegionCache {
public:
    explicit RegionCache(const Scenario& s) : scenario_(s) {}

    const double* bounds(std::uint64_t state, std::span<const int> levels) {
        auto [it, fresh] = slot_.try_emplace(state, store_.size());
        if (fresh) {
            const CapacityRegion r = capacity_region(scenario_.oracle(), levels);
            store_.insert(store_.end(), r.bounds.begin(), r.bounds.end());
        }
        return store_.data() + it->second;
    }

private:
    const Scenario& scenario_;
    std::unordered_map<std::uint64_t, std::size_t> slot_;
    std::vector<double> store_;
};

}  // namespace

std::unique_ptr<RatePolicy> make_policy(const Scenario& s, PolicyKind kind) {
    const auto& c = s.config();
    switch (kind) {
        case PolicyKind::dran: return std::make_unique<DranPolicy>(s, c.edge_delay, c.epsilon);
        case PolicyKind::cran_lp: return std::make_unique<CranLpRatePolicy>(s, c.cran_delay(), c.epsilon);
        case PolicyKind::fran_lp: return std::make_unique<FranLpRatePolicy>(s, c.edge_delay, c.epsilon);
        case PolicyKind::cran_closed:
            return std::make_unique<CranClosedPolicy>(s, c.cran_delay(), c.epsilon);
        case PolicyKind::fran_closed:
            return std::make_unique<FranClosedPolicy>(s, c.edge_delay, c.epsilon);
    }
    throw std::invalid_argument("unknown policy");
}

ChainSampler::ChainSampler(const MarkovChannelSpec& chain) {
    const int n = chain.size();
    cdf_.resize(static_cast<std::size_t>(n));
    for (int from = 0; from < n; ++from) {
        double acc = 0.0;
        for (int to = 0; to < n; ++to) {
            const double p = chain.transition()(to, from);
            if (p <= 0.0) continue;
            acc += p;
            cdf_[static_cast<std::size_t>(from)].emplace_back(to, acc);
        }
        cdf_[static_cast<std::size_t>(from)].back().second = 1.0;
    }
    double acc = 0.0;
    for (int m = 0; m < n; ++m) {
        acc += chain.stationary_law()(m);
        stationary_cdf_.push_back(acc);
    }
    stationary_cdf_.back() = 1.0;
}

int ChainSampler::initial(std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(stationary_cdf_.begin(), stationary_cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - stationary_cdf_.begin(),
                                                     static_cast<std::ptrdiff_t>(stationary_cdf_.size()) - 1));
}

int ChainSampler::step(int from, std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    for (const auto& [to, c] : cdf_[static_cast<std::size_t>(from)]) {
        if (u < c) return to;
    }
    return cdf_[static_cast<std::size_t>(from)].back().first;
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(seed)),
                      static_cast<std::uint32_t>(splitmix64(seed) >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

double binomial_sigma(double p, std::uint64_t n) {
    if (n == 0) return std::numeric_limits<double>::infinity();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

SimResult run(const Scenario& s, const RatePolicy& policy, const SimOptions& options) {
    const StateSpace& space = s.space();
    const int users = space.users();
    const auto procs = static_cast<std::size_t>(space.processes());
    const int delay = policy.delay();
    if (options.slots < 2 || options.batches < 2 || options.slots < options.batches) {
        throw std::invalid_argument("horizon too small: need at least as many slots as batches");
    }

    const ChainSampler direct(s.direct());
    const ChainSampler cross(s.cross());
    std::vector<std::mt19937_64> rng;
    for (std::size_t p = 0; p < procs; ++p) rng.push_back(stream_rng(options.seed, p));
    auto sampler = [&](std::size_t p) -> const ChainSampler& {
        return space.is_direct(static_cast<int>(p)) ? direct : cross;
    };

    const auto ring = static_cast<std::size_t>(delay) + 1;
    std::vector<std::vector<int>> history(ring, std::vector<int>(procs));
    for (std::size_t p = 0; p < procs; ++p) history[0][p] = sampler(p).initial(rng[p]);
    const std::uint64_t burn_in =
        static_cast<std::uint64_t>(std::max(s.config().cran_delay(), delay));
    std::uint64_t t = 0;
    auto advance = [&] {
        const auto& prev = history[t % ring];
        ++t;
        auto& cur = history[t % ring];
        for (std::size_t p = 0; p < procs; ++p) cur[p] = sampler(p).step(prev[p], rng[p]);
    };
    while (t < burn_in) advance();

    SimResult res;
    res.slots = options.slots;
    res.burn_in = burn_in;
    res.user_outages.assign(static_cast<std::size_t>(users), 0);
    const bool per_state = options.per_state && space.global_count() <= kJointEnumerationCap;
    if (per_state) {
        res.state_visits.assign(static_cast<std::size_t>(space.global_count()), 0);
        res.state_outages.assign(static_cast<std::size_t>(space.global_count()), 0);
    }

    RegionCache regions(s);
    std::vector<double> rates(static_cast<std::size_t>(users));
    std::vector<double> interference(static_cast<std::size_t>(std::max(0, users - 1)));
    std::vector<char> user_flag(static_cast<std::size_t>(users));
    const std::uint32_t subsets = (1u << users) - 1u;
    const std::uint64_t batch_len = options.slots / options.batches;
    std::vector<double> batch_credit(options.batches, 0.0), batch_loss(options.batches, 0.0);
    std::uint64_t both_counts[2][2] = {{0, 0}, {0, 0}};
    double credited = 0.0;
    double loss_aware = 0.0;

    if (options.trace) {
        *options.trace << "slot";
        for (std::size_t p = 0; p < procs; ++p) *options.trace << ",state" << p;
        for (int j = 0; j < users; ++j) *options.trace << ",rate" << j;
        *options.trace << ",outage\n";
    }

    for (std::uint64_t slot = 0; slot < options.slots; ++slot) {
        advance();
        const auto& cur = history[t % ring];
        const auto& delayed = history[(t - static_cast<std::uint64_t>(delay)) % ring];
        policy.select(delayed, rates);

        bool outage = false;
        if (policy.joint_decoding()) {
            const double* bound = regions.bounds(space.encode(cur), cur);
            for (std::uint32_t mask = 1; mask <= subsets; ++mask) {
                double sum = 0.0;
                for (int j = 0; j < users; ++j) {
                    if (mask & (1u << j)) sum += rates[static_cast<std::size_t>(j)];
                }
                const double excess = sum - bound[mask];
                res.worst_excess = std::max(res.worst_excess, excess);
                if (excess > options.tolerance) outage = true;
            }
        } else {
            for (int j = 0; j < users; ++j) {
                std::size_t k = 0;
                for (int i = 0; i < users; ++i) {
                    if (i == j) continue;
                    interference[k++] =
                        s.cross().level(cur[static_cast<std::size_t>(space.cross_process(j, i))]);
                }
                const double available =
                    instantaneous_rate(s.direct().level(cur[static_cast<std::size_t>(j)]), interference);
                const double excess = rates[static_cast<std::size_t>(j)] - available;
                res.worst_excess = std::max(res.worst_excess, excess);
                user_flag[static_cast<std::size_t>(j)] = excess > options.tolerance;
                if (user_flag[static_cast<std::size_t>(j)]) {
                    outage = true;
                    ++res.user_outages[static_cast<std::size_t>(j)];
                }
            }
            if (users >= 2) ++both_counts[user_flag[0] ? 1 : 0][user_flag[1] ? 1 : 0];
        }

        double sum_rate = 0.0;
        for (double r : rates) sum_rate += r;
        credited += sum_rate;
        if (!outage) loss_aware += sum_rate;
        const std::uint64_t b = slot / batch_len;
        if (b < options.batches) {
            batch_credit[b] += sum_rate;
            if (!outage) batch_loss[b] += sum_rate;
        }
        if (outage) ++res.outages;
        if (per_state) {
            const auto g = static_cast<std::size_t>(space.encode(delayed));
            ++res.state_visits[g];
            if (outage) ++res.state_outages[g];
        }
        if (options.trace) {
            *options.trace << slot;
            for (int v : cur) *options.trace << ',' << v;
            for (double r : rates) *options.trace << ',' << r;
            *options.trace << ',' << (outage ? 1 : 0) << '\n';
        }
    }

    const auto n = static_cast<double>(options.slots);
    res.credited_rate = credited / n;
    res.loss_aware_rate = loss_aware / n;
    res.outage_rate = static_cast<double>(res.outages) / n;
    auto batch_se = [&](const std::vector<double>& sums) {
        const auto nb = static_cast<double>(options.batches);
        double mean = 0.0;
        for (double v : sums) mean += v / static_cast<double>(batch_len);
        mean /= nb;
        double ss = 0.0;
        for (double v : sums) {
            const double d = v / static_cast<double>(batch_len) - mean;
            ss += d * d;
        }
        return std::sqrt(ss / (nb - 1.0) / nb);
    };
    res.credited_stderr = batch_se(batch_credit);
    res.loss_aware_stderr = batch_se(batch_loss);

    res.user_outage_chi2 = std::numeric_limits<double>::quiet_NaN();
    if (!policy.joint_decoding() && users >= 2) {
        const double a = static_cast<double>(both_counts[0][0]);
        const double b = static_cast<double>(both_counts[0][1]);
        const double c = static_cast<double>(both_counts[1][0]);
        const double d = static_cast<double>(both_counts[1][1]);
        const double denom = (a + b) * (c + d) * (a + c) * (b + d);
        if (denom > 0.0) res.user_outage_chi2 = (a + b + c + d) * (a * d - b * c) * (a * d - b * c) / denom;
    }
    return res;
}

ChainStatistics chain_statistics(const MarkovChannelSpec& chain, int delay, std::uint64_t slots,
                                 std::uint64_t seed) {
    if (delay < 1) throw std::invalid_argument("d-step statistics need d >= 1");
    const ChainSampler sampler(chain);
    std::mt19937_64 rng = stream_rng(seed, 0);
    ChainStatistics st;
    st.visits.assign(static_cast<std::size_t>(chain.size()), 0);
    st.d_step_counts = Eigen::MatrixXd::Zero(chain.size(), chain.size());
    int state = sampler.initial(rng);
    int window_start = state;
    for (std::uint64_t t = 0; t < slots; ++t) {
        ++st.visits[static_cast<std::size_t>(state)];
        if (t > 0 && t % static_cast<std::uint64_t>(delay) == 0) {
            st.d_step_counts(state, window_start) += 1.0;
            window_start = state;
        }
        state = sampler.step(state, rng);
    }
    return st;
}

}  // namespace fogran
