#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fogran/policy_fran.hpp"
#include "fogran/simulate.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <cmath>
#include <sstream>

using namespace fogran;

namespace {

NetworkConfig small(int n, double eps) {
    NetworkConfig c;
    c.mc_samples = 2000;
    c.direct_states = c.cross_states = n;
    c.antenna = AntennaMode::full;
    c.epsilon = eps;
    c.fronthaul_delay = 1;
    return c;
}

SimOptions opts(std::uint64_t slots, std::uint64_t seed = 3) {
    SimOptions o;
    o.slots = slots;
    o.seed = seed;
    return o;
}

Scenario binary_scenario(double eps, int de, int dc) {
    OracleOptions o;
    o.samples = 20000;
    o.seed = 5;
    const auto spec = make_two_user_spec(std::sqrt(10.0), 0.5, 2.0, 0.1, 0.3, o);
    NetworkConfig base;
    base.mc_samples = o.samples;
    base.seed = o.seed;
    base.epsilon = eps;
    base.edge_delay = de;
    base.fronthaul_delay = dc;
    base.policies = {PolicyKind::dran, PolicyKind::cran_lp, PolicyKind::fran_lp, PolicyKind::cran_closed,
                     PolicyKind::fran_closed};
    return two_user_scenario(spec, base);
}

}  // namespace

TEST_CASE("random streams are reproducible and distinct") {
    auto a = stream_rng(9, 0), b = stream_rng(9, 0), c = stream_rng(9, 1), d = stream_rng(10, 0);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
}

TEST_CASE("single-state channels reproduce the analytic rate exactly") {
    auto c = small(1, 0.1);
    for (PolicyKind k : {PolicyKind::dran, PolicyKind::cran_lp, PolicyKind::fran_lp}) {
        const Scenario s(c);
        const auto policy = make_policy(s, k);
        const auto r = run(s, *policy, opts(10000));
        CHECK(r.outages == 0);
        CHECK(r.credited_rate == doctest::Approx(policy->analytic_sum_rate()).epsilon(1e-12));
    }
}

TEST_CASE("near-static channels never go into outage") {
    for (double eps : {0.0, 0.05}) {
        auto c = small(6, eps);
        c.velocity = 1e-9;
        const Scenario s(c);
        for (PolicyKind k : {PolicyKind::dran, PolicyKind::cran_lp, PolicyKind::fran_lp}) {
            const auto r = run(s, *make_policy(s, k), opts(20000));
            CHECK(r.outages == 0);
            CHECK(r.credited_stderr < 1e-12);
        }
    }
}

TEST_CASE("zero budget gives zero outages") {
    const Scenario s(small(6, 0.0));
    for (PolicyKind k : {PolicyKind::dran, PolicyKind::cran_lp, PolicyKind::fran_lp}) {
        const auto r = run(s, *make_policy(s, k), opts(200000));
        CHECK(r.outages == 0);
        CHECK(r.worst_excess <= 1e-8);
    }
    const Scenario b = binary_scenario(0.0, 2, 1);
    for (PolicyKind k : {PolicyKind::cran_closed, PolicyKind::fran_closed}) {
        const auto r = run(b, *make_policy(b, k), opts(200000));
        CHECK(r.outages == 0);
    }
}

TEST_CASE("empirical rates and outages agree with the analysis") {
    for (double eps : {0.0, 0.01}) {
        const Scenario s(small(6, eps));
        for (PolicyKind k : {PolicyKind::dran, PolicyKind::cran_lp, PolicyKind::fran_lp}) {
            const auto policy = make_policy(s, k);
            const auto r = run(s, *policy, opts(300000));
            CAPTURE(policy_name(k));
            CAPTURE(eps);
            CHECK(std::abs(r.credited_rate - policy->analytic_sum_rate()) <= 3.0 * r.credited_stderr + 1e-9);
            CHECK(r.outage_rate <= eps + 3.0 * binomial_sigma(eps, r.slots));
            CHECK(r.loss_aware_rate <= r.credited_rate);
        }
    }
    const Scenario b = binary_scenario(0.05, 2, 1);
    for (PolicyKind k : {PolicyKind::cran_closed, PolicyKind::fran_closed}) {
        const auto policy = make_policy(b, k);
        const auto r = run(b, *policy, opts(300000));
        CHECK(std::abs(r.credited_rate - policy->analytic_sum_rate()) <= 3.0 * r.credited_stderr + 1e-9);
        CHECK(r.outage_rate <= 0.05 + 3.0 * binomial_sigma(0.05, r.slots));
    }
}

TEST_CASE("per-state tallies cover every slot") {
    const Scenario s(small(4, 0.01));
    const auto r = run(s, *make_policy(s, PolicyKind::cran_lp), opts(50000));
    std::uint64_t visits = 0, outages = 0;
    for (auto v : r.state_visits) visits += v;
    for (auto v : r.state_outages) outages += v;
    CHECK(visits == r.slots);
    CHECK(outages == r.outages);
}

TEST_CASE("per-user outages of interference-as-noise rates") {
    const Scenario s(small(4, 0.05));
    const auto r = run(s, *make_policy(s, PolicyKind::dran), opts(50000));
    std::uint64_t per_user = 0;
    for (auto v : r.user_outages) per_user += v;
    CHECK(per_user >= r.outages);
    CHECK(r.outages > 0);
    CHECK(std::isfinite(r.user_outage_chi2));
}

TEST_CASE("runs are deterministic for a fixed seed") {
    const Scenario s(small(5, 0.01));
    const auto policy = make_policy(s, PolicyKind::fran_lp);
    const auto a = run(s, *policy, opts(30000, 11));
    const auto b = run(s, *policy, opts(30000, 11));
    const auto c = run(s, *policy, opts(30000, 12));
    CHECK(a.credited_rate == b.credited_rate);
    CHECK(a.outages == b.outages);
    CHECK(a.state_visits == b.state_visits);
    CHECK(a.credited_rate != c.credited_rate);
}

TEST_CASE("burn-in covers the oldest CSI") {
    auto c = small(4, 0.0);
    c.edge_delay = 3;
    c.fronthaul_delay = 4;
    const Scenario s(c);
    CHECK(run(s, *make_policy(s, PolicyKind::dran), opts(1000)).burn_in == 7);
    CHECK(run(s, *make_policy(s, PolicyKind::cran_lp), opts(1000)).burn_in == 7);
}

TEST_CASE("trace has a header and one line per slot") {
    const Scenario s(small(3, 0.0));
    std::ostringstream trace;
    auto o = opts(500);
    o.trace = &trace;
    run(s, *make_policy(s, PolicyKind::cran_lp), o);
    std::istringstream in(trace.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "slot,state0,state1,state2,state3,rate0,rate1,outage");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 500);
}

TEST_CASE("chain histogram and d-step frequencies") {
    ClarkeParams p;
    p.avg_snr = std::sqrt(10.0);
    p.velocity = 100.0 / 3.6;
    p.num_states = 15;
    const auto chain = build_fsmc(p);
    for (int d : {1, 3}) {
        const auto st = chain_statistics(chain, d, 1000000, 21);
        for (auto v : st.visits) CHECK(std::abs(static_cast<double>(v) / 1e6 - 1.0 / 15.0) < 0.01);
        const auto T = d_step(chain, d);
        std::size_t outside = 0, cells = 0;
        double expected = 0.0, var = 0.0;
        for (int n = 0; n < 15; ++n) {
            const double total = st.d_step_counts.col(n).sum();
            for (int m = 0; m < 15; ++m) {
                const double pm = T(m, n);
                if (pm == 0.0) {
                    CHECK(st.d_step_counts(m, n) == 0.0);
                    continue;
                }
                ++cells;
                const double sigma = std::sqrt(pm * (1.0 - pm) / total);
                if (std::abs(st.d_step_counts(m, n) / total - pm) > 3.0 * sigma) ++outside;
                // Two-sided binomial tail beyond 3 sigma.
                const boost::math::binomial_distribution<double> bin(total, pm);
                const double hi = std::floor(total * (pm + 3.0 * sigma));
                const double lo = std::ceil(total * (pm - 3.0 * sigma));
                double q = hi >= total ? 0.0 : boost::math::cdf(boost::math::complement(bin, hi));
                if (lo > 0.0) q += boost::math::cdf(bin, lo - 1.0);
                expected += q;
                var += q * (1.0 - q);
            }
        }
        CAPTURE(outside);
        CAPTURE(expected);
        CHECK(static_cast<double>(outside) <= expected + 3.0 * std::sqrt(var));
        CHECK(cells > 0);
    }
}

TEST_CASE("invalid horizons") {
    const Scenario s(small(3, 0.0));
    CHECK_THROWS(run(s, *make_policy(s, PolicyKind::dran), opts(10)));
    CHECK(binomial_sigma(0.5, 100) == doctest::Approx(0.05));
}
