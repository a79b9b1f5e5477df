#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fogran/outage_region.hpp"
#include "fogran/policy_dran.hpp"

#include <cmath>

using namespace fogran;

namespace {

NetworkConfig small_config() {
    NetworkConfig c;
    c.mc_samples = 2000;
    c.direct_states = c.cross_states = 15;
    return c;
}

MarkovChannelSpec single_level(double g, ChannelKind kind) {
    return make_chain({g}, Eigen::MatrixXd::Ones(1, 1), kind);
}

}  // namespace

TEST_CASE("instantaneous rates") {
    CHECK(instantaneous_rate(3.0, {}) == 2.0);
    const double one[1] = {1.0};
    CHECK(instantaneous_rate(1.0, one) == doctest::Approx(std::log2(1.5)).epsilon(1e-15));
    CHECK(instantaneous_rate(std::pow(10.0, 0.5), one) ==
          doctest::Approx(std::log2(1.0 + std::sqrt(10.0) / 2.0)).epsilon(1e-15));
    CHECK(instantaneous_rate(std::pow(10.0, 0.5), one) == doctest::Approx(1.368).epsilon(1e-3));
    const double two[2] = {0.5, 0.5};
    CHECK(instantaneous_rate(1.0, two) == doctest::Approx(std::log2(1.5)).epsilon(1e-15));
}

TEST_CASE("degenerate chains give one atom") {
    const auto direct = single_level(3.0, ChannelKind::direct);
    const auto cross = single_level(1.0, ChannelKind::cross);
    const auto table = build_cdf(direct, cross, 2, 2);
    REQUIRE(table.combos() == 1);
    REQUIRE(table.atoms(0).size() == 1);
    CHECK(table.atoms(0)[0].rate == doctest::Approx(std::log2(2.5)).epsilon(1e-15));
    CHECK(table.atoms(0)[0].cumulative == doctest::Approx(1.0));
}

TEST_CASE("binary cross chain: two atoms weighted by the d-step law") {
    const double S = 3.0, p = 0.2, q = 0.35;
    const auto direct = single_level(S, ChannelKind::direct);
    const auto cross = two_state_chain(0.5, 2.0, p, q);
    for (int d : {0, 1, 4}) {
        const auto table = build_cdf(direct, cross, d, 2);
        REQUIRE(table.combos() == 2);
        const auto T = d_step(cross, d);
        for (int x : {0, 1}) {
            const auto& atoms = table.atoms(static_cast<std::uint64_t>(x));
            if (d == 0) {
                REQUIRE(atoms.size() == 1);
                continue;
            }
            REQUIRE(atoms.size() == 2);
            CHECK(atoms[0].rate == doctest::Approx(std::log2(1.0 + S / 3.0)));
            CHECK(atoms[1].rate == doctest::Approx(std::log2(1.0 + S / 1.5)));
            CHECK(atoms[0].cumulative == doctest::Approx(T(1, x)).epsilon(1e-14));
            CHECK(atoms[1].cumulative == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("inverse CDF on a hand-built table") {
    const DranCdfTable low_first(1, 1, 1, 0, {{{1.0, 0.3}, {2.0, 1.0}}});
    CHECK(dran_rate(low_first, 0, 0.0) == 1.0);
    CHECK(dran_rate(low_first, 0, 0.2) == 1.0);
    // Pr[C < 2] = 0.3 <= 0.3: choosing 2 keeps the outage at 0.3.
    CHECK(dran_rate(low_first, 0, 0.3) == 2.0);
    CHECK(dran_rate(low_first, 0, 0.9) == 2.0);
    CHECK(dran_rate(low_first, 0, 1.0) == 2.0);

    const DranCdfTable heavy_low(1, 1, 1, 0, {{{1.0, 0.7}, {2.0, 1.0}}});
    CHECK(dran_rate(heavy_low, 0, 0.3) == 1.0);
    CHECK(dran_rate(heavy_low, 0, 0.7) == 2.0);

    CHECK_THROWS(DranCdfTable(1, 1, 1, 0, {{{2.0, 0.5}, {1.0, 1.0}}}));
    CHECK_THROWS(DranCdfTable(1, 1, 1, 0, {{{1.0, 0.5}, {2.0, 0.9}}}));
}

TEST_CASE("budget extremes pick the support bounds") {
    const Scenario s(small_config());
    const auto table = build_cdf(s.direct(), s.cross(), 2, 2);
    for (std::uint64_t c = 0; c < table.combos(); c += 17) {
        const auto& atoms = table.atoms(c);
        CHECK(dran_rate(table, c, 1.0) == atoms.back().rate);
        CHECK(dran_rate(table, c, 0.0) == atoms.front().rate);
    }
}

TEST_CASE("mixing removes the dependence on the delayed combo") {
    const Scenario s(small_config());
    const auto table = build_cdf(s.direct(), s.cross(), 5000, 2);
    const auto& ref = table.atoms(0);
    for (std::uint64_t c = 1; c < table.combos(); ++c) {
        const auto& a = table.atoms(c);
        REQUIRE(a.size() == ref.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].rate == ref[k].rate);
            CHECK(std::abs(a[k].cumulative - ref[k].cumulative) < 1e-6);
        }
    }
}

TEST_CASE("zero budget after full mixing gives the worst-case rate per user") {
    const Scenario s(small_config());
    const auto r = dran_sum_rate(s, 200, 0.0);
    const double worst = std::log2(1.0 + s.direct().level(0) / (1.0 + s.cross().levels().back()));
    CHECK(r.sum_rate == doctest::Approx(2.0 * worst).epsilon(1e-12));
}

TEST_CASE("symmetric users contribute equally") {
    for (double eps : {0.0, 1e-3, 0.05}) {
        const Scenario s(small_config());
        const auto r = dran_sum_rate(s, 2, eps);
        REQUIRE(r.per_user.size() == 2);
        CHECK(std::abs(r.per_user[0] - r.per_user[1]) < 1e-12);
        CHECK(r.eps_bar == doctest::Approx(eps_bar_for(Split::dran, 2, eps)));
    }
}

TEST_CASE("rate grows with the outage budget") {
    const Scenario s(small_config());
    double last = 0.0;
    for (double eps : {0.0, 1e-4, 1e-3, 1e-2, 0.1}) {
        const double r = dran_sum_rate(s, 2, eps).sum_rate;
        CHECK(r >= last);
        last = r;
    }
}

TEST_CASE("enumeration cap") {
    const Scenario s(small_config());
    CHECK_THROWS_AS(build_cdf(s.direct(), s.cross(), 2, 2, 10), std::length_error);
}
