#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fogran/outage_region.hpp"
#include "fogran/policy_cran.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

using namespace fogran;

namespace {

OracleOptions full_options() {
    OracleOptions o;
    o.samples = 20000;
    o.seed = 5;
    o.mode = AntennaMode::full;
    return o;
}

std::vector<TwoUserBinarySpec> specs() {
    const auto o = full_options();
    return {
        make_two_user_spec(std::sqrt(10.0), 0.5, 2.0, 0.1, 0.3, o),
        make_two_user_spec(1.0, 0.2, 5.0, 0.3, 0.1, o),
        make_two_user_spec(10.0, 0.5, 0.6, 0.2, 0.2, o),
        make_two_user_spec(1.0, 1.0, 10.0, 0.05, 0.4, o),
    };
}

/// Region of current cross states (a, b) = (I_12, I_21) in the binary model.
bool inside(const TwoUserBinarySpec& s, int a, int b, double r1, double r2) {
    const double level[2] = {s.I_L, s.I_H};
    const double sum = a == b ? (a == kLow ? s.C_LL : s.C_HH) : s.C_LH;
    const double tol = 1e-12;
    return r1 <= std::log2(1.0 + s.S + level[b]) + tol && r2 <= std::log2(1.0 + s.S + level[a]) + tol &&
           r1 + r2 <= sum + tol;
}

/// Best candidate sum with outage <= eps for the delayed pair (x, y).
double best_candidate(const TwoUserBinarySpec& s, int d, int x, int y, double eps) {
    const double c = s.single_bound;
    const std::array<std::pair<double, double>, 6> points{{{s.C_LL / 2, s.C_LL / 2},
                                                           {s.C_HH / 2, s.C_HH / 2},
                                                           {s.C_LH / 2, s.C_LH / 2},
                                                           {c, c},
                                                           {s.C_LH - c, c},
                                                           {c, s.C_LH - c}}};
    double best = 0.0;
    for (const auto& [r1, r2] : points) {
        double outage = 0.0;
        for (int a : {kLow, kHigh}) {
            for (int b : {kLow, kHigh}) {
                if (!inside(s, a, b, r1, r2)) outage += s.beta(a, x, d) * s.beta(b, y, d);
            }
        }
        if (outage <= eps + 1e-12) best = std::max(best, r1 + r2);
    }
    return best;
}

/// Vertex enumeration of {r >= 0, r1 <= b1, r2 <= b2, r1 + r2 <= b3}.
double vertex_max(double b1, double b2, double b3) {
    const std::array<std::array<double, 3>, 5> lines{{{1, 0, b1}, {0, 1, b2}, {1, 1, b3}, {1, 0, 0}, {0, 1, 0}}};
    double best = 0.0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const auto& u = lines[i];
            const auto& v = lines[j];
            const double det = u[0] * v[1] - u[1] * v[0];
            if (det == 0.0) continue;
            const double x = (u[2] * v[1] - u[1] * v[2]) / det;
            const double y = (u[0] * v[2] - u[2] * v[0]) / det;
            const double t = 1e-12;
            if (x < -t || y < -t || x > b1 + t || y > b2 + t || x + y > b3 + t) continue;
            best = std::max(best, x + y);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("zero budget always schedules the all-low point") {
    for (const auto& s : specs()) {
        for (int d : {0, 1, 3, 10}) {
            for (int x : {kLow, kHigh}) {
                for (int y : {kLow, kHigh}) {
                    const auto r = cran_two_user_rates(s, d, x, y, 0.0);
                    CHECK(r.point == 'A');
                    CHECK(r.r1 == s.C_LL / 2.0);
                    CHECK(r.r2 == s.C_LL / 2.0);
                }
            }
            CHECK(cran_two_user_sum_rate(s, d, 0.0) == doctest::Approx(s.C_LL).epsilon(1e-15));
        }
    }
}

TEST_CASE("unit budget uses the all-high sum") {
    for (const auto& s : specs()) {
        for (int x : {kLow, kHigh}) {
            for (int y : {kLow, kHigh}) CHECK(cran_two_user_rates(s, 2, x, y, 1.0).sum() == s.C_HH);
        }
    }
}

TEST_CASE("mirrored delayed pairs give equal sums") {
    for (const auto& s : specs()) {
        for (double eps : {1e-3, 0.05, 0.2, 0.6}) {
            for (int d : {1, 2, 5}) {
                CHECK(cran_two_user_rates(s, d, kLow, kHigh, eps).sum() ==
                      cran_two_user_rates(s, d, kHigh, kLow, eps).sum());
            }
        }
    }
}

TEST_CASE("undelayed rate is the stationary mix of the four regions") {
    for (const auto& s : specs()) {
        const double pl = s.pi_L(), ph = s.pi_H();
        const double mix = pl * pl * s.C_LL + 2 * pl * ph * s.C_LH + ph * ph * s.C_HH;
        for (double eps : {1e-6, 0.01, 0.3, 0.999}) {
            CHECK(std::abs(cran_two_user_sum_rate(s, 0, eps) - mix) <= 1e-9);
        }
    }
}

TEST_CASE("closed form matches exhaustive candidate search") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& s : specs()) {
        for (int trial = 0; trial < 200; ++trial) {
            const int d = 1 + static_cast<int>(u(rng) * 8);
            const double eps = std::pow(10.0, -4.0 * u(rng));
            for (int x : {kLow, kHigh}) {
                for (int y : {kLow, kHigh}) {
                    const auto r = cran_two_user_rates(s, d, x, y, eps);
                    CHECK(r.sum() == doctest::Approx(best_candidate(s, d, x, y, eps)).epsilon(1e-12));
                    double outage = 0.0;
                    for (int a : {kLow, kHigh}) {
                        for (int b : {kLow, kHigh}) {
                            if (!inside(s, a, b, r.r1, r.r2)) outage += s.beta(a, x, d) * s.beta(b, y, d);
                        }
                    }
                    CHECK(outage <= eps + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("per-region LP matches vertex enumeration") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 500; ++trial) {
        CapacityRegion region;
        region.users = 2;
        region.bounds = {0.0, u(rng), u(rng), u(rng) * 2.0};
        region.std_errors.assign(4, 0.0);
        const auto sol = max_sum_rate(region);
        CHECK(sol.value == doctest::Approx(vertex_max(region.bounds[1], region.bounds[2], region.bounds[3])).epsilon(1e-12));
        CHECK(contains(region, sol.x));
        CHECK(is_submodular(region) == (region.bounds[3] <= region.bounds[1] + region.bounds[2] + 1e-9));
    }
}

TEST_CASE("LP policy on the binary scenario reproduces the zero-outage and undelayed anchors") {
    const auto spec0 = specs()[0];
    NetworkConfig base;
    base.mc_samples = full_options().samples;
    base.seed = full_options().seed;
    const Scenario sc = two_user_scenario(spec0, base);
    const auto s = two_user_spec(sc);
    for (int d : {1, 4}) {
        const CranLpPolicy lp(sc, d, 0.0);
        CHECK(std::abs(lp.sum_rate() - s.C_LL) <= 1e-6 + s.std_error);
        CHECK(lp.non_tight_regions() == 0);
    }
    for (double eps : {0.01, 0.3}) {
        const CranLpPolicy lp(sc, 0, eps);
        CHECK(std::abs(lp.sum_rate() - cran_two_user_sum_rate(s, 0, eps)) <= 1e-6 + s.std_error);
    }
}

TEST_CASE("single user averages the percentile capacity") {
    NetworkConfig c;
    c.users = 1;
    c.mc_samples = 100;
    c.direct_states = 8;
    c.cross_states = 1;
    const Scenario s(c);
    for (int d : {0, 1, 3}) {
        for (double eps : {0.0, 0.01, 0.2}) {
            const CranLpPolicy lp(s, d, eps);
            double expect = 0.0;
            const auto table = percentile_table(d_step(s.direct(), d), eps);
            for (int n = 0; n < 8; ++n) {
                expect += s.direct().stationary_law()(n) *
                          std::log2(1.0 + s.direct().level(table[static_cast<std::size_t>(n)]));
            }
            CHECK(lp.sum_rate() == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("LP policy is monotone in the delay and the budget") {
    NetworkConfig c;
    c.mc_samples = 2000;
    c.direct_states = c.cross_states = 6;
    c.antenna = AntennaMode::full;
    const Scenario s(c);
    double last = 1e9;
    for (int d : {0, 1, 2, 4, 8}) {
        const double r = CranLpPolicy(s, d, 0.0).sum_rate();
        CHECK(r <= last + 1e-12);
        last = r;
    }
    last = 0.0;
    for (double eps : {0.0, 1e-3, 1e-2, 1e-1}) {
        const double r = CranLpPolicy(s, 3, eps).sum_rate();
        CHECK(r >= last - 1e-12);
        last = r;
    }
}
