#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fogran/config.hpp"

#include <sstream>

using namespace fogran;

namespace {

NetworkConfig parse(const std::string& text, RunSettings* settings = nullptr) {
    NetworkConfig c;
    RunSettings local;
    std::istringstream in(text);
    read_config(in, c, settings ? *settings : local);
    return c;
}

}  // namespace

TEST_CASE("defaults") {
    const NetworkConfig c;
    CHECK(c.users == 2);
    CHECK(c.edge_delay == 2);
    CHECK(c.fronthaul_delay == 0);
    CHECK(c.epsilon == 0.0);
    CHECK(linear_to_db(c.direct_snr) == doctest::Approx(5.0));
    CHECK(linear_to_db(c.cross_snr) == doctest::Approx(0.0));
    CHECK(c.velocity * 3.6 == doctest::Approx(100.0));
    CHECK(kSpeedOfLight / c.wavelength == doctest::Approx(1e9));
    CHECK(c.slot_duration == 1e-4);
    CHECK(c.direct_states == 15);
    CHECK(c.cross_states == 15);
    CHECK(c.antenna == AntennaMode::restricted);
    CHECK(c.mc_samples == 200000);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("sections convert user units") {
    RunSettings s;
    const auto c = parse(R"(
# comment
[network]
users = 3
edge_delay = 4
fronthaul_delay = 6
epsilon = 1e-3
splits = dran, fran
lp_eps_exponent = 1/K^2

[channel]
direct_snr_db = 10
cross_snr_db = -3
velocity_kmh = 36
carrier_hz = 2e9
slot_s = 5e-4
direct_states = 8
cross_states = 4

[capacity]
antenna_mode = full
mc_samples = 1000
seed = 99
cache_file = cap.txt

[simulation]
enabled = false
slots = 5000
seed = 17
)", &s);
    CHECK(c.users == 3);
    CHECK(c.edge_delay == 4);
    CHECK(c.fronthaul_delay == 6);
    CHECK(c.cran_delay() == 10);
    CHECK(c.epsilon == 1e-3);
    CHECK(c.policies == std::vector<PolicyKind>{PolicyKind::dran, PolicyKind::fran_lp});
    CHECK(c.fran_budget == FranBudget::per_process);
    CHECK(c.direct_snr == doctest::Approx(10.0));
    CHECK(c.cross_snr == doctest::Approx(std::pow(10.0, -0.3)));
    CHECK(c.velocity == doctest::Approx(10.0));
    CHECK(c.wavelength == doctest::Approx(0.15));
    CHECK(c.slot_duration == 5e-4);
    CHECK(c.direct_states == 8);
    CHECK(c.cross_states == 4);
    CHECK(c.antenna == AntennaMode::full);
    CHECK(c.mc_samples == 1000);
    CHECK(c.seed == 99);
    CHECK(s.cache_file == "cap.txt");
    CHECK_FALSE(c.simulate);
    CHECK(c.sim_slots == 5000);
    CHECK(c.sim_seed == 17);
}

TEST_CASE("write then read reproduces the configuration") {
    NetworkConfig c;
    c.users = 3;
    c.epsilon = 0.0123;
    c.direct_snr = db_to_linear(7.5);
    c.velocity = 42.0 / 3.6;
    c.antenna = AntennaMode::full;
    c.fran_budget = FranBudget::per_process;
    c.policies = {PolicyKind::cran_lp, PolicyKind::cran_closed};
    RunSettings s;
    s.cache_file = "x.cache";
    std::stringstream text;
    write_config(text, c, s);
    RunSettings s2;
    NetworkConfig d;
    read_config(text, d, s2);
    CHECK(d.users == c.users);
    CHECK(d.epsilon == c.epsilon);
    CHECK(d.direct_snr == doctest::Approx(c.direct_snr).epsilon(1e-14));
    CHECK(d.velocity == doctest::Approx(c.velocity).epsilon(1e-14));
    CHECK(d.antenna == c.antenna);
    CHECK(d.fran_budget == c.fran_budget);
    CHECK(d.policies == c.policies);
    CHECK(s2.cache_file == s.cache_file);
}

TEST_CASE("errors name the offending entry") {
    CHECK_THROWS_AS(parse("[network]\nfoo = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[bogus]\nusers = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("users = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("[network]\nusers = two\n"), ConfigError);
    CHECK_THROWS_AS(parse("[network]\nepsilon = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[network]\nedge_delay = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[capacity]\nmc_samples = -5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[capacity]\nantenna_mode = both\n"), ConfigError);
    CHECK_THROWS_AS(parse("[network]\nsplits = xran\n"), ConfigError);
    CHECK_THROWS_AS(parse("[channel]\ndirect_states = 0\n"), ConfigError);
    try {
        parse("[network]\nfoo = 1\n");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
}

TEST_CASE("name helpers") {
    CHECK(parse_antenna("restricted") == AntennaMode::restricted);
    CHECK(antenna_name(AntennaMode::full) == "full");
    CHECK(parse_budget("1/K") == FranBudget::per_user);
    CHECK(budget_name(FranBudget::per_process) == "1/K^2");
    CHECK(parse_policy_list("cran,fran-closed") ==
          std::vector<PolicyKind>{PolicyKind::cran_lp, PolicyKind::fran_closed});
    CHECK(parse_policy("cran-closed") == PolicyKind::cran_closed);
    CHECK(policy_name(PolicyKind::fran_lp) == "fran");
    CHECK_THROWS(parse_policy_list(""));
}
