#include "fogran/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace fogran {

std::string policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::dran: return "dran";
        case PolicyKind::cran_lp: return "cran";
        case PolicyKind::fran_lp: return "fran";
        case PolicyKind::cran_closed: return "cran-closed";
        case PolicyKind::fran_closed: return "fran-closed";
    }
    return "unknown";
}

PolicyKind parse_policy(const std::string& name) {
    if (name == "dran" || name == "d-ran" || name == "D") return PolicyKind::dran;
    if (name == "cran" || name == "c-ran" || name == "cran-lp" || name == "C") return PolicyKind::cran_lp;
    if (name == "fran" || name == "f-ran" || name == "fran-lp" || name == "F") return PolicyKind::fran_lp;
    if (name == "cran-closed") return PolicyKind::cran_closed;
    if (name == "fran-closed") return PolicyKind::fran_closed;
    throw std::invalid_argument("unknown split '" + name + "'");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

void NetworkConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (users < 1) fail("users must be >= 1");
    if (users > kMaxRegionUsers) fail("users must be <= 4");
    if (edge_delay < 0) fail("edge_delay must be >= 0");
    if (fronthaul_delay < 0) fail("fronthaul_delay must be >= 0");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) fail("epsilon must lie in [0,1]");
    if (!(direct_snr > 0.0) || !std::isfinite(direct_snr)) fail("direct_snr must be positive");
    if (!(cross_snr > 0.0) || !std::isfinite(cross_snr)) fail("cross_snr must be positive");
    if (!(velocity > 0.0) || !std::isfinite(velocity)) fail("velocity must be positive");
    if (!(wavelength > 0.0)) fail("carrier must be positive");
    if (!(slot_duration > 0.0)) fail("slot_duration must be positive");
    if (direct_states < 1) fail("direct_states must be >= 1");
    if (cross_states < 1) fail("cross_states must be >= 1");
    if (mc_samples < 2) fail("mc_samples must be >= 2");
    if (policies.empty()) fail("at least one split must be requested");
}

namespace {

MarkovChannelSpec chain_for(const NetworkConfig& c, ChannelKind kind) {
    const bool direct = kind == ChannelKind::direct;
    ClarkeParams p;
    p.avg_snr = direct ? c.direct_snr : c.cross_snr;
    p.velocity = c.velocity;
    p.wavelength = c.wavelength;
    p.slot_duration = c.slot_duration;
    p.num_states = direct ? c.direct_states : c.cross_states;
    return build_fsmc(p, kind);
}

const NetworkConfig& checked(const NetworkConfig& c) {
    c.validate();
    return c;
}

}  // namespace

Scenario::Scenario(NetworkConfig config, std::shared_ptr<const CapacityOracle> oracle)
    : config_(checked(config)),
      direct_(chain_for(config_, ChannelKind::direct)),
      cross_(chain_for(config_, ChannelKind::cross)),
      space_(config_.users, config_.direct_states, config_.cross_states) {
    attach_oracle(std::move(oracle));
}

namespace {

NetworkConfig with_sizes(NetworkConfig c, const MarkovChannelSpec& direct,
                         const MarkovChannelSpec& cross) {
    c.direct_states = direct.size();
    c.cross_states = cross.size();
    c.validate();
    return c;
}

}  // namespace

Scenario::Scenario(NetworkConfig config, MarkovChannelSpec direct, MarkovChannelSpec cross,
                   std::shared_ptr<const CapacityOracle> oracle)
    : config_(with_sizes(std::move(config), direct, cross)),
      direct_(std::move(direct)),
      cross_(std::move(cross)),
      space_(config_.users, config_.direct_states, config_.cross_states) {
    attach_oracle(std::move(oracle));
}

void Scenario::attach_oracle(std::shared_ptr<const CapacityOracle> oracle) {
    if (oracle && oracle_compatible(*oracle)) {
        oracle_ = std::move(oracle);
    } else {
        OracleOptions opt;
        opt.samples = config_.mc_samples;
        opt.seed = config_.seed;
        opt.mode = config_.antenna;
        oracle_ = std::make_shared<CapacityOracle>(config_.users, direct_.levels(), cross_.levels(), opt);
    }
}

bool Scenario::oracle_compatible(const CapacityOracle& oracle) const {
    return oracle.users() == config_.users && oracle.mode() == config_.antenna &&
           oracle.samples() == config_.mc_samples && oracle.seed() == config_.seed &&
           oracle.direct_levels() == direct_.levels() && oracle.cross_levels() == cross_.levels();
}

double Scenario::stationary_weight(std::span<const int> levels) const {
    double w = 1.0;
    for (int p = 0; p < space_.processes(); ++p) {
        const auto& pi = space_.is_direct(p) ? direct_.stationary_law() : cross_.stationary_law();
        w *= pi(levels[static_cast<std::size_t>(p)]);
    }
    return w;
}

double Scenario::local_weight(std::uint64_t combo) const {
    std::vector<int> c(static_cast<std::size_t>(config_.users));
    space_.decode_local(combo, c);
    double w = direct_.stationary_law()(c[0]);
    for (std::size_t k = 1; k < c.size(); ++k) w *= cross_.stationary_law()(c[k]);
    return w;
}

}  // namespace fogran
