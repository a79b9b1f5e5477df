#include "fogran/two_user.hpp"

#include "fogran/fsmc.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fogran {

double TwoUserBinarySpec::beta(int to, int from, int d) const {
    const MarkovChannelSpec chain = two_state_chain(I_L, I_H, p, q);
    return d_step(chain, d)(to, from);
}

namespace {

void check_nesting(const TwoUserBinarySpec& s, double lo, double hi, double se_lo, double se_hi,
                   const char* what) {
    const double slack = 2.0 * std::hypot(se_lo, se_hi);
    if (lo > hi + slack) {
        std::ostringstream os;
        os << "capacity nesting " << what << " violated: " << lo << " > " << hi << " (slack "
           << slack << ")";
        throw std::logic_error(os.str());
    }
    (void)s;
}

}  // namespace

TwoUserBinarySpec make_two_user_spec(double S, double I_L, double I_H, double p, double q,
                                     const CapacityOracle& oracle) {
    if (!(I_H >= I_L && I_L > 0.0)) throw std::invalid_argument("need I_H >= I_L > 0");
    if (!(p > 0.0 && p <= 1.0 && q > 0.0 && q <= 1.0)) {
        throw std::invalid_argument("need p, q in (0,1]");
    }
    if (oracle.users() != 2 || oracle.mode() != AntennaMode::full ||
        oracle.direct_levels().size() != 1 || oracle.cross_levels().size() != 2) {
        throw std::invalid_argument("two-user spec needs a full-antenna K=2 oracle with 1x2 levels");
    }
    TwoUserBinarySpec s;
    s.S = S;
    s.I_L = I_L;
    s.I_H = I_H;
    s.p = p;
    s.q = q;
    // Levels: S_1, S_2, I_12 (at RRS 1 from UE 2), I_21.
    auto cap = [&](int i1, int i2) {
        const int levels[4] = {0, 0, i1, i2};
        return oracle.ergodic_sum_capacity(0b11u, levels);
    };
    const auto ll = cap(kLow, kLow);
    const auto lh = cap(kLow, kHigh);
    const auto hl = cap(kHigh, kLow);
    const auto hh = cap(kHigh, kHigh);
    s.C_LL = ll.value;
    s.C_LH = lh.value;
    s.C_HL = hl.value;
    s.C_HH = hh.value;
    s.std_error = std::max({ll.std_error, lh.std_error, hl.std_error, hh.std_error});
    s.single_bound = single_user_capacity(S + I_L);
    check_nesting(s, s.C_LL, s.C_LH, ll.std_error, lh.std_error, "C_LL <= C_LH");
    check_nesting(s, s.C_LH, s.C_HH, lh.std_error, hh.std_error, "C_LH <= C_HH");
    return s;
}

TwoUserBinarySpec make_two_user_spec(double S, double I_L, double I_H, double p, double q,
                                     const OracleOptions& options) {
    OracleOptions full = options;
    full.mode = AntennaMode::full;
    const CapacityOracle oracle(2, {S}, {I_L, I_H}, full);
    return make_two_user_spec(S, I_L, I_H, p, q, oracle);
}

TwoUserBinarySpec two_user_spec(const Scenario& scenario) {
    const auto& c = scenario.config();
    if (c.users != 2 || scenario.direct().size() != 1 || scenario.cross().size() != 2) {
        throw std::invalid_argument("closed forms need K=2, N_S=1 and N_I=2");
    }
    if (c.antenna != AntennaMode::full) {
        throw std::invalid_argument("closed forms need the full antenna mode");
    }
    const auto& t = scenario.cross().transition();
    return make_two_user_spec(scenario.direct().level(0), scenario.cross().level(0),
                              scenario.cross().level(1), t(1, 0), t(0, 1), scenario.oracle());
}

Scenario two_user_scenario(const TwoUserBinarySpec& spec, NetworkConfig base,
                           std::shared_ptr<const CapacityOracle> oracle) {
    base.users = 2;
    base.antenna = AntennaMode::full;
    Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
    MarkovChannelSpec direct({spec.S}, one, Eigen::VectorXd::Ones(1), ChannelKind::direct);
    return Scenario(std::move(base), std::move(direct),
                    two_state_chain(spec.I_L, spec.I_H, spec.p, spec.q), std::move(oracle));
}

}  // namespace fogran
