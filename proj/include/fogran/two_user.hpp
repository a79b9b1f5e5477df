// Two users, one direct level and binary cross levels.

#pragma once

#include "fogran/capacity.hpp"
#include "fogran/scenario.hpp"

namespace fogran {

enum Binary : int { kLow = 0, kHigh = 1 };

struct TwoUserBinarySpec {
    double S = 0.0;
    double I_L = 0.0;
    double I_H = 0.0;
    double p = 0.0;  ///< Pr[H | L] per slot
    double q = 0.0;  ///< Pr[L | H] per slot
    double C_LL = 0.0;
    double C_LH = 0.0;
    double C_HL = 0.0;
    double C_HH = 0.0;
    double single_bound = 0.0;  ///< log2(1 + S + I_L)
    double std_error = 0.0;     ///< largest Monte Carlo error among the C_xy

    double pi_L() const { return q / (p + q); }
    double pi_H() const { return p / (p + q); }
    double pi(int x) const { return x == kLow ? pi_L() : pi_H(); }
    /// Pr[cross state `to` at t | state `from` at t - d].
    double beta(int to, int from, int d) const;
};

/// Reads C_xy from a full-antenna oracle over levels {S} and {I_L, I_H}.
/// Throws std::logic_error when C_LL <= C_LH <= C_HH fails by more than
/// two combined standard errors.
TwoUserBinarySpec make_two_user_spec(double S, double I_L, double I_H, double p, double q,
                                     const CapacityOracle& oracle);
TwoUserBinarySpec make_two_user_spec(double S, double I_L, double I_H, double p, double q,
                                     const OracleOptions& options);

/// Requires K = 2, N_S = 1, N_I = 2 and a full-antenna oracle.
TwoUserBinarySpec two_user_spec(const Scenario& scenario);

/// Scenario built on the two-state chains of `spec`.
Scenario two_user_scenario(const TwoUserBinarySpec& spec, NetworkConfig base,
                           std::shared_ptr<const CapacityOracle> oracle = nullptr);

}  // namespace fogran
