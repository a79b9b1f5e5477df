// Finite-state Markov model of a quantized Rayleigh fading power process.

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace fogran {

enum class ChannelKind { direct, cross };

/// Clarke-model inputs for one power process. All values linear / SI.
struct ClarkeParams {
    double avg_snr = 1.0;
    double velocity = 0.0;      ///< m/s
    double wavelength = 0.3;    ///< m
    double slot_duration = 1e-4;///< s
    int num_states = 1;
};

/// Quantized power process with tridiagonal (or general) transitions.
///
/// `transition()(m, n)` is Pr[state m at t+1 | state n at t], so every
/// column sums to one. Instances are immutable after construction.
class MarkovChannelSpec {
public:
    MarkovChannelSpec(std::vector<double> levels, Eigen::MatrixXd transition,
                      Eigen::VectorXd stationary, ChannelKind kind);

    int size() const { return static_cast<int>(levels_.size()); }
    double level(int m) const { return levels_[static_cast<std::size_t>(m)]; }
    const std::vector<double>& levels() const { return levels_; }
    const Eigen::MatrixXd& transition() const { return transition_; }
    const Eigen::VectorXd& stationary_law() const { return stationary_; }
    ChannelKind kind() const { return kind_; }

private:
    std::vector<double> levels_;
    Eigen::MatrixXd transition_;
    Eigen::VectorXd stationary_;
    ChannelKind kind_;
};

/// Thresholds Gamma_1..Gamma_N (Gamma_1 = 0) splitting an exponential
/// power law with mean `avg` into N equal-probability cells. The upper
/// edge of the last cell is +inf and is not returned.
std::vector<double> equal_probability_thresholds(double avg, int n);

/// Level crossing rate of a Rayleigh power process at `threshold`.
double crossing_rate(double threshold, double avg, double doppler_hz);

/// Equal-probability quantization of Clarke's model.
///
/// Each level is the midpoint of its cell; the open top cell uses the
/// conditional mean `avg + Gamma_N`. Throws std::domain_error naming the
/// offending entry when the slot is too long for the crossing rates.
MarkovChannelSpec build_fsmc(const ClarkeParams& params,
                             ChannelKind kind = ChannelKind::direct);

/// Chain from an explicit transition matrix; the stationary law is solved.
MarkovChannelSpec make_chain(std::vector<double> levels, Eigen::MatrixXd transition,
                             ChannelKind kind);

/// Two-level chain with p = Pr[high | low] and q = Pr[low | high].
MarkovChannelSpec two_state_chain(double low, double high, double p, double q,
                                  ChannelKind kind = ChannelKind::cross);

/// d-step transition matrix T^d; entry (m, n) = Pr[state m at t | state n at t-d].
Eigen::MatrixXd d_step(const MarkovChannelSpec& spec, int d);

/// Unique stationary law of an irreducible column-stochastic matrix.
/// Throws std::runtime_error if the chain is reducible.
Eigen::VectorXd stationary(const Eigen::MatrixXd& transition);
Eigen::VectorXd stationary(const MarkovChannelSpec& spec);

/// Largest state x such that Pr[state(t) < x | state(t-d) = from] <= eps,
/// read off column `from` of a d-step matrix. The lowest state carrying
/// positive mass always qualifies, so eps = 0 returns the lowest
/// reachable state and eps = 1 the highest state.
int percentile_state(const Eigen::MatrixXd& d_step_matrix, int from, double eps);
int percentile_state(const MarkovChannelSpec& spec, int from, int d, double eps);

/// percentile_state for every starting state.
std::vector<int> percentile_table(const Eigen::MatrixXd& d_step_matrix, double eps);

}  // namespace fogran
