#include "fogran/fsmc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fogran {

namespace {

constexpr double kProbTol = 1e-12;
constexpr double kStationaryTol = 1e-10;

void check_column_stochastic(const Eigen::MatrixXd& t) {
    for (Eigen::Index n = 0; n < t.cols(); ++n) {
        for (Eigen::Index m = 0; m < t.rows(); ++m) {
            const double p = t(m, n);
            if (!(p >= -kProbTol && p <= 1.0 + kProbTol)) {
                std::ostringstream os;
                os << "transition probability p(" << m << "," << n << ") = " << p
                   << " outside [0,1]";
                throw std::domain_error(os.str());
            }
        }
        const double sum = t.col(n).sum();
        if (std::abs(sum - 1.0) > kProbTol) {
            std::ostringstream os;
            os << "transition column " << n << " sums to " << sum;
            throw std::domain_error(os.str());
        }
    }
}

// Strong connectivity of the transition graph (edges n -> m with p(m,n) > 0).
bool irreducible(const Eigen::MatrixXd& t) {
    const Eigen::Index n = t.rows();
    auto reach = [&](bool forward) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<Eigen::Index> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const Eigen::Index u = stack.back();
            stack.pop_back();
            for (Eigen::Index v = 0; v < n; ++v) {
                const double p = forward ? t(v, u) : t(u, v);
                if (p > 0.0 && !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    stack.push_back(v);
                }
            }
        }
        for (char s : seen) {
            if (!s) return false;
        }
        return true;
    };
    return reach(true) && reach(false);
}

}  // namespace

MarkovChannelSpec::MarkovChannelSpec(std::vector<double> levels, Eigen::MatrixXd transition,
                                     Eigen::VectorXd stationary, ChannelKind kind)
    : levels_(std::move(levels)),
      transition_(std::move(transition)),
      stationary_(std::move(stationary)),
      kind_(kind) {
    const auto n = static_cast<Eigen::Index>(levels_.size());
    if (n == 0) throw std::invalid_argument("chain needs at least one state");
    if (transition_.rows() != n || transition_.cols() != n || stationary_.size() != n) {
        throw std::invalid_argument("chain dimensions disagree with number of levels");
    }
    for (std::size_t m = 0; m < levels_.size(); ++m) {
        if (!(levels_[m] > 0.0) || (m > 0 && !(levels_[m] > levels_[m - 1]))) {
            throw std::invalid_argument("chain levels must be positive and strictly increasing");
        }
    }
    check_column_stochastic(transition_);
    if (std::abs(stationary_.sum() - 1.0) > kStationaryTol || stationary_.minCoeff() < 0.0) {
        throw std::invalid_argument("stationary law is not a probability vector");
    }
    const Eigen::VectorXd image = transition_ * stationary_;
    if ((image - stationary_).cwiseAbs().maxCoeff() > kStationaryTol) {
        throw std::invalid_argument("stationary law is not a fixed point of the transitions");
    }
}

std::vector<double> equal_probability_thresholds(double avg, int n) {
    if (!(avg > 0.0) || n < 1) throw std::invalid_argument("thresholds need avg > 0 and n >= 1");
    std::vector<double> gamma(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        // exp(-G_m/avg) = 1 - m/n
        gamma[static_cast<std::size_t>(m)] =
            -avg * std::log1p(-static_cast<double>(m) / static_cast<double>(n));
    }
    return gamma;
}

double crossing_rate(double threshold, double avg, double doppler_hz) {
    const double x = threshold / avg;
    return std::sqrt(2.0 * std::numbers::pi * x) * doppler_hz * std::exp(-x);
}

MarkovChannelSpec build_fsmc(const ClarkeParams& params, ChannelKind kind) {
    if (!(params.avg_snr > 0.0) || !(params.velocity > 0.0) || !(params.wavelength > 0.0) ||
        !(params.slot_duration > 0.0) || params.num_states < 1) {
        throw std::invalid_argument(
            "Clarke parameters must be strictly positive with at least one state");
    }
    const int n = params.num_states;
    const double avg = params.avg_snr;
    const std::vector<double> gamma = equal_probability_thresholds(avg, n);

    std::vector<double> levels(static_cast<std::size_t>(n));
    for (int m = 0; m + 1 < n; ++m) {
        levels[static_cast<std::size_t>(m)] =
            0.5 * (gamma[static_cast<std::size_t>(m)] + gamma[static_cast<std::size_t>(m + 1)]);
    }
    levels[static_cast<std::size_t>(n - 1)] = avg + gamma[static_cast<std::size_t>(n - 1)];

    const double doppler = params.velocity / params.wavelength;
    const double pi_state = 1.0 / n;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < n; ++s) {
        double leave = 0.0;
        if (s + 1 < n) {
            const double up = crossing_rate(gamma[static_cast<std::size_t>(s + 1)], avg, doppler) *
                              params.slot_duration / pi_state;
            t(s + 1, s) = up;
            leave += up;
        }
        if (s > 0) {
            const double down = crossing_rate(gamma[static_cast<std::size_t>(s)], avg, doppler) *
                                params.slot_duration / pi_state;
            t(s - 1, s) = down;
            leave += down;
        }
        t(s, s) = 1.0 - leave;
    }
    for (int s = 0; s < n; ++s) {
        for (int m = std::max(0, s - 1); m <= std::min(n - 1, s + 1); ++m) {
            if (t(m, s) < -kProbTol || t(m, s) > 1.0 + kProbTol) {
                std::ostringstream os;
                os << "transition probability p(" << m << "," << s << ") = " << t(m, s)
                   << " outside [0,1]; slot duration or velocity too large";
                throw std::domain_error(os.str());
            }
        }
    }
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, pi_state);
    return MarkovChannelSpec(std::move(levels), std::move(t), std::move(pi), kind);
}

MarkovChannelSpec make_chain(std::vector<double> levels, Eigen::MatrixXd transition,
                             ChannelKind kind) {
    check_column_stochastic(transition);
    Eigen::VectorXd pi = stationary(transition);
    return MarkovChannelSpec(std::move(levels), std::move(transition), std::move(pi), kind);
}

MarkovChannelSpec two_state_chain(double low, double high, double p, double q,
                                  ChannelKind kind) {
    Eigen::MatrixXd t(2, 2);
    t << 1.0 - p, q,
         p, 1.0 - q;
    return make_chain({low, high}, std::move(t), kind);
}

Eigen::MatrixXd d_step(const MarkovChannelSpec& spec, int d) {
    if (d < 0) throw std::invalid_argument("d_step needs d >= 0");
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(spec.size(), spec.size());
    for (int i = 0; i < d; ++i) result = spec.transition() * result;
    return result;
}

Eigen::VectorXd stationary(const Eigen::MatrixXd& transition) {
    const Eigen::Index n = transition.rows();
    if (n == 0 || transition.cols() != n) throw std::invalid_argument("transition must be square");
    if (!irreducible(transition)) {
        throw std::runtime_error("chain is reducible; stationary law is not unique");
    }
    // (T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    Eigen::MatrixXd a = transition - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
    pi = pi.cwiseMax(0.0);
    return pi / pi.sum();
}

Eigen::VectorXd stationary(const MarkovChannelSpec& spec) {
    return stationary(spec.transition());
}

int percentile_state(const Eigen::MatrixXd& d_step_matrix, int from, double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("percentile needs eps in [0,1]");
    const auto n = static_cast<int>(d_step_matrix.rows());
    if (from < 0 || from >= n) throw std::out_of_range("percentile source state out of range");
    int best = 0;
    double below = 0.0;  // Pr[state < x]
    for (int x = 0; x < n; ++x) {
        if (below <= eps + kProbTol) best = x;
        below += d_step_matrix(x, from);
    }
    return best;
}

int percentile_state(const MarkovChannelSpec& spec, int from, int d, double eps) {
    return percentile_state(d_step(spec, d), from, eps);
}

std::vector<int> percentile_table(const Eigen::MatrixXd& d_step_matrix, double eps) {
    std::vector<int> out(static_cast<std::size_t>(d_step_matrix.cols()));
    for (int n = 0; n < static_cast<int>(out.size()); ++n) {
        out[static_cast<std::size_t>(n)] = percentile_state(d_step_matrix, n, eps);
    }
    return out;
}

}  // namespace fogran
