#include "fogran/policy_dran.hpp"

#include "fogran/outage_region.hpp"
#include "fogran/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace fogran {

double instantaneous_rate(double direct, std::span<const double> interference) {
    double noise = 1.0;
    for (double i : interference) noise += i;
    return std::log2(1.0 + direct / noise);
}

DranCdfTable::DranCdfTable(int users, int direct_states, int cross_states, int delay,
                           std::vector<std::vector<RateAtom>> atoms)
    : users_(users),
      direct_states_(direct_states),
      cross_states_(cross_states),
      delay_(delay),
      atoms_(std::move(atoms)) {
    for (const auto& list : atoms_) {
        if (list.empty()) throw std::invalid_argument("empty conditional rate distribution");
        for (std::size_t k = 1; k < list.size(); ++k) {
            if (!(list[k].rate > list[k - 1].rate) ||
                list[k].cumulative < list[k - 1].cumulative) {
                throw std::invalid_argument("rate atoms must be sorted with non-decreasing mass");
            }
        }
        if (std::abs(list.back().cumulative - 1.0) > 1e-10) {
            throw std::invalid_argument("conditional rate distribution does not sum to one");
        }
    }
}

namespace {

struct Support {
    std::vector<int> state;
    std::vector<double> prob;
};

std::vector<Support> supports(const Eigen::MatrixXd& step) {
    std::vector<Support> out(static_cast<std::size_t>(step.cols()));
    for (Eigen::Index from = 0; from < step.cols(); ++from) {
        auto& s = out[static_cast<std::size_t>(from)];
        for (Eigen::Index to = 0; to < step.rows(); ++to) {
            if (step(to, from) > 0.0) {
                s.state.push_back(static_cast<int>(to));
                s.prob.push_back(step(to, from));
            }
        }
    }
    return out;
}

}  // namespace

DranCdfTable build_cdf(const MarkovChannelSpec& direct, const MarkovChannelSpec& cross, int delay,
                       int users, std::uint64_t cap) {
    if (delay < 0) throw std::invalid_argument("edge delay must be >= 0");
    if (users < 1) throw std::invalid_argument("K must be positive");
    const StateSpace space(users, direct.size(), cross.size());
    const std::uint64_t combos = space.local_count();
    if (combos > cap) {
        std::ostringstream os;
        os << "interference-as-noise CDF needs " << combos << " local states, above the cap of "
           << cap;
        throw std::length_error(os.str());
    }
    const auto s_support = supports(d_step(direct, delay));
    const auto i_support = supports(d_step(cross, delay));

    std::vector<std::vector<RateAtom>> table(static_cast<std::size_t>(combos));
    const auto n_int = static_cast<std::size_t>(users - 1);
    parallel_for(static_cast<std::size_t>(combos), [&](std::size_t c) {
        std::vector<int> combo(static_cast<std::size_t>(users));
        space.decode_local(c, combo);
        const Support& ss = s_support[static_cast<std::size_t>(combo[0])];
        std::vector<const Support*> is(n_int);
        for (std::size_t k = 0; k < n_int; ++k) {
            is[k] = &i_support[static_cast<std::size_t>(combo[k + 1])];
        }

        std::vector<std::pair<double, double>> mass;
        std::vector<std::size_t> pos(n_int, 0);
        std::vector<double> gains(n_int);
        for (;;) {
            double prob_i = 1.0;
            for (std::size_t k = 0; k < n_int; ++k) {
                gains[k] = cross.level(is[k]->state[pos[k]]);
                prob_i *= is[k]->prob[pos[k]];
            }
            for (std::size_t a = 0; a < ss.state.size(); ++a) {
                mass.emplace_back(instantaneous_rate(direct.level(ss.state[a]), gains),
                                  ss.prob[a] * prob_i);
            }
            std::size_t k = 0;
            for (; k < n_int; ++k) {
                if (++pos[k] < is[k]->state.size()) break;
                pos[k] = 0;
            }
            if (k == n_int) break;
        }

        std::sort(mass.begin(), mass.end());
        std::vector<RateAtom> atoms;
        double total = 0.0;
        for (const auto& [rate, p] : mass) {
            total += p;
            if (!atoms.empty() && rate == atoms.back().rate) {
                atoms.back().cumulative = total;
            } else {
                atoms.push_back({rate, total});
            }
        }
        for (auto& a : atoms) a.cumulative /= total;
        atoms.back().cumulative = 1.0;
        table[c] = std::move(atoms);
    });
    return DranCdfTable(users, direct.size(), cross.size(), delay, std::move(table));
}

double dran_rate(const DranCdfTable& table, std::uint64_t combo, double eps_bar) {
    if (!(eps_bar >= 0.0 && eps_bar <= 1.0)) throw std::invalid_argument("eps_bar must lie in [0,1]");
    const auto& atoms = table.atoms(combo);
    double chosen = atoms.front().rate;
    double below = 0.0;  // Pr[C < atom]
    for (const auto& a : atoms) {
        if (below > eps_bar + 1e-12) break;
        chosen = a.rate;
        below = a.cumulative;
    }
    return chosen;
}

DranResult dran_sum_rate(const Scenario& scenario, int edge_delay, double eps) {
    const int users = scenario.config().users;
    const DranCdfTable table = build_cdf(scenario.direct(), scenario.cross(), edge_delay, users);
    DranResult r;
    r.eps_bar = eps_bar_for(Split::dran, users, eps);
    double per_user = 0.0;
    for (std::uint64_t c = 0; c < table.combos(); ++c) {
        per_user += scenario.local_weight(c) * dran_rate(table, c, r.eps_bar);
    }
    // Users see identically distributed local combos.
    r.per_user.assign(static_cast<std::size_t>(users), per_user);
    r.sum_rate = per_user * users;
    return r;
}

DranResult dran_sum_rate(const Scenario& scenario) {
    return dran_sum_rate(scenario, scenario.config().edge_delay, scenario.config().epsilon);
}

}  // namespace fogran
