#include "fogran/policy_fran.hpp"

#include "fogran/capacity.hpp"
#include "fogran/outage_region.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fogran {

FranTwoUserRates fran_two_user_base_rates(const TwoUserBinarySpec& s) {
    const double single = s.single_bound;
    if (s.C_LH > s.C_LL / 2.0 + single) return {s.C_LL / 2.0, single, 1};
    const double pl = s.pi_L();
    const double ph = s.pi_H();
    if (pl * pl > ph * ph) return {s.C_LL / 2.0, s.C_LH - s.C_LL / 2.0, 2};
    return {s.C_LH - single, single, 3};
}

bool fran_base_rates_feasible(const TwoUserBinarySpec& s, const FranTwoUserRates& base) {
    return 2.0 * base.R_H <= s.C_HH + 1e-12;
}

double fran_base_objective(const TwoUserBinarySpec& s, double r_low) {
    const double pl = s.pi_L();
    const double ph = s.pi_H();
    return 2.0 * (pl * pl + pl * ph) * r_low +
           2.0 * (pl * ph + ph * ph) * std::min(s.C_LH - r_low, s.single_bound);
}

double fran_two_user_rate(const TwoUserBinarySpec& s, const FranTwoUserRates& base,
                          int edge_delay, double eps_bar, int x) {
    return eps_bar <= s.beta(kLow, x, edge_delay) ? base.R_L : base.R_H;
}

double fran_two_user_sum_rate(const TwoUserBinarySpec& s, int edge_delay, double eps) {
    const FranTwoUserRates base = fran_two_user_base_rates(s);
    const double eps_bar = eps_bar_for(Split::fran, 2, eps);
    const double r_l = fran_two_user_rate(s, base, edge_delay, eps_bar, kLow);
    const double r_h = fran_two_user_rate(s, base, edge_delay, eps_bar, kHigh);
    return 2.0 * s.pi_L() * r_l + 2.0 * s.pi_H() * r_h;
}

double fran_eps_bar(FranBudget budget, int users, double eps) {
    return budget == FranBudget::per_user ? eps_bar_for(Split::fran, users, eps)
                                          : eps_bar_for(Split::cran, users, eps);
}

namespace {

struct Constraint {
    std::uint32_t mask;
    std::vector<std::uint64_t> combos;  // one per user in mask, ascending user
    double bound;
};

/// Every (subset, local combos) constraint, tightest bound kept per key.
/// With `deduplicate == false` every state contributes its own rows.
std::vector<Constraint> enumerate_constraints(const Scenario& scenario, int edge_delay,
                                              double eps_bar, bool deduplicate,
                                              std::size_t& raw) {
    const StateSpace& space = scenario.space();
    const int k = space.users();
    const std::uint64_t count = space.global_count();
    const std::uint64_t combos = space.local_count();
    const std::uint64_t subsets = (1u << k) - 1u;
    if (count > kJointEnumerationCap) {
        std::ostringstream os;
        os << "joint state space has " << count << " states; too large for the coupled LP";
        throw std::length_error(os.str());
    }
    const int bits = std::max(1, static_cast<int>(std::bit_width(combos - 1)));
    if (k * bits + k > 64) throw std::length_error("local combo space too large to index");

    const PercentileMap map =
        percentile_map(scenario.direct(), scenario.cross(), edge_delay, eps_bar);
    const auto procs = static_cast<std::size_t>(space.processes());
    std::vector<int> levels(procs), surrogate(procs);
    std::vector<std::uint64_t> local(static_cast<std::size_t>(k));

    std::vector<Constraint> out;
    std::unordered_map<std::uint64_t, std::size_t> index;
    raw = 0;
    for (std::uint64_t g = 0; g < count; ++g) {
        space.decode(g, levels);
        percentile_levels(space, map, levels, surrogate);
        for (int j = 0; j < k; ++j) local[static_cast<std::size_t>(j)] = space.local_index(j, levels);
        for (std::uint32_t mask = 1; mask <= subsets; ++mask) {
            ++raw;
            const double bound =
                std::max(0.0, scenario.oracle().ergodic_sum_capacity(mask, surrogate).value);
            std::uint64_t key = mask;
            std::vector<std::uint64_t> members;
            for (int j = 0; j < k; ++j) {
                if (!(mask & (1u << j))) continue;
                members.push_back(local[static_cast<std::size_t>(j)]);
                key = (key << bits) | local[static_cast<std::size_t>(j)];
            }
            if (!deduplicate) {
                out.push_back({mask, std::move(members), bound});
                continue;
            }
            auto [it, fresh] = index.try_emplace(key, out.size());
            if (fresh) {
                if (out.size() >= kFranConstraintCap) {
                    std::ostringstream os;
                    os << "coupled LP exceeds " << kFranConstraintCap << " distinct constraints";
                    throw std::length_error(os.str());
                }
                out.push_back({mask, std::move(members), bound});
            } else {
                auto& c = out[it->second];
                c.bound = std::min(c.bound, bound);
            }
        }
    }
    return out;
}

void row_entries(const Constraint& c, std::uint64_t combos, std::vector<int>& idx) {
    idx.clear();
    std::size_t m = 0;
    for (int j = 0; j < 32; ++j) {
        if (!(c.mask & (1u << j))) continue;
        idx.push_back(static_cast<int>(static_cast<std::uint64_t>(j) * combos + c.combos[m++]));
    }
}

}  // namespace

lp::LinearProgram build_fran_lp(const Scenario& scenario, int edge_delay, double eps,
                                bool deduplicate) {
    const auto& cfg = scenario.config();
    const double eps_bar = fran_eps_bar(cfg.fran_budget, cfg.users, eps);
    std::size_t raw = 0;
    const auto constraints = enumerate_constraints(scenario, edge_delay, eps_bar, deduplicate, raw);
    const std::uint64_t combos = scenario.space().local_count();
    const std::size_t n = static_cast<std::size_t>(combos) * static_cast<std::size_t>(cfg.users);
    lp::LinearProgram prog;
    prog.objective.resize(n);
    for (std::size_t v = 0; v < n; ++v) prog.objective[v] = scenario.local_weight(v % combos);
    std::vector<int> idx;
    for (const auto& c : constraints) {
        row_entries(c, combos, idx);
        std::vector<double> row(n, 0.0);
        for (int i : idx) row[static_cast<std::size_t>(i)] += 1.0;
        prog.rows.push_back(std::move(row));
        prog.rhs.push_back(c.bound);
    }
    return prog;
}

FranLpPolicy::FranLpPolicy(const Scenario& scenario, int edge_delay, double eps)
    : users_(scenario.config().users),
      delay_(edge_delay),
      eps_bar_(fran_eps_bar(scenario.config().fran_budget, scenario.config().users, eps)),
      combos_(scenario.space().local_count()) {
    if (edge_delay < 0) throw std::invalid_argument("edge delay must be >= 0");
    std::size_t raw = 0;
    const auto constraints = enumerate_constraints(scenario, edge_delay, eps_bar_, true, raw);
    const std::size_t n = static_cast<std::size_t>(combos_) * static_cast<std::size_t>(users_);
    stats_.variables = n;
    stats_.raw_constraints = raw;
    stats_.unique_constraints = constraints.size();

    std::vector<double> objective(n);
    for (std::size_t v = 0; v < n; ++v) objective[v] = scenario.local_weight(v % combos_);
    lp::IncrementalSimplex simplex(objective);

    std::vector<char> added(constraints.size(), 0);
    std::vector<int> idx;
    std::vector<double> ones;
    auto add = [&](std::size_t i) {
        row_entries(constraints[i], combos_, idx);
        ones.assign(idx.size(), 1.0);
        simplex.add_sparse_row(idx, ones, constraints[i].bound);
        added[i] = 1;
    };
    // Individual bounds cap every variable, so the first LP is bounded.
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        if (std::popcount(constraints[i].mask) == 1) add(i);
    }

    const std::size_t batch = std::max<std::size_t>(64, n);
    lp::Solution sol;
    for (;;) {
        sol = simplex.solve();
        ++stats_.rounds;
        std::vector<std::pair<double, std::size_t>> violated;
        for (std::size_t i = 0; i < constraints.size(); ++i) {
            if (added[i]) continue;
            row_entries(constraints[i], combos_, idx);
            double lhs = 0.0;
            for (int v : idx) lhs += sol.x[static_cast<std::size_t>(v)];
            const double excess = lhs - constraints[i].bound;
            if (excess > 1e-10 * std::max(1.0, constraints[i].bound)) {
                violated.emplace_back(-excess, i);
            }
        }
        if (violated.empty()) break;
        const std::size_t take = std::min(batch, violated.size());
        std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(take),
                          violated.end());
        for (std::size_t t = 0; t < take; ++t) add(violated[t].second);
    }
    stats_.active_rows = simplex.rows();
    stats_.pivots = sol.pivots;
    rates_ = sol.x;
    sum_rate_ = sol.value;
}

double fran_lp_sum_rate(const Scenario& scenario) {
    return FranLpPolicy(scenario, scenario.config().edge_delay, scenario.config().epsilon)
        .sum_rate();
}

}  // namespace fogran
