#include "fogran/experiment.hpp"

#include "fogran/outage_region.hpp"
#include "fogran/parallel.hpp"
#include "fogran/policy_cran.hpp"
#include "fogran/policy_dran.hpp"
#include "fogran/policy_fran.hpp"
#include "fogran/two_user.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fogran {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

Scenario OracleCache::scenario(const NetworkConfig& config) {
    Scenario fresh(config);
    std::lock_guard lock(mutex_);
    for (const auto& o : oracles_) {
        if (fresh.oracle_compatible(*o)) return Scenario(config, o);
    }
    oracles_.push_back(fresh.oracle_ptr());
    return fresh;
}

std::vector<std::shared_ptr<const CapacityOracle>> OracleCache::oracles() const {
    std::lock_guard lock(mutex_);
    return oracles_;
}

void OracleCache::add(std::shared_ptr<const CapacityOracle> oracle) {
    std::lock_guard lock(mutex_);
    oracles_.push_back(std::move(oracle));
}

std::string param_name(SweepParam p) {
    switch (p) {
        case SweepParam::dc: return "dc";
        case SweepParam::de: return "de";
        case SweepParam::eps: return "eps";
        case SweepParam::gamma_s: return "gamma_s";
        case SweepParam::gamma_i: return "gamma_i";
        case SweepParam::velocity: return "v";
    }
    return "unknown";
}

SweepParam parse_param(const std::string& name) {
    if (name == "dc" || name == "d_c") return SweepParam::dc;
    if (name == "de" || name == "d_e") return SweepParam::de;
    if (name == "eps" || name == "epsilon") return SweepParam::eps;
    if (name == "gamma_s" || name == "gs") return SweepParam::gamma_s;
    if (name == "gamma_i" || name == "gi") return SweepParam::gamma_i;
    if (name == "v" || name == "velocity") return SweepParam::velocity;
    throw ConfigError("unknown sweep parameter '" + name + "'");
}

NetworkConfig apply_param(NetworkConfig c, SweepParam param, double value) {
    auto integral = [&](const char* what) {
        if (value < 0.0 || value != std::floor(value)) {
            throw std::invalid_argument(std::string(what) + " must be a non-negative integer");
        }
        return static_cast<int>(value);
    };
    switch (param) {
        case SweepParam::dc: c.fronthaul_delay = integral("d_c"); break;
        case SweepParam::de: c.edge_delay = integral("d_e"); break;
        case SweepParam::eps: c.epsilon = value; break;
        case SweepParam::gamma_s: c.direct_snr = db_to_linear(value); break;
        case SweepParam::gamma_i: c.cross_snr = db_to_linear(value); break;
        case SweepParam::velocity: c.velocity = value / 3.6; break;
    }
    c.validate();
    return c;
}

std::vector<SweepRow> evaluate_point(const NetworkConfig& config, double param_value,
                                     OracleCache& cache, bool keep_state_tallies) {
    std::vector<SweepRow> rows;
    std::string scenario_error;
    std::unique_ptr<Scenario> scenario;
    try {
        scenario = std::make_unique<Scenario>(cache.scenario(config));
    } catch (const std::exception& e) {
        scenario_error = e.what();
    }
    for (PolicyKind kind : config.policies) {
        SweepRow row;
        row.param = param_value;
        row.split = kind;
        row.empirical_rate = row.empirical_outage = row.stderr_rate = kNaN;
        try {
            if (!scenario) throw std::runtime_error(scenario_error);
            const auto policy = make_policy(*scenario, kind);
            row.analytic_rate = policy->analytic_sum_rate();
            if (config.simulate) {
                SimOptions opt;
                opt.slots = config.sim_slots;
                opt.seed = config.sim_seed;
                opt.per_state = keep_state_tallies;
                row.sim = run(*scenario, *policy, opt);
                row.empirical_rate = row.sim.credited_rate;
                row.empirical_outage = row.sim.outage_rate;
                row.stderr_rate = row.sim.credited_stderr;
            }
        } catch (const std::exception& e) {
            row.analytic_rate = kNaN;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

SweepResult run_sweep(const SweepSpec& spec, OracleCache& cache, bool keep_state_tallies) {
    if (spec.grid.empty()) throw ConfigError("sweep grid is empty");
    std::vector<std::vector<SweepRow>> per_point(spec.grid.size());
    parallel_for(spec.grid.size(), [&](std::size_t i) {
        const double value = spec.grid[i];
        try {
            const NetworkConfig c = apply_param(spec.base, spec.param, value);
            per_point[i] = evaluate_point(c, value, cache, keep_state_tallies);
        } catch (const std::exception& e) {
            for (PolicyKind kind : spec.base.policies) {
                SweepRow row;
                row.param = value;
                row.split = kind;
                row.analytic_rate = row.empirical_rate = row.empirical_outage = row.stderr_rate = kNaN;
                row.error = e.what();
                per_point[i].push_back(std::move(row));
            }
        }
    });
    SweepResult result;
    result.param = spec.param;
    for (auto& rows : per_point) {
        for (auto& r : rows) result.rows.push_back(std::move(r));
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "param,split,analytic_rate,empirical_rate,empirical_outage,stderr\n";
    for (const auto& r : result.rows) {
        out << fmt(r.param) << ',' << policy_name(r.split) << ',' << fmt(r.analytic_rate) << ','
            << fmt(r.empirical_rate) << ',' << fmt(r.empirical_outage) << ',' << fmt(r.stderr_rate)
            << '\n';
    }
}

void write_gnuplot(std::ostream& out, const std::string& csv_path, const SweepResult& result) {
    std::vector<PolicyKind> splits;
    for (const auto& r : result.rows) {
        if (std::find(splits.begin(), splits.end(), r.split) == splits.end()) splits.push_back(r.split);
    }
    out << "set datafile separator ','\n"
        << "set key top right\n"
        << "set xlabel '" << param_name(result.param) << "'\n"
        << "set ylabel 'adaptive sum-rate [bit/s/Hz]'\n"
        << "set grid\n";
    if (result.param == SweepParam::eps) out << "set logscale x\n";
    out << "plot \\\n";
    for (std::size_t i = 0; i < splits.size(); ++i) {
        const std::string name = policy_name(splits[i]);
        const std::string filter = "(strcol(2) eq '" + name + "' ? $";
        out << "  '" << csv_path << "' every ::1 using 1:" << filter << "3 : NaN) with lines lw 2 lc "
            << i + 1 << " title '" << name << " analytic', \\\n"
            << "  '" << csv_path << "' every ::1 using 1:" << filter << "4 : NaN) with points pt "
            << i + 4 << " lc " << i + 1 << " title '" << name << " simulated'"
            << (i + 1 < splits.size() ? ", \\\n" : "\n");
    }
}

std::vector<std::string> preset_names() {
    return {"fig5", "fig6-eps0", "fig6-eps1e-3", "fig7", "fig9", "fig10"};
}

SweepSpec preset(const std::string& name, NetworkConfig base) {
    base.users = 2;
    base.direct_states = base.cross_states = 15;
    base.direct_snr = db_to_linear(5.0);
    base.cross_snr = db_to_linear(0.0);
    base.velocity = 100.0 / 3.6;
    base.antenna = AntennaMode::full;
    SweepSpec s;
    if (name == "fig5") {
        s.param = SweepParam::dc;
        base.edge_delay = 2;
        base.epsilon = 0.0;
        for (int d = 0; d <= 8; ++d) s.grid.push_back(d);
    } else if (name == "fig6-eps0" || name == "fig6-eps1e-3") {
        s.param = SweepParam::de;
        base.fronthaul_delay = 3;
        base.epsilon = name == "fig6-eps0" ? 0.0 : 1e-3;
        for (int d = 1; d <= 8; ++d) s.grid.push_back(d);
    } else if (name == "fig7") {
        s.param = SweepParam::eps;
        base.edge_delay = 2;
        base.fronthaul_delay = 5;
        s.grid = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 5e-2, 1e-1, 2e-1};
    } else if (name == "fig9") {
        s.param = SweepParam::gamma_s;
        base.edge_delay = 2;
        base.fronthaul_delay = 3;
        base.epsilon = 1e-3;
        for (int i = 0; i <= 6; ++i) s.grid.push_back(2.5 * i);
    } else if (name == "fig10") {
        s.param = SweepParam::gamma_i;
        base.edge_delay = 2;
        base.fronthaul_delay = 3;
        base.epsilon = 1e-2;
        for (int i = -4; i <= 4; ++i) s.grid.push_back(2.5 * i);
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    s.base = base;
    return s;
}

NetworkConfig region_map_defaults(NetworkConfig base) {
    base.users = 2;
    base.edge_delay = 3;
    base.direct_states = base.cross_states = 12;
    base.epsilon = 0.01;
    base.direct_snr = db_to_linear(5.0);
    base.cross_snr = db_to_linear(0.0);
    base.antenna = AntennaMode::full;
    return base;
}

std::vector<int> region_map_dc_grid() {
    std::vector<int> g;
    for (int d = 0; d < 10; ++d) g.push_back(d);
    return g;
}

std::vector<double> region_map_velocity_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 10; ++i) g.push_back(10.0 * i);
    return g;
}

std::vector<RegionCell> region_map(const NetworkConfig& base, const std::vector<int>& dcs,
                                   const std::vector<double>& velocities_kmh, OracleCache& cache) {
    if (dcs.empty() || velocities_kmh.empty()) throw ConfigError("region map grid is empty");
    std::vector<RegionCell> cells(dcs.size() * velocities_kmh.size());
    // F-RAN does not depend on d_c: one LP per velocity.
    std::vector<double> fran(velocities_kmh.size());
    parallel_for(velocities_kmh.size(), [&](std::size_t iv) {
        const NetworkConfig c = apply_param(base, SweepParam::velocity, velocities_kmh[iv]);
        const Scenario s = cache.scenario(c);
        fran[iv] = FranLpPolicy(s, c.edge_delay, c.epsilon).sum_rate();
    });
    parallel_for(cells.size(), [&](std::size_t i) {
        const std::size_t id = i / velocities_kmh.size();
        const std::size_t iv = i % velocities_kmh.size();
        NetworkConfig c = apply_param(base, SweepParam::velocity, velocities_kmh[iv]);
        c = apply_param(c, SweepParam::dc, dcs[id]);
        const Scenario s = cache.scenario(c);
        RegionCell& cell = cells[i];
        cell.dc = dcs[id];
        cell.velocity_kmh = velocities_kmh[iv];
        cell.cran = CranLpPolicy(s, c.cran_delay(), c.epsilon).sum_rate();
        cell.fran = fran[iv];
        cell.winner = cell.cran >= cell.fran ? PolicyKind::cran_lp : PolicyKind::fran_lp;
        cell.margin = std::abs(cell.cran - cell.fran);
    });
    return cells;
}

void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells) {
    out << "dc,v,winner,margin\n";
    for (const auto& c : cells) {
        out << c.dc << ',' << fmt(c.velocity_kmh) << ',' << policy_name(c.winner) << ','
            << fmt(c.margin) << '\n';
    }
}

PerStateOutage per_state_outage(const SimResult& sim, double eps) {
    PerStateOutage r;
    double var = 0.0;
    for (std::size_t g = 0; g < sim.state_visits.size(); ++g) {
        const std::uint32_t n = sim.state_visits[g];
        if (n == 0) continue;
        ++r.states;
        const double limit = eps + 3.0 * binomial_sigma(eps, n);
        if (static_cast<double>(sim.state_outages[g]) > limit * n) ++r.exceed;
        if (eps <= 0.0 || eps >= 1.0) continue;
        // Pr[Bin(n, eps) > limit * n]
        const double k = std::floor(limit * n);
        const boost::math::binomial_distribution<double> dist(n, eps);
        const double q = k >= n ? 0.0 : boost::math::cdf(boost::math::complement(dist, k));
        r.expected += q;
        var += q * (1.0 - q);
    }
    r.allowed = r.expected + 3.0 * std::sqrt(var);
    r.pass = static_cast<double>(r.exceed) <= r.allowed;
    return r;
}

namespace {

std::string str(double v) {
    std::ostringstream os;
    os.precision(8);
    os << v;
    return os.str();
}

bool closed_forms_apply(const Scenario& s) {
    const auto& c = s.config();
    return c.users == 2 && s.direct().size() == 1 && s.cross().size() == 2 &&
           c.antenna == AntennaMode::full;
}

}  // namespace

std::vector<Check> validate(const NetworkConfig& config, OracleCache& cache) {
    std::vector<Check> checks;
    const Scenario s = cache.scenario(config);
    std::vector<PolicyKind> kinds = config.policies;
    if (closed_forms_apply(s)) {
        for (PolicyKind k : {PolicyKind::cran_closed, PolicyKind::fran_closed}) {
            if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
        }
    }
    const double eps = config.epsilon;
    for (PolicyKind kind : kinds) {
        const std::string name = policy_name(kind);
        std::unique_ptr<RatePolicy> policy;
        try {
            policy = make_policy(s, kind);
        } catch (const std::exception& e) {
            checks.push_back({name + " policy", false, e.what()});
            continue;
        }
        SimOptions opt;
        opt.slots = config.sim_slots;
        opt.seed = config.sim_seed;
        const SimResult sim = run(s, *policy, opt);

        const double limit = eps + 3.0 * binomial_sigma(eps, sim.slots);
        checks.push_back({name + " outage within budget", sim.outage_rate <= limit,
                          "empirical " + str(sim.outage_rate) + " (" + std::to_string(sim.outages) +
                              " slots), limit " + str(limit)});
        const PerStateOutage ps = per_state_outage(sim, eps);
        checks.push_back({name + " per-state outage", ps.pass,
                          std::to_string(ps.exceed) + " of " + std::to_string(ps.states) +
                              " delayed states above eps + 3 sigma, allowed " + str(ps.allowed)});
        const double gap = sim.credited_rate - policy->analytic_sum_rate();
        const bool agree = std::abs(gap) <= 3.0 * sim.credited_stderr + 1e-9;
        checks.push_back({name + " rate agreement", agree,
                          "analytic " + str(policy->analytic_sum_rate()) + ", empirical " +
                              str(sim.credited_rate) + " +- " + str(sim.credited_stderr)});
        if (kind == PolicyKind::dran && config.users >= 2) {
            Check c{name + " outage independence", true,
                    "chi-square(1) = " + str(sim.user_outage_chi2), true};
            checks.push_back(c);
        }
    }

    if (closed_forms_apply(s)) {
        const TwoUserBinarySpec spec = two_user_spec(s);
        const double tol = 1e-6 + spec.std_error;
        const int d = config.cran_delay();
        const double c_closed = cran_two_user_sum_rate(spec, d, eps);
        const double c_lp = CranLpPolicy(s, d, eps).sum_rate();
        const bool c_regime = (eps == 0.0 && d >= 1) || (d == 0 && eps > 0.0 && eps < 1.0);
        checks.push_back({"cran closed form equals LP", std::abs(c_closed - c_lp) <= tol,
                          "closed " + str(c_closed) + ", LP " + str(c_lp), !c_regime});
        const int de = config.edge_delay;
        const double f_closed = fran_two_user_sum_rate(spec, de, eps);
        const double f_lp = FranLpPolicy(s, de, eps).sum_rate();
        const FranTwoUserRates base = fran_two_user_base_rates(spec);
        const bool f_regime = fran_base_rates_feasible(spec, base) &&
                              ((de == 0 && eps > 0.0 && eps < 1.0) || (eps == 0.0 && de >= 1 && base.rule != 3));
        checks.push_back({"fran closed form equals LP", std::abs(f_closed - f_lp) <= tol,
                          "closed " + str(f_closed) + ", LP " + str(f_lp), !f_regime});
        if (eps == 0.0 && d >= 1) {
            checks.push_back({"cran zero-outage rate equals C_LL", c_closed == spec.C_LL,
                              "R = " + str(c_closed) + ", C_LL = " + str(spec.C_LL)});
        }
        if (d == 0 && eps > 0.0 && eps < 1.0) {
            const double pl = spec.pi_L(), ph = spec.pi_H();
            const double mix = pl * pl * spec.C_LL + 2 * pl * ph * spec.C_LH + ph * ph * spec.C_HH;
            checks.push_back({"cran undelayed rate", std::abs(c_closed - mix) <= 1e-9,
                              "R = " + str(c_closed) + ", stationary mix " + str(mix)});
        }
    }
    return checks;
}

}  // namespace fogran
