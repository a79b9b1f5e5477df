// fogran: command-line front end for evaluating functional splits.

#include "fogran/config.hpp"
#include "fogran/experiment.hpp"
#include "fogran/parallel.hpp"
#include "fogran/scenario.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

using namespace fogran;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;

/// Flags that override the configuration file.
struct Overrides {
    std::string config_file;
    std::optional<int> users, de, dc, states, direct_states, cross_states;
    std::optional<double> eps, gamma_s, gamma_i, velocity, carrier, slot;
    std::optional<std::string> splits, antenna, budget;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> mc_seed, seed, slots;
    bool no_sim = false;
    std::optional<std::string> cache_file;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("-c,--config", o.config_file, "INI configuration file")->check(CLI::ExistingFile);
    app->add_option("-K,--users", o.users, "number of users");
    app->add_option("--de", o.de, "edge scheduling delay d_e [slots]");
    app->add_option("--dc", o.dc, "fronthaul delay d_c [slots]");
    app->add_option("--eps", o.eps, "outage budget");
    app->add_option("--gamma-s", o.gamma_s, "direct average SNR [dB]");
    app->add_option("--gamma-i", o.gamma_i, "cross average SNR [dB]");
    app->add_option("-v,--velocity", o.velocity, "mobile velocity [km/h]");
    app->add_option("--carrier", o.carrier, "carrier frequency [Hz]");
    app->add_option("--slot", o.slot, "slot duration [s]");
    app->add_option("-N,--states", o.states, "channel states for direct and cross links");
    app->add_option("--direct-states", o.direct_states, "direct channel states");
    app->add_option("--cross-states", o.cross_states, "cross channel states");
    app->add_option("--splits", o.splits, "comma list of dran,cran,fran,cran-closed,fran-closed");
    app->add_option("--antenna", o.antenna, "restricted | full");
    app->add_option("--budget", o.budget, "F-RAN budget split: 1/K | 1/K^2");
    app->add_option("--samples", o.samples, "Monte Carlo samples per capacity estimate");
    app->add_option("--mc-seed", o.mc_seed, "capacity Monte Carlo seed");
    app->add_option("--slots", o.slots, "simulated slots");
    app->add_flag("--no-sim", o.no_sim, "analytic values only");
    app->add_option("--cache", o.cache_file, "capacity cache file");
}

void add_seed(CLI::App* app, Overrides& o, bool required) {
    auto* opt = app->add_option("--seed", o.seed, "simulation seed");
    if (required) opt->required();
}

NetworkConfig load_base(const Overrides& o, RunSettings& settings) {
    NetworkConfig c;
    if (!o.config_file.empty()) read_config_file(o.config_file, c, settings);
    return c;
}

NetworkConfig apply_overrides(NetworkConfig c, const Overrides& o, RunSettings& settings) {
    if (o.users) c.users = *o.users;
    if (o.de) c.edge_delay = *o.de;
    if (o.dc) c.fronthaul_delay = *o.dc;
    if (o.eps) c.epsilon = *o.eps;
    if (o.gamma_s) c.direct_snr = db_to_linear(*o.gamma_s);
    if (o.gamma_i) c.cross_snr = db_to_linear(*o.gamma_i);
    if (o.velocity) c.velocity = *o.velocity / 3.6;
    if (o.carrier) c.wavelength = kSpeedOfLight / *o.carrier;
    if (o.slot) c.slot_duration = *o.slot;
    if (o.states) c.direct_states = c.cross_states = *o.states;
    if (o.direct_states) c.direct_states = *o.direct_states;
    if (o.cross_states) c.cross_states = *o.cross_states;
    if (o.splits) c.policies = parse_policy_list(*o.splits);
    if (o.antenna) c.antenna = parse_antenna(*o.antenna);
    if (o.budget) c.fran_budget = parse_budget(*o.budget);
    if (o.samples) c.mc_samples = *o.samples;
    if (o.mc_seed) c.seed = *o.mc_seed;
    if (o.seed) c.sim_seed = *o.seed;
    if (o.slots) c.sim_slots = *o.slots;
    if (o.no_sim) c.simulate = false;
    if (o.cache_file) settings.cache_file = *o.cache_file;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

/// Loads the cache file into an oracle for `config`, if the file matches.
void preload_cache(const NetworkConfig& config, const RunSettings& settings, OracleCache& cache) {
    if (settings.cache_file.empty()) return;
    std::ifstream in(settings.cache_file);
    if (!in) return;
    const Scenario s(config);
    OracleOptions opt;
    opt.samples = config.mc_samples;
    opt.seed = config.seed;
    opt.mode = config.antenna;
    auto oracle = std::make_shared<CapacityOracle>(config.users, s.direct().levels(),
                                                   s.cross().levels(), opt);
    try {
        const std::size_t n = oracle->load(in);
        cache.add(oracle);
        std::cerr << "loaded " << n << " capacity records from " << settings.cache_file << '\n';
    } catch (const std::exception& e) {
        std::cerr << "ignoring capacity cache " << settings.cache_file << ": " << e.what() << '\n';
    }
}

void store_cache(const NetworkConfig& config, const RunSettings& settings, OracleCache& cache) {
    if (settings.cache_file.empty()) return;
    const Scenario probe(config, nullptr);
    for (const auto& o : cache.oracles()) {
        if (!probe.oracle_compatible(*o)) continue;
        std::ofstream out(settings.cache_file);
        if (!out) throw std::runtime_error("cannot write " + settings.cache_file);
        o->save(out);
        std::cerr << "saved " << o->cache_size() << " capacity records to " << settings.cache_file << '\n';
        return;
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad grid value '" + tok + "'");
        }
        if (used != tok.size()) throw ConfigError("bad grid value '" + tok + "'");
        v.push_back(x);
    }
    if (v.empty()) throw ConfigError("grid is empty");
    return v;
}

/// Opens `path` for writing, or returns std::cout for "" and "-".
std::ostream& output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

void report_errors(const SweepResult& r) {
    for (const auto& row : r.rows) {
        if (!row.error.empty()) {
            std::cerr << param_name(r.param) << '=' << row.param << ' ' << policy_name(row.split)
                      << ": " << row.error << '\n';
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outage-constrained sum-rate of D-RAN, C-RAN and F-RAN splits"};
    app.require_subcommand(1);
    app.add_option("-j,--threads", [](const CLI::results_t& r) {
        set_worker_count(static_cast<unsigned>(std::stoul(r.at(0))));
        return true;
    }, "worker threads (default: hardware concurrency)");

    Overrides eval_o, sweep_o, map_o, val_o, cache_o;
    std::string out_path = "-", gnuplot_path, preset_name, param, grid_text, dc_grid, v_grid,
                trace_path;

    auto* eval = app.add_subcommand("eval", "analytic and simulated rates at one point");
    add_common(eval, eval_o);
    add_seed(eval, eval_o, false);
    eval->add_option("-o,--out", out_path, "CSV output (default stdout)");
    eval->add_option("--trace", trace_path, "per-slot trace of the first split");

    auto* sweep = app.add_subcommand("sweep", "sweep one parameter");
    add_common(sweep, sweep_o);
    add_seed(sweep, sweep_o, false);
    sweep->add_option("--preset", preset_name, "fig5 | fig6-eps0 | fig6-eps1e-3 | fig7 | fig9 | fig10");
    sweep->add_option("--param", param, "dc | de | eps | gamma_s | gamma_i | v");
    sweep->add_option("--grid", grid_text, "comma-separated values");
    sweep->add_option("-o,--out", out_path, "CSV output (default stdout)");
    sweep->add_option("--gnuplot", gnuplot_path, "write a gnuplot script for the CSV");

    auto* map = app.add_subcommand("region-map", "C-RAN vs F-RAN over (d_c, v)");
    add_common(map, map_o);
    map->add_option("--dc-grid", dc_grid, "comma-separated d_c values");
    map->add_option("--v-grid", v_grid, "comma-separated velocities [km/h]");
    map->add_option("-o,--out", out_path, "CSV output (default stdout)");

    auto* val = app.add_subcommand("validate", "simulate every split and check 3 sigma bounds");
    add_common(val, val_o);
    add_seed(val, val_o, true);

    auto* cache_cmd = app.add_subcommand("cache", "capacity cache management");
    cache_cmd->require_subcommand(1);
    auto* cache_build = cache_cmd->add_subcommand("build", "estimate every joint state and save");
    add_common(cache_build, cache_o);
    auto* cache_show = cache_cmd->add_subcommand("show", "print the header of a cache file");
    std::string show_path;
    cache_show->add_option("file", show_path, "cache file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        OracleCache oracles;
        if (*eval) {
            RunSettings settings;
            const NetworkConfig c = apply_overrides(load_base(eval_o, settings), eval_o, settings);
            preload_cache(c, settings, oracles);
            SweepResult r;
            r.param = SweepParam::dc;
            r.rows = evaluate_point(c, c.fronthaul_delay, oracles);
            std::ofstream file;
            write_sweep_csv(output(out_path, file), r);
            report_errors(r);
            if (!trace_path.empty()) {
                std::ofstream trace(trace_path);
                if (!trace) throw std::runtime_error("cannot write " + trace_path);
                const Scenario s = oracles.scenario(c);
                SimOptions opt;
                opt.slots = c.sim_slots;
                opt.seed = c.sim_seed;
                opt.trace = &trace;
                opt.per_state = false;
                run(s, *make_policy(s, c.policies.front()), opt);
            }
            store_cache(c, settings, oracles);
        } else if (*sweep) {
            RunSettings settings;
            NetworkConfig base = load_base(sweep_o, settings);
            SweepSpec spec;
            if (!preset_name.empty()) {
                spec = preset(preset_name, base);
                base = spec.base;
            }
            spec.base = apply_overrides(base, sweep_o, settings);
            if (!param.empty()) spec.param = parse_param(param);
            if (!grid_text.empty()) spec.grid = parse_list(grid_text);
            if (preset_name.empty() && (param.empty() || grid_text.empty())) {
                throw ConfigError("sweep needs --preset or both --param and --grid");
            }
            preload_cache(spec.base, settings, oracles);
            const SweepResult r = run_sweep(spec, oracles);
            std::ofstream file;
            write_sweep_csv(output(out_path, file), r);
            report_errors(r);
            if (!gnuplot_path.empty()) {
                std::ofstream gp(gnuplot_path);
                if (!gp) throw std::runtime_error("cannot write " + gnuplot_path);
                write_gnuplot(gp, out_path == "-" ? "sweep.csv" : out_path, r);
            }
            store_cache(spec.base, settings, oracles);
        } else if (*map) {
            RunSettings settings;
            const NetworkConfig base =
                apply_overrides(region_map_defaults(load_base(map_o, settings)), map_o, settings);
            std::vector<int> dcs = region_map_dc_grid();
            if (!dc_grid.empty()) {
                dcs.clear();
                for (double d : parse_list(dc_grid)) {
                    if (d < 0 || d != std::floor(d)) throw ConfigError("d_c grid needs non-negative integers");
                    dcs.push_back(static_cast<int>(d));
                }
            }
            const std::vector<double> vs = v_grid.empty() ? region_map_velocity_grid() : parse_list(v_grid);
            preload_cache(base, settings, oracles);
            const auto cells = region_map(base, dcs, vs, oracles);
            std::ofstream file;
            write_region_csv(output(out_path, file), cells);
            store_cache(base, settings, oracles);
        } else if (*val) {
            RunSettings settings;
            const NetworkConfig c = apply_overrides(load_base(val_o, settings), val_o, settings);
            preload_cache(c, settings, oracles);
            bool ok = true;
            for (const auto& check : validate(c, oracles)) {
                const char* tag = check.informational ? "INFO" : check.pass ? "PASS" : "FAIL";
                std::cout << tag << ' ' << check.name << ": " << check.detail << '\n';
                if (!check.informational && !check.pass) ok = false;
            }
            store_cache(c, settings, oracles);
            if (!ok) return kExitValidation;
        } else if (*cache_build) {
            RunSettings settings;
            const NetworkConfig c = apply_overrides(load_base(cache_o, settings), cache_o, settings);
            if (settings.cache_file.empty()) throw ConfigError("cache build needs --cache FILE");
            preload_cache(c, settings, oracles);
            const Scenario s = oracles.scenario(c);
            const StateSpace& space = s.space();
            if (space.global_count() > kJointEnumerationCap) {
                throw ConfigError("joint state space too large to enumerate");
            }
            parallel_for(static_cast<std::size_t>(space.global_count()), [&](std::size_t g) {
                std::vector<int> levels(static_cast<std::size_t>(space.processes()));
                space.decode(g, levels);
                capacity_region(s.oracle(), levels);
            });
            oracles.add(s.oracle_ptr());
            store_cache(c, settings, oracles);
        } else if (*cache_show) {
            std::ifstream in(show_path);
            std::string line;
            std::size_t records = 0;
            while (std::getline(in, line)) {
                if (line.rfind("record", 0) == 0) {
                    ++records;
                } else if (line.rfind("direct", 0) == 0 || line.rfind("cross", 0) == 0) {
                    std::istringstream is(line);
                    std::string tag;
                    std::size_t n = 0;
                    is >> tag >> n;
                    std::cout << tag << "_states " << n << '\n';
                } else {
                    std::cout << line << '\n';
                }
            }
            std::cout << "records " << records << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
