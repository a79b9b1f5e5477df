// Parameter sweeps, the (d_c, v) region map and the validation report.

#pragma once

#include "fogran/config.hpp"
#include "fogran/scenario.hpp"
#include "fogran/simulate.hpp"

#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace fogran {

/// Shares capacity oracles between configurations with identical levels.
class OracleCache {
public:
    Scenario scenario(const NetworkConfig& config);
    std::vector<std::shared_ptr<const CapacityOracle>> oracles() const;
    /// Preloads an oracle, e.g. one read back from a cache file.
    void add(std::shared_ptr<const CapacityOracle> oracle);

private:
    mutable std::mutex mutex_;
    std::vector<std::shared_ptr<const CapacityOracle>> oracles_;
};

enum class SweepParam { dc, de, eps, gamma_s, gamma_i, velocity };

std::string param_name(SweepParam p);
SweepParam parse_param(const std::string& name);

/// Sets the parameter; dB for SNRs, km/h for velocity.
NetworkConfig apply_param(NetworkConfig config, SweepParam param, double value);

struct SweepSpec {
    SweepParam param = SweepParam::dc;
    std::vector<double> grid;
    NetworkConfig base;
};

struct SweepRow {
    double param = 0.0;
    PolicyKind split = PolicyKind::dran;
    double analytic_rate = 0.0;
    double empirical_rate = 0.0;   ///< NaN when not simulated
    double empirical_outage = 0.0; ///< NaN when not simulated
    double stderr_rate = 0.0;      ///< NaN when not simulated
    std::string error;             ///< non-empty when the point failed
    SimResult sim;
};

struct SweepResult {
    SweepParam param = SweepParam::dc;
    std::vector<SweepRow> rows;  ///< grid order, then split order
};

/// Analytic value and, when config.simulate, one simulation per split.
std::vector<SweepRow> evaluate_point(const NetworkConfig& config, double param_value,
                                     OracleCache& cache, bool keep_state_tallies = false);

SweepResult run_sweep(const SweepSpec& spec, OracleCache& cache, bool keep_state_tallies = false);

/// Header: param,split,analytic_rate,empirical_rate,empirical_outage,stderr
void write_sweep_csv(std::ostream& out, const SweepResult& result);
/// gnuplot script plotting analytic (lines) and empirical (points) rates.
void write_gnuplot(std::ostream& out, const std::string& csv_path, const SweepResult& result);

/// Named sweeps: fig5, fig6-eps0, fig6-eps1e-3, fig7, fig9, fig10.
SweepSpec preset(const std::string& name, NetworkConfig base);
std::vector<std::string> preset_names();

struct RegionCell {
    int dc = 0;
    double velocity_kmh = 0.0;
    double cran = 0.0;
    double fran = 0.0;
    PolicyKind winner = PolicyKind::cran_lp;
    double margin = 0.0;  ///< winner minus loser, >= 0
};

/// C-RAN vs F-RAN (general LPs) on every (d_c, v) pair; ties go to C-RAN.
std::vector<RegionCell> region_map(const NetworkConfig& base, const std::vector<int>& dcs,
                                   const std::vector<double>& velocities_kmh, OracleCache& cache);
/// Header: dc,v,winner,margin
void write_region_csv(std::ostream& out, const std::vector<RegionCell>& cells);
/// Region-map parameters: d_e = 3, N = 12, eps = 0.01, 10 x 10 grid.
NetworkConfig region_map_defaults(NetworkConfig base);
std::vector<int> region_map_dc_grid();
std::vector<double> region_map_velocity_grid();

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
    bool informational = false;  ///< reported, never fails the run
};

/// Per-state outage test with a multiple-comparison allowance: the number
/// of states above eps + 3 sigma is compared with its expectation when
/// every state sits exactly at eps.
struct PerStateOutage {
    std::size_t states = 0;     ///< visited states
    std::size_t exceed = 0;     ///< states above eps + 3 sigma
    double expected = 0.0;      ///< expected count at outage exactly eps
    double allowed = 0.0;       ///< expected + 3 sd
    bool pass = false;
};
PerStateOutage per_state_outage(const SimResult& sim, double eps);

/// Simulates every requested split (plus closed forms when they apply) and
/// checks outage and rate agreement against 3 sigma bounds.
std::vector<Check> validate(const NetworkConfig& config, OracleCache& cache);

}  // namespace fogran
