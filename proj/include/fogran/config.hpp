// INI configuration: [network], [channel], [capacity], [simulation].

#pragma once

#include "fogran/scenario.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace fogran {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Extra settings that do not change the analytic model.
struct RunSettings {
    std::string cache_file;  ///< capacity cache loaded before and saved after a run
};

/// Applies every key of the INI text on top of `config`. Physical values are
/// given in user units (dB, km/h, Hz) and converted to linear/SI here.
/// Unknown sections or keys and out-of-range values raise ConfigError.
void read_config(std::istream& in, NetworkConfig& config, RunSettings& settings);
void read_config_file(const std::string& path, NetworkConfig& config, RunSettings& settings);

/// INI text for `config`; read_config of the result reproduces it.
void write_config(std::ostream& out, const NetworkConfig& config, const RunSettings& settings);

std::string antenna_name(AntennaMode mode);
AntennaMode parse_antenna(const std::string& name);
std::string budget_name(FranBudget budget);
FranBudget parse_budget(const std::string& name);
std::vector<PolicyKind> parse_policy_list(const std::string& list);

}  // namespace fogran
