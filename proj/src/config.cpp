#include "fogran/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <type_traits>
#include <sstream>

namespace fogran {

namespace pt = boost::property_tree;

std::string antenna_name(AntennaMode mode) {
    return mode == AntennaMode::full ? "full" : "restricted";
}

AntennaMode parse_antenna(const std::string& name) {
    if (name == "full") return AntennaMode::full;
    if (name == "restricted") return AntennaMode::restricted;
    throw ConfigError("antenna_mode must be 'restricted' or 'full', got '" + name + "'");
}

std::string budget_name(FranBudget budget) {
    return budget == FranBudget::per_user ? "1/K" : "1/K^2";
}

FranBudget parse_budget(const std::string& name) {
    if (name == "1/K" || name == "per-user") return FranBudget::per_user;
    if (name == "1/K^2" || name == "1/K2" || name == "per-process") return FranBudget::per_process;
    throw ConfigError("lp_eps_exponent must be '1/K' or '1/K^2', got '" + name + "'");
}

std::vector<PolicyKind> parse_policy_list(const std::string& list) {
    std::vector<PolicyKind> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        try {
            out.push_back(parse_policy(item.substr(b, e - b + 1)));
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(ex.what());
        }
    }
    if (out.empty()) throw ConfigError("splits list is empty");
    return out;
}

namespace {

template <typename T>
T number(const pt::ptree& node, const std::string& key) {
    const std::string text = node.get_value<std::string>();
    if (std::is_unsigned_v<T> && text.find('-') != std::string::npos) {
        throw ConfigError("key '" + key + "' must be non-negative, got '" + text + "'");
    }
    std::istringstream is(text);
    T value{};
    is >> value;
    if (!is || !(is >> std::ws).eof()) {
        throw ConfigError("key '" + key + "' expects a number, got '" + text + "'");
    }
    return value;
}

bool boolean(const pt::ptree& node, const std::string& key) {
    const std::string v = node.get_value<std::string>();
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "' expects true/false, got '" + v + "'");
}

using Setter = void (*)(const pt::ptree&, const std::string&, NetworkConfig&, RunSettings&);

const std::map<std::string, std::map<std::string, Setter>>& schema() {
    static const std::map<std::string, std::map<std::string, Setter>> s = {
        {"network",
         {{"users", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.users = number<int>(n, k); }},
          {"edge_delay", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.edge_delay = number<int>(n, k); }},
          {"fronthaul_delay", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.fronthaul_delay = number<int>(n, k); }},
          {"epsilon", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.epsilon = number<double>(n, k); }},
          {"splits", [](const pt::ptree& n, const std::string&, NetworkConfig& c, RunSettings&) { c.policies = parse_policy_list(n.get_value<std::string>()); }},
          {"lp_eps_exponent", [](const pt::ptree& n, const std::string&, NetworkConfig& c, RunSettings&) { c.fran_budget = parse_budget(n.get_value<std::string>()); }}}},
        {"channel",
         {{"direct_snr_db", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.direct_snr = db_to_linear(number<double>(n, k)); }},
          {"cross_snr_db", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.cross_snr = db_to_linear(number<double>(n, k)); }},
          {"velocity_kmh", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.velocity = number<double>(n, k) / 3.6; }},
          {"carrier_hz", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) {
               const double f = number<double>(n, k);
               if (!(f > 0.0)) throw ConfigError("carrier_hz must be positive");
               c.wavelength = kSpeedOfLight / f; }},
          {"slot_s", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.slot_duration = number<double>(n, k); }},
          {"direct_states", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.direct_states = number<int>(n, k); }},
          {"cross_states", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.cross_states = number<int>(n, k); }}}},
        {"capacity",
         {{"antenna_mode", [](const pt::ptree& n, const std::string&, NetworkConfig& c, RunSettings&) { c.antenna = parse_antenna(n.get_value<std::string>()); }},
          {"mc_samples", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.mc_samples = number<std::size_t>(n, k); }},
          {"seed", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.seed = number<std::uint64_t>(n, k); }},
          {"cache_file", [](const pt::ptree& n, const std::string&, NetworkConfig&, RunSettings& s) { s.cache_file = n.get_value<std::string>(); }}}},
        {"simulation",
         {{"enabled", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.simulate = boolean(n, k); }},
          {"slots", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.sim_slots = number<std::uint64_t>(n, k); }},
          {"seed", [](const pt::ptree& n, const std::string& k, NetworkConfig& c, RunSettings&) { c.sim_seed = number<std::uint64_t>(n, k); }}}},
    };
    return s;
}

}  // namespace

void read_config(std::istream& in, NetworkConfig& config, RunSettings& settings) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        const auto sec = schema().find(section);
        if (sec == schema().end()) {
            if (!body.data().empty()) {
                throw ConfigError("key '" + section + "' must sit inside a section");
            }
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, node] : body) {
            const auto setter = sec->second.find(key);
            if (setter == sec->second.end()) {
                throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            }
            setter->second(node, key, config, settings);
        }
    }
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void read_config_file(const std::string& path, NetworkConfig& config, RunSettings& settings) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    read_config(in, config, settings);
}

void write_config(std::ostream& out, const NetworkConfig& c, const RunSettings& s) {
    std::ostringstream splits;
    for (std::size_t i = 0; i < c.policies.size(); ++i) {
        splits << (i ? "," : "") << policy_name(c.policies[i]);
    }
    out << std::setprecision(17);
    out << "[network]\n"
        << "users = " << c.users << "\n"
        << "edge_delay = " << c.edge_delay << "\n"
        << "fronthaul_delay = " << c.fronthaul_delay << "\n"
        << "epsilon = " << c.epsilon << "\n"
        << "splits = " << splits.str() << "\n"
        << "lp_eps_exponent = " << budget_name(c.fran_budget) << "\n\n"
        << "[channel]\n"
        << "direct_snr_db = " << linear_to_db(c.direct_snr) << "\n"
        << "cross_snr_db = " << linear_to_db(c.cross_snr) << "\n"
        << "velocity_kmh = " << c.velocity * 3.6 << "\n"
        << "carrier_hz = " << kSpeedOfLight / c.wavelength << "\n"
        << "slot_s = " << c.slot_duration << "\n"
        << "direct_states = " << c.direct_states << "\n"
        << "cross_states = " << c.cross_states << "\n\n"
        << "[capacity]\n"
        << "antenna_mode = " << antenna_name(c.antenna) << "\n"
        << "mc_samples = " << c.mc_samples << "\n"
        << "seed = " << c.seed << "\n";
    if (!s.cache_file.empty()) out << "cache_file = " << s.cache_file << "\n";
    out << "\n[simulation]\n"
        << "enabled = " << (c.simulate ? "true" : "false") << "\n"
        << "slots = " << c.sim_slots << "\n"
        << "seed = " << c.sim_seed << "\n";
}

}  // namespace fogran
