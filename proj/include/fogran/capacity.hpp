// Ergodic multiple-access sum capacities over uniform channel phases.

#pragma once

#include "fogran/state_space.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace fogran {

/// Receive antennas used for a subset L of users.
/// restricted: only the RRSs in L; full: all K RRSs.
enum class AntennaMode { restricted, full };

constexpr int kMaxRegionUsers = 4;

struct CapacityEstimate {
    double value = 0.0;      ///< bits/s/Hz
    double std_error = 0.0;  ///< Monte Carlo standard error (0 when exact)
};

struct OracleOptions {
    std::size_t samples = 200000;
    std::uint64_t seed = 1;
    AntennaMode mode = AntennaMode::restricted;
};

/// Cached Monte Carlo estimates of E[log2 det(I + H H^H)].
///
/// Every estimate for a given matrix shape reuses the same phase draws
/// (derived from the seed and the shape), so estimates are deterministic
/// and differences between neighbouring states carry little noise.
/// Single-column subsets are evaluated exactly. Thread-safe.
class CapacityOracle {
public:
    CapacityOracle(int users, std::vector<double> direct_levels,
                   std::vector<double> cross_levels, OracleOptions options = {});

    int users() const { return users_; }
    AntennaMode mode() const { return options_.mode; }
    std::size_t samples() const { return options_.samples; }
    std::uint64_t seed() const { return options_.seed; }
    const std::vector<double>& direct_levels() const { return direct_levels_; }
    const std::vector<double>& cross_levels() const { return cross_levels_; }

    /// Sum capacity of the users in `subset` (bitmask over 0..K-1).
    CapacityEstimate ergodic_sum_capacity(std::uint32_t subset, const ChannelStateTuple& state) const;
    /// Same, with per-process levels in StateSpace order.
    CapacityEstimate ergodic_sum_capacity(std::uint32_t subset, std::span<const int> levels) const;

    std::size_t cache_size() const;

    /// Writes every cached record; see docs/capacity-cache.md.
    void save(std::ostream& out) const;
    /// Loads records written by save(). Throws std::runtime_error when the
    /// file was produced for different levels, users, seed or sample count.
    std::size_t load(std::istream& in);

private:
    struct Shape {
        std::vector<int> rows;
        std::vector<int> cols;
    };
    Shape shape_for(std::uint32_t subset) const;
    std::string key_for(std::uint32_t subset, const Shape& shape, std::span<const int> levels) const;
    CapacityEstimate compute(const Shape& shape, std::span<const int> levels) const;
    std::shared_ptr<const std::vector<std::complex<double>>> phases_for(int rows, int cols) const;

    int users_;
    std::vector<double> direct_levels_;
    std::vector<double> cross_levels_;
    OracleOptions options_;
    StateSpace space_;

    mutable std::shared_mutex cache_mutex_;
    mutable std::unordered_map<std::string, CapacityEstimate> cache_;
    mutable std::mutex phase_mutex_;
    mutable std::map<std::pair<int, int>, std::shared_ptr<const std::vector<std::complex<double>>>>
        phases_;
};

/// Sum-rate bounds for every nonempty subset; index by bitmask.
struct CapacityRegion {
    int users = 0;
    std::vector<double> bounds;      ///< size 2^K, entry 0 unused
    std::vector<double> std_errors;  ///< size 2^K

    double bound(std::uint32_t subset) const { return bounds[subset]; }
};

/// Region of the current joint state. Refuses K > kMaxRegionUsers.
CapacityRegion capacity_region(const CapacityOracle& oracle, const ChannelStateTuple& state);
CapacityRegion capacity_region(const CapacityOracle& oracle, std::span<const int> levels);

/// True iff sum_{j in L} rates_j <= bound(L) + tol for every L.
bool contains(const CapacityRegion& region, std::span<const double> rates, double tol = 1e-9);

/// log2(1 + x) over a column of gains: the exact single-user bound.
double single_user_capacity(double total_gain);

}  // namespace fogran
