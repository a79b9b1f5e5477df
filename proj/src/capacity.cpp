#include "fogran/capacity.hpp"

#include <array>
#include <bit>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fogran {

namespace {

constexpr int kMaxDim = 8;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// log2 det of a c x c Hermitian positive definite matrix (row-major).
double log2_det_hpd(std::array<std::complex<double>, kMaxDim * kMaxDim>& g, int c) {
    double log_det = 0.0;
    for (int k = 0; k < c; ++k) {
        double diag = g[static_cast<std::size_t>(k * c + k)].real();
        for (int j = 0; j < k; ++j) diag -= std::norm(g[static_cast<std::size_t>(k * c + j)]);
        const double lkk = std::sqrt(diag);
        log_det += std::log(lkk);
        for (int i = k + 1; i < c; ++i) {
            std::complex<double> v = g[static_cast<std::size_t>(i * c + k)];
            for (int j = 0; j < k; ++j) {
                v -= g[static_cast<std::size_t>(i * c + j)] * std::conj(g[static_cast<std::size_t>(k * c + j)]);
            }
            g[static_cast<std::size_t>(i * c + k)] = v / lkk;
        }
    }
    return 2.0 * log_det / std::numbers::ln2;
}

const char* mode_name(AntennaMode mode) {
    return mode == AntennaMode::full ? "full" : "restricted";
}

}  // namespace

double single_user_capacity(double total_gain) { return std::log2(1.0 + total_gain); }

CapacityOracle::CapacityOracle(int users, std::vector<double> direct_levels,
                               std::vector<double> cross_levels, OracleOptions options)
    : users_(users),
      direct_levels_(std::move(direct_levels)),
      cross_levels_(std::move(cross_levels)),
      options_(options),
      space_(users, std::max(1, static_cast<int>(direct_levels_.size())),
             std::max(1, static_cast<int>(cross_levels_.size()))) {
    if (direct_levels_.empty() || (users_ > 1 && cross_levels_.empty())) {
        throw std::invalid_argument("capacity oracle needs direct levels and, for K > 1, cross levels");
    }
    if (users_ > kMaxDim) throw std::invalid_argument("capacity oracle supports at most 8 users");
    if (options_.samples < 2) throw std::invalid_argument("capacity oracle needs at least 2 samples");
    for (double g : direct_levels_) {
        if (!(g >= 0.0)) throw std::invalid_argument("channel levels must be non-negative");
    }
    for (double g : cross_levels_) {
        if (!(g >= 0.0)) throw std::invalid_argument("channel levels must be non-negative");
    }
}

CapacityOracle::Shape CapacityOracle::shape_for(std::uint32_t subset) const {
    if (subset == 0) throw std::invalid_argument("ergodic sum capacity needs a nonempty subset");
    if (subset >= (1u << users_)) throw std::out_of_range("subset mask names unknown users");
    Shape s;
    for (int j = 0; j < users_; ++j) {
        if (subset & (1u << j)) s.cols.push_back(j);
    }
    if (options_.mode == AntennaMode::full) {
        for (int j = 0; j < users_; ++j) s.rows.push_back(j);
    } else {
        s.rows = s.cols;
    }
    return s;
}

std::string CapacityOracle::key_for(std::uint32_t subset, const Shape& shape,
                                    std::span<const int> levels) const {
    std::string key;
    key.reserve(2 + 2 * shape.rows.size() * shape.cols.size());
    key.push_back(options_.mode == AntennaMode::full ? 'f' : 'r');
    key.push_back(static_cast<char>(subset));
    for (int c : shape.cols) {
        for (int r : shape.rows) {
            const int idx = r == c ? levels[static_cast<std::size_t>(c)]
                                   : levels[static_cast<std::size_t>(space_.cross_process(r, c))];
            key.push_back(static_cast<char>(idx & 0xff));
            key.push_back(static_cast<char>((idx >> 8) & 0xff));
        }
    }
    return key;
}

std::shared_ptr<const std::vector<std::complex<double>>> CapacityOracle::phases_for(int rows,
                                                                                   int cols) const {
    std::lock_guard lock(phase_mutex_);
    auto& slot = phases_[{rows, cols}];
    if (!slot) {
        std::mt19937_64 rng(splitmix64(options_.seed ^ splitmix64(static_cast<std::uint64_t>(rows * 64 + cols))));
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        auto draws = std::make_shared<std::vector<std::complex<double>>>(
            options_.samples * static_cast<std::size_t>(rows * cols));
        for (auto& z : *draws) z = std::polar(1.0, angle(rng));
        slot = std::move(draws);
    }
    return slot;
}

CapacityEstimate CapacityOracle::compute(const Shape& shape, std::span<const int> levels) const {
    const int rows = static_cast<int>(shape.rows.size());
    const int cols = static_cast<int>(shape.cols.size());
    std::array<double, kMaxDim * kMaxDim> amp{};  // column-major amp[c * rows + r]
    double column_gain = 0.0;
    for (int c = 0; c < cols; ++c) {
        const int tx = shape.cols[static_cast<std::size_t>(c)];
        for (int r = 0; r < rows; ++r) {
            const int rx = shape.rows[static_cast<std::size_t>(r)];
            const double gain =
                rx == tx ? direct_levels_.at(static_cast<std::size_t>(levels[static_cast<std::size_t>(tx)]))
                         : cross_levels_.at(static_cast<std::size_t>(
                               levels[static_cast<std::size_t>(space_.cross_process(rx, tx))]));
            amp[static_cast<std::size_t>(c * rows + r)] = std::sqrt(gain);
            column_gain += gain;
        }
    }
    if (cols == 1) return {single_user_capacity(column_gain), 0.0};

    const auto phases = phases_for(rows, cols);
    const std::size_t per_sample = static_cast<std::size_t>(rows * cols);
    if (cols == 2) {
        // det(I + H^H H) = (1 + |h1|^2)(1 + |h2|^2) - |h1^H h2|^2
        double n1 = 0.0;
        double n2 = 0.0;
        std::array<double, kMaxDim> w{};
        for (int r = 0; r < rows; ++r) {
            const double a1 = amp[static_cast<std::size_t>(r)];
            const double a2 = amp[static_cast<std::size_t>(rows + r)];
            n1 += a1 * a1;
            n2 += a2 * a2;
            w[static_cast<std::size_t>(r)] = a1 * a2;
        }
        const double base = (1.0 + n1) * (1.0 + n2);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t s = 0; s < options_.samples; ++s) {
            const std::complex<double>* phase = phases->data() + s * per_sample;
            double re = 0.0;
            double im = 0.0;
            for (int r = 0; r < rows; ++r) {
                const std::complex<double> p1 = phase[r];
                const std::complex<double> p2 = phase[rows + r];
                // conj(p1) * p2
                const double wr = w[static_cast<std::size_t>(r)];
                re += wr * (p1.real() * p2.real() + p1.imag() * p2.imag());
                im += wr * (p1.real() * p2.imag() - p1.imag() * p2.real());
            }
            const double v = std::log2(base - (re * re + im * im));
            sum += v;
            sum_sq += v * v;
        }
        const double n = static_cast<double>(options_.samples);
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        return {mean, std::sqrt(var / n)};
    }
    std::array<std::complex<double>, kMaxDim * kMaxDim> h{};
    std::array<std::complex<double>, kMaxDim * kMaxDim> gram{};
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t s = 0; s < options_.samples; ++s) {
        const std::complex<double>* phase = phases->data() + s * per_sample;
        for (std::size_t e = 0; e < per_sample; ++e) h[e] = amp[e] * phase[e];
        // gram = I + H^H H, lower triangle only
        for (int a = 0; a < cols; ++a) {
            for (int b = 0; b <= a; ++b) {
                std::complex<double> acc = a == b ? 1.0 : 0.0;
                for (int r = 0; r < rows; ++r) {
                    acc += std::conj(h[static_cast<std::size_t>(b * rows + r)]) *
                           h[static_cast<std::size_t>(a * rows + r)];
                }
                gram[static_cast<std::size_t>(a * cols + b)] = acc;
            }
        }
        const double v = log2_det_hpd(gram, cols);
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(options_.samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n)};
}

CapacityEstimate CapacityOracle::ergodic_sum_capacity(std::uint32_t subset,
                                                      const ChannelStateTuple& state) const {
    if (state.users() != users_) throw std::invalid_argument("state tuple has wrong number of users");
    const std::vector<int> levels = space_.from_tuple(state);
    return ergodic_sum_capacity(subset, levels);
}

CapacityEstimate CapacityOracle::ergodic_sum_capacity(std::uint32_t subset,
                                                      std::span<const int> levels) const {
    const Shape shape = shape_for(subset);
    const std::string key = key_for(subset, shape, levels);
    {
        std::shared_lock lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const CapacityEstimate est = compute(shape, levels);
    std::unique_lock lock(cache_mutex_);
    cache_.emplace(key, est);
    return est;
}

std::size_t CapacityOracle::cache_size() const {
    std::shared_lock lock(cache_mutex_);
    return cache_.size();
}

void CapacityOracle::save(std::ostream& out) const {
    std::shared_lock lock(cache_mutex_);
    out << "# fogran capacity cache v1\n";
    out << "users " << users_ << "\n";
    out << "seed " << options_.seed << "\n";
    out << "samples " << options_.samples << "\n";
    out << std::hexfloat;
    out << "direct " << direct_levels_.size();
    for (double g : direct_levels_) out << ' ' << g;
    out << "\ncross " << cross_levels_.size();
    for (double g : cross_levels_) out << ' ' << g;
    out << "\n";
    // Sorted output keeps files byte-identical across runs.
    std::map<std::string, CapacityEstimate> ordered(cache_.begin(), cache_.end());
    for (const auto& [key, est] : ordered) {
        const std::size_t n_idx = (key.size() - 2) / 2;
        out << "record " << (key[0] == 'f' ? "full" : "restricted") << ' '
            << static_cast<unsigned>(static_cast<unsigned char>(key[1])) << ' ' << n_idx;
        for (std::size_t i = 0; i < n_idx; ++i) {
            const unsigned lo = static_cast<unsigned char>(key[2 + 2 * i]);
            const unsigned hi = static_cast<unsigned char>(key[3 + 2 * i]);
            out << ' ' << std::dec << (lo | (hi << 8));
        }
        out << std::hexfloat << ' ' << est.value << ' ' << est.std_error << "\n";
    }
    out << std::defaultfloat;
}

std::size_t CapacityOracle::load(std::istream& in) {
    std::string line;
    auto read_levels = [](std::istringstream& is) {
        std::size_t n = 0;
        is >> n;
        std::vector<double> v(n);
        for (double& g : v) {
            std::string tok;
            is >> tok;
            g = std::strtod(tok.c_str(), nullptr);
        }
        return v;
    };
    std::size_t loaded = 0;
    std::map<std::string, CapacityEstimate> incoming;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string tag;
        is >> tag;
        if (tag == "users") {
            int k = 0;
            is >> k;
            if (k != users_) throw std::runtime_error("capacity cache was built for a different K");
        } else if (tag == "seed") {
            std::uint64_t s = 0;
            is >> s;
            if (s != options_.seed) throw std::runtime_error("capacity cache seed mismatch");
        } else if (tag == "samples") {
            std::size_t n = 0;
            is >> n;
            if (n != options_.samples) throw std::runtime_error("capacity cache sample count mismatch");
        } else if (tag == "direct") {
            if (read_levels(is) != direct_levels_) throw std::runtime_error("capacity cache direct levels mismatch");
        } else if (tag == "cross") {
            if (read_levels(is) != cross_levels_) throw std::runtime_error("capacity cache cross levels mismatch");
        } else if (tag == "record") {
            std::string mode;
            unsigned mask = 0;
            std::size_t n_idx = 0;
            is >> mode >> mask >> n_idx;
            if (mode != mode_name(AntennaMode::full) && mode != mode_name(AntennaMode::restricted)) {
                throw std::runtime_error("capacity cache record has unknown antenna mode: " + mode);
            }
            std::string key;
            key.push_back(mode == "full" ? 'f' : 'r');
            key.push_back(static_cast<char>(mask));
            for (std::size_t i = 0; i < n_idx; ++i) {
                unsigned idx = 0;
                is >> idx;
                key.push_back(static_cast<char>(idx & 0xff));
                key.push_back(static_cast<char>((idx >> 8) & 0xff));
            }
            std::string v, e;
            is >> v >> e;
            if (!is) throw std::runtime_error("malformed capacity cache record: " + line);
            incoming[key] = {std::strtod(v.c_str(), nullptr), std::strtod(e.c_str(), nullptr)};
        } else {
            throw std::runtime_error("unknown capacity cache line: " + line);
        }
    }
    std::unique_lock lock(cache_mutex_);
    for (auto& [key, est] : incoming) {
        if (cache_.emplace(key, est).second) ++loaded;
    }
    return loaded;
}

CapacityRegion capacity_region(const CapacityOracle& oracle, std::span<const int> levels) {
    const int k = oracle.users();
    if (k > kMaxRegionUsers) {
        throw std::invalid_argument("capacity region enumeration refused: K = " + std::to_string(k) +
                                    " exceeds " + std::to_string(kMaxRegionUsers));
    }
    CapacityRegion region;
    region.users = k;
    const std::uint32_t n = 1u << k;
    region.bounds.assign(n, 0.0);
    region.std_errors.assign(n, 0.0);
    for (std::uint32_t mask = 1; mask < n; ++mask) {
        const CapacityEstimate est = oracle.ergodic_sum_capacity(mask, levels);
        region.bounds[mask] = est.value;
        region.std_errors[mask] = est.std_error;
    }
    return region;
}

CapacityRegion capacity_region(const CapacityOracle& oracle, const ChannelStateTuple& state) {
    const StateSpace space(oracle.users(), static_cast<int>(oracle.direct_levels().size()),
                           std::max(1, static_cast<int>(oracle.cross_levels().size())));
    const std::vector<int> levels = space.from_tuple(state);
    return capacity_region(oracle, levels);
}

bool contains(const CapacityRegion& region, std::span<const double> rates, double tol) {
    const std::uint32_t n = 1u << region.users;
    for (std::uint32_t mask = 1; mask < n; ++mask) {
        double sum = 0.0;
        for (int j = 0; j < region.users; ++j) {
            if (mask & (1u << j)) sum += rates[static_cast<std::size_t>(j)];
        }
        if (sum > region.bounds[mask] + tol) return false;
    }
    return true;
}

}  // namespace fogran
