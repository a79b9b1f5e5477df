// Indexing of joint channel states for K users.
//
// Process order: direct gains S_0..S_{K-1}, then cross gains I_{j,i}
// (received at RRS j from UE i, i != j) in row-major (j, i) order.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fogran {

/// Largest joint state space enumerated by the rate-selection LPs.
constexpr std::uint64_t kJointEnumerationCap = 10000000;

/// Level indices of every channel process in one slot.
struct ChannelStateTuple {
    std::vector<int> direct;  ///< size K
    std::vector<int> cross;   ///< size K*K, diagonal unused (kept at 0)

    int users() const { return static_cast<int>(direct.size()); }
    int cross_at(int rx, int tx) const {
        return cross[static_cast<std::size_t>(rx * users() + tx)];
    }
};

class StateSpace {
public:
    StateSpace(int users, int direct_states, int cross_states);

    int users() const { return users_; }
    int direct_states() const { return n_direct_; }
    int cross_states() const { return n_cross_; }
    int processes() const { return users_ * users_; }
    bool is_direct(int process) const { return process < users_; }
    int radix(int process) const { return is_direct(process) ? n_direct_ : n_cross_; }

    /// Process index of cross gain I_{rx,tx}.
    int cross_process(int rx, int tx) const;

    /// Number of joint states, saturating at UINT64_MAX on overflow.
    std::uint64_t global_count() const { return global_count_; }
    /// Number of local combos (S_j, I_{j,.}) seen by one user.
    std::uint64_t local_count() const { return local_count_; }

    /// Per-process level indices of a global index (process 0 varies slowest).
    void decode(std::uint64_t index, std::span<int> levels) const;
    std::uint64_t encode(std::span<const int> levels) const;

    /// Local combo of `user` inside a per-process level vector.
    std::uint64_t local_index(int user, std::span<const int> levels) const;
    /// Inverse of local_index: (S_j, I_{j,i} for i != j in increasing i).
    void decode_local(std::uint64_t index, std::span<int> combo) const;

    ChannelStateTuple to_tuple(std::span<const int> levels) const;
    std::vector<int> from_tuple(const ChannelStateTuple& tuple) const;

private:
    int users_;
    int n_direct_;
    int n_cross_;
    std::uint64_t global_count_;
    std::uint64_t local_count_;
};

}  // namespace fogran
