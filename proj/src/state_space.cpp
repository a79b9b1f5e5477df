#include "fogran/state_space.hpp"

#include <limits>
#include <stdexcept>

namespace fogran {

namespace {

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return a * b;
}

}  // namespace

StateSpace::StateSpace(int users, int direct_states, int cross_states)
    : users_(users), n_direct_(direct_states), n_cross_(cross_states) {
    if (users < 1 || direct_states < 1 || cross_states < 1) {
        throw std::invalid_argument("state space needs K >= 1 and at least one level per process");
    }
    global_count_ = 1;
    for (int p = 0; p < processes(); ++p) {
        global_count_ = saturating_mul(global_count_, static_cast<std::uint64_t>(radix(p)));
    }
    local_count_ = static_cast<std::uint64_t>(n_direct_);
    for (int i = 1; i < users_; ++i) {
        local_count_ = saturating_mul(local_count_, static_cast<std::uint64_t>(n_cross_));
    }
}

int StateSpace::cross_process(int rx, int tx) const {
    if (rx == tx || rx < 0 || tx < 0 || rx >= users_ || tx >= users_) {
        throw std::out_of_range("cross process needs distinct valid users");
    }
    // Row rx holds K-1 off-diagonal entries.
    return users_ + rx * (users_ - 1) + (tx < rx ? tx : tx - 1);
}

void StateSpace::decode(std::uint64_t index, std::span<int> levels) const {
    for (int p = processes() - 1; p >= 0; --p) {
        const auto r = static_cast<std::uint64_t>(radix(p));
        levels[static_cast<std::size_t>(p)] = static_cast<int>(index % r);
        index /= r;
    }
}

std::uint64_t StateSpace::encode(std::span<const int> levels) const {
    std::uint64_t index = 0;
    for (int p = 0; p < processes(); ++p) {
        index = index * static_cast<std::uint64_t>(radix(p)) +
                static_cast<std::uint64_t>(levels[static_cast<std::size_t>(p)]);
    }
    return index;
}

std::uint64_t StateSpace::local_index(int user, std::span<const int> levels) const {
    std::uint64_t index = static_cast<std::uint64_t>(levels[static_cast<std::size_t>(user)]);
    for (int tx = 0; tx < users_; ++tx) {
        if (tx == user) continue;
        index = index * static_cast<std::uint64_t>(n_cross_) +
                static_cast<std::uint64_t>(
                    levels[static_cast<std::size_t>(cross_process(user, tx))]);
    }
    return index;
}

void StateSpace::decode_local(std::uint64_t index, std::span<int> combo) const {
    for (int k = users_ - 1; k >= 1; --k) {
        combo[static_cast<std::size_t>(k)] = static_cast<int>(index % n_cross_);
        index /= static_cast<std::uint64_t>(n_cross_);
    }
    combo[0] = static_cast<int>(index);
}

ChannelStateTuple StateSpace::to_tuple(std::span<const int> levels) const {
    ChannelStateTuple t;
    t.direct.assign(levels.begin(), levels.begin() + users_);
    t.cross.assign(static_cast<std::size_t>(users_ * users_), 0);
    for (int rx = 0; rx < users_; ++rx) {
        for (int tx = 0; tx < users_; ++tx) {
            if (rx == tx) continue;
            t.cross[static_cast<std::size_t>(rx * users_ + tx)] =
                levels[static_cast<std::size_t>(cross_process(rx, tx))];
        }
    }
    return t;
}

std::vector<int> StateSpace::from_tuple(const ChannelStateTuple& tuple) const {
    std::vector<int> levels(static_cast<std::size_t>(processes()));
    for (int j = 0; j < users_; ++j) levels[static_cast<std::size_t>(j)] = tuple.direct[static_cast<std::size_t>(j)];
    for (int rx = 0; rx < users_; ++rx) {
        for (int tx = 0; tx < users_; ++tx) {
            if (rx != tx) {
                levels[static_cast<std::size_t>(cross_process(rx, tx))] = tuple.cross_at(rx, tx);
            }
        }
    }
    return levels;
}

}  // namespace fogran
