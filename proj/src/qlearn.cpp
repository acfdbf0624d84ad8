#include "modq/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace modq {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
        pool_.push_back(pool_.size());
    } else {
        storage_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) {
    if (batch_size > storage_.size())
        throw std::logic_error("ReplayBuffer::sample_indices: batch larger than buffer");
    // Partial Fisher-Yates over the persistent pool: O(batch) per call.
    for (std::size_t k = 0; k < batch_size; ++k) {
        const std::size_t j = k + uniform_index(rng, pool_.size() - k);
        std::swap(pool_[k], pool_[j]);
    }
    return {pool_.begin(), pool_.begin() + batch_size};
}

double epsilon_at(const EpsilonSchedule& schedule, long t) {
    if (t < 0) throw std::invalid_argument("epsilon_at: negative step");
    if (schedule.anneal_steps <= 1 || t >= schedule.anneal_steps - 1) return schedule.eps_final;
    const double frac = static_cast<double>(t) / static_cast<double>(schedule.anneal_steps - 1);
    return schedule.eps_initial + (schedule.eps_final - schedule.eps_initial) * frac;
}

int select_epsilon_greedy(std::span<const double> q_values, double eps, Rng& rng) {
    for (double q : q_values)
        if (!std::isfinite(q))
            throw std::runtime_error("select_epsilon_greedy: non-finite Q-value");
    if (eps > 0.0 && uniform_real(rng) < eps)
        return static_cast<int>(uniform_index(rng, q_values.size()));

    const double best = *std::max_element(q_values.begin(), q_values.end());
    int n_best = 0;
    for (double q : q_values)
        if (q == best) ++n_best;
    if (n_best == 1)
        return static_cast<int>(std::max_element(q_values.begin(), q_values.end()) -
                                q_values.begin());
    // Uniform among ties.
    auto pick = uniform_index(rng, static_cast<std::uint64_t>(n_best));
    for (std::size_t i = 0; i < q_values.size(); ++i) {
        if (q_values[i] == best) {
            if (pick == 0) return static_cast<int>(i);
            --pick;
        }
    }
    return 0;  // unreachable
}

double td_target(double reward, double gamma, std::span<const double> target_q_next) {
    return reward + gamma * *std::max_element(target_q_next.begin(), target_q_next.end());
}

bool should_sync_target(long t, long period) {
    if (period <= 0) throw std::invalid_argument("should_sync_target: period must be positive");
    return t > 0 && t % period == 0;
}

}  // namespace modq
