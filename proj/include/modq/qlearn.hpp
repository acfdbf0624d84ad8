#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "modq/rng.hpp"

namespace modq {

// One step of experience. The task is a single continuing episode, so there
// is no terminal flag. Stores both the per-stat reward vector and the
// monolithic scalar (the m-th root does not distribute over the sum, so the
// scalar is not derivable from the vector).
struct Transition {
    std::vector<double> obs;
    int action = 0;
    std::vector<double> rewards;
    double reward_scalar = 0.0;
    std::vector<double> next_obs;
};

// Fixed-capacity ring; once full, oldest entries are overwritten in
// insertion order.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }

    // Entry by storage slot; slots keep insertion order until first eviction.
    const Transition& at(std::size_t i) const { return storage_[i]; }

    // batch_size distinct storage indices, uniform without replacement.
    // Callers must guard size() >= batch_size.
    std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng);

  private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> storage_;
    std::vector<std::size_t> pool_;  // index pool for partial-shuffle sampling
};

struct EpsilonSchedule {
    double eps_initial = 1.0;
    double eps_final = 0.01;
    long anneal_steps = 10000;  // K; K=1 means eps_final from the first step
};

// Linear from eps_initial at t=0 to eps_final at t=K-1, constant afterward.
double epsilon_at(const EpsilonSchedule& schedule, long t);

// With probability eps a uniform action, otherwise argmax with uniform
// tie-breaking among maximal entries. Throws on non-finite Q-values.
int select_epsilon_greedy(std::span<const double> q_values, double eps, Rng& rng);

// reward + gamma * max(target_q_next); no terminal masking (continuing task).
double td_target(double reward, double gamma, std::span<const double> target_q_next);

// True iff t is a positive multiple of period.
bool should_sync_target(long t, long period);

}  // namespace modq
