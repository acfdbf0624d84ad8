#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "modq/envgrid.hpp"
#include "modq/neuralnet.hpp"
#include "modq/qlearn.hpp"

namespace modq {

// Convex drive exponents; (n, m) = (4, 2) in all experiments.
struct DriveParams {
    int n = 4;
    int m = 2;
    std::vector<double> setpoints;
};

// D(H) = (sum_i |h_i* - h_i|^n)^(1/m)
double drive_mono(std::span<const double> h, const DriveParams& params);

// r = D(H_t) - D(H_next)
double reward_mono(std::span<const double> h_t, std::span<const double> h_next,
                   const DriveParams& params);

// D(h_i) = |h_i* - h_i|^(n/m); squared deviation for (4, 2).
double drive_single(double h_i, double setpoint, const DriveParams& params);

// Component i = D(h_{i,t}) - D(h_{i,next}).
std::vector<double> reward_modular(std::span<const double> h_t, std::span<const double> h_next,
                                   const DriveParams& params);

struct DivergenceError : std::runtime_error {
    long step;
    explicit DivergenceError(long step_, const std::string& what)
        : std::runtime_error(what), step(step_) {}
};

struct AgentConfig {
    int n_stats = 4;
    std::vector<int> hidden_mono{1024, 1024};
    std::vector<int> hidden_module{500, 500};
    double gamma = 0.5;
    double learning_rate = 1e-3;
    int batch_size = 512;
    std::size_t buffer_capacity = 30000;
    long target_period = 200;
    EpsilonSchedule schedule;
    DriveParams drive;
};

// Single DQN trained on the scalarized multi-stat drive-reduction reward.
class MonolithicAgent {
  public:
    MonolithicAgent(const AgentConfig& cfg, std::uint64_t seed);

    int act(std::span<const double> obs, long t);
    void record(Transition t) { buffer_.push(std::move(t)); }

    // One gradient update per environment step; skips until the buffer holds
    // a full batch. Returns the batch loss when an update happened.
    std::optional<double> learn(long t);

    const QNetwork& online() const { return online_; }
    const QNetwork& target() const { return target_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    long update_count() const { return adam_.step_count; }

  private:
    AgentConfig cfg_;
    QNetwork online_, target_;
    AdamState adam_;
    Gradients grads_;
    ReplayBuffer buffer_;
    Rng rng_;
};

// Greatest-mass Q-learning: one DQN per stat, each trained on its own
// single-stat reward; greedy action is argmax of summed Q-values. All modules
// train on the same sampled batch from one shared buffer.
class ModularAgent {
  public:
    ModularAgent(const AgentConfig& cfg, std::uint64_t seed);

    int act(std::span<const double> obs, long t);
    void record(Transition t) { buffer_.push(std::move(t)); }
    std::optional<std::vector<double>> learn(long t);

    const QNetwork& module(int i) const { return online_[i]; }
    const QNetwork& module_target(int i) const { return targets_[i]; }
    const ReplayBuffer& buffer() const { return buffer_; }
    long update_count() const { return adams_.front().step_count; }

  private:
    AgentConfig cfg_;
    std::vector<QNetwork> online_, targets_;
    std::vector<AdamState> adams_;
    std::vector<Gradients> grads_;
    ReplayBuffer buffer_;
    Rng rng_;
};

}  // namespace modq
