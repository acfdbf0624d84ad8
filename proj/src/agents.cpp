#include "modq/agents.hpp"

#include <cmath>
#include <string>

namespace modq {

double drive_mono(std::span<const double> h, const DriveParams& params) {
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        sum += std::pow(std::abs(params.setpoints[i] - h[i]), static_cast<double>(params.n));
    return std::pow(sum, 1.0 / params.m);
}

double reward_mono(std::span<const double> h_t, std::span<const double> h_next,
                   const DriveParams& params) {
    return drive_mono(h_t, params) - drive_mono(h_next, params);
}

double drive_single(double h_i, double setpoint, const DriveParams& params) {
    // Same operation order as drive_mono with one stat, so the two forms are
    // bit-identical at N=1.
    return std::pow(std::pow(std::abs(setpoint - h_i), static_cast<double>(params.n)),
                    1.0 / params.m);
}

std::vector<double> reward_modular(std::span<const double> h_t, std::span<const double> h_next,
                                   const DriveParams& params) {
    std::vector<double> r(h_t.size());
    for (std::size_t i = 0; i < h_t.size(); ++i)
        r[i] = drive_single(h_t[i], params.setpoints[i], params) -
               drive_single(h_next[i], params.setpoints[i], params);
    return r;
}

namespace {

std::vector<int> full_layers(int obs_size, const std::vector<int>& hidden) {
    std::vector<int> layers;
    layers.push_back(obs_size);
    layers.insert(layers.end(), hidden.begin(), hidden.end());
    layers.push_back(kNumActions);
    return layers;
}

int agent_obs_size(const AgentConfig& cfg) { return 10 * cfg.n_stats; }

}  // namespace

MonolithicAgent::MonolithicAgent(const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), buffer_(cfg.buffer_capacity), rng_(seed) {
    const auto layers = full_layers(agent_obs_size(cfg), cfg.hidden_mono);
    online_ = init_network(layers, rng_);
    target_ = online_;
    adam_ = make_adam(online_, cfg.learning_rate);
    grads_ = zero_gradients(online_);
}

int MonolithicAgent::act(std::span<const double> obs, long t) {
    const auto q = forward(online_, obs);
    return select_epsilon_greedy(q, epsilon_at(cfg_.schedule, t), rng_);
}

std::optional<double> MonolithicAgent::learn(long t) {
    const std::size_t batch = static_cast<std::size_t>(cfg_.batch_size);
    if (buffer_.size() < batch) return std::nullopt;

    const auto indices = buffer_.sample_indices(batch, rng_);
    const int obs_size = online_.input_size();
    Matrix inputs(static_cast<int>(batch), obs_size);
    Matrix next_inputs(static_cast<int>(batch), obs_size);
    std::vector<int> actions(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        const Transition& tr = buffer_.at(indices[b]);
        std::copy(tr.obs.begin(), tr.obs.end(), inputs.row(static_cast<int>(b)));
        std::copy(tr.next_obs.begin(), tr.next_obs.end(), next_inputs.row(static_cast<int>(b)));
        actions[b] = tr.action;
    }

    const Matrix next_q = forward_batch(target_, next_inputs);
    std::vector<double> targets(batch);
    for (std::size_t b = 0; b < batch; ++b)
        targets[b] = td_target(buffer_.at(indices[b]).reward_scalar, cfg_.gamma,
                               {next_q.row(static_cast<int>(b)), static_cast<std::size_t>(kNumActions)});

    const double loss = backward_td(online_, inputs, actions, targets, grads_);
    if (!std::isfinite(loss))
        throw DivergenceError(t, "monolithic agent: non-finite loss at step " + std::to_string(t));
    adam_update(online_, grads_, adam_);
    if (should_sync_target(t, cfg_.target_period)) copy_parameters(online_, target_);
    return loss;
}

ModularAgent::ModularAgent(const AgentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), buffer_(cfg.buffer_capacity), rng_(seed) {
    const auto layers = full_layers(agent_obs_size(cfg), cfg.hidden_module);
    for (int i = 0; i < cfg.n_stats; ++i) {
        online_.push_back(init_network(layers, rng_));
        targets_.push_back(online_.back());
        adams_.push_back(make_adam(online_.back(), cfg.learning_rate));
        grads_.push_back(zero_gradients(online_.back()));
    }
}

int ModularAgent::act(std::span<const double> obs, long t) {
    std::vector<double> summed(kNumActions, 0.0);
    for (const auto& net : online_) {
        const auto q = forward(net, obs);
        for (int a = 0; a < kNumActions; ++a) summed[a] += q[a];
    }
    return select_epsilon_greedy(summed, epsilon_at(cfg_.schedule, t), rng_);
}

std::optional<std::vector<double>> ModularAgent::learn(long t) {
    const std::size_t batch = static_cast<std::size_t>(cfg_.batch_size);
    if (buffer_.size() < batch) return std::nullopt;

    // One shared batch; every module trains on it with its own reward stream.
    const auto indices = buffer_.sample_indices(batch, rng_);
    const int obs_size = online_.front().input_size();
    Matrix inputs(static_cast<int>(batch), obs_size);
    Matrix next_inputs(static_cast<int>(batch), obs_size);
    std::vector<int> actions(batch);
    for (std::size_t b = 0; b < batch; ++b) {
        const Transition& tr = buffer_.at(indices[b]);
        std::copy(tr.obs.begin(), tr.obs.end(), inputs.row(static_cast<int>(b)));
        std::copy(tr.next_obs.begin(), tr.next_obs.end(), next_inputs.row(static_cast<int>(b)));
        actions[b] = tr.action;
    }

    std::vector<double> losses(online_.size());
    std::vector<double> targets(batch);
    for (std::size_t i = 0; i < online_.size(); ++i) {
        const Matrix next_q = forward_batch(targets_[i], next_inputs);
        for (std::size_t b = 0; b < batch; ++b)
            targets[b] = td_target(buffer_.at(indices[b]).rewards[i], cfg_.gamma,
                                   {next_q.row(static_cast<int>(b)),
                                    static_cast<std::size_t>(kNumActions)});
        losses[i] = backward_td(online_[i], inputs, actions, targets, grads_[i]);
        if (!std::isfinite(losses[i]))
            throw DivergenceError(t, "modular agent: non-finite loss in module " +
                                         std::to_string(i) + " at step " + std::to_string(t));
        adam_update(online_[i], grads_[i], adams_[i]);
    }
    if (should_sync_target(t, cfg_.target_period))
        for (std::size_t i = 0; i < online_.size(); ++i) copy_parameters(online_[i], targets_[i]);
    return losses;
}

}  // namespace modq
