#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modq/agents.hpp"
#include "modq/envgrid.hpp"

namespace modq {

enum class AgentKind { Monolithic, Modular, Random };

std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& s);

struct Perturbation {
    long time = 15000;
    int stat_index = 3;
    double value = 20.0;
};

// All tunables for one run. Defaults are the full-scale ("paper" preset) settings.
struct RunConfig {
    int n_resources = 4;
    int drive_n = 4;
    int drive_m = 2;
    std::vector<double> setpoints{5.0, 5.0, 5.0, 5.0};
    std::vector<double> initial_stats{0.5, 0.5, 0.5, 0.5};
    std::vector<ResourceKernel> kernels{
        {0.0, 0.0, {1, 0, 0, 1}},
        {10.0, 0.0, {1, 0, 0, 1}},
        {0.0, 10.0, {1, 0, 0, 1}},
        {10.0, 10.0, {1, 0, 0, 1}},
    };
    int grid_width = 11;
    int grid_height = 11;
    double depletion = 0.004;
    std::vector<int> hidden_mono{1024, 1024};
    std::vector<int> hidden_module{500, 500};
    double gamma = 0.5;
    double learning_rate = 1e-3;
    int batch_size = 512;
    std::size_t buffer_capacity = 30000;
    long target_period = 200;
    double eps_initial = 1.0;
    double eps_final = 0.01;
    long anneal_steps = 10000;
    long total_steps = 30000;
    long metric_t1 = 15000;  // Delta window [t1, t2)
    long metric_t2 = 30000;
    long final_window = 1000;
    AgentKind agent_kind = AgentKind::Monolithic;
    std::uint64_t seed = 0;
    std::optional<Perturbation> perturbation;
    int log_stride = 1;  // stride for persisted time-course files only
    std::string preset = "paper";
};

// Reduced-scale preset keeping every structural ratio of the full-scale settings
// (buffer = total steps, target period 200, gamma 0.5) at ~1% of the compute.
RunConfig desk_preset();
RunConfig paper_preset();
RunConfig apply_preset(const std::string& name);

// Throws std::invalid_argument naming the offending field.
void validate(const RunConfig& config);

struct StepRecord {
    std::vector<double> h;  // stats seen by the agent at this step (post-clamp)
    int action = 0;
    double epsilon = 0.0;
    std::vector<double> rewards;
    double reward_scalar = 0.0;
    double loss = 0.0;
    bool has_loss = false;
};

struct RunLog {
    std::vector<double> setpoints;
    std::vector<StepRecord> steps;
};

// Full observe -> act -> step -> record -> learn loop for total_steps;
// deterministic given (config, seed).
RunLog run_episode(const RunConfig& config);

// Eq.-(3)-style average absolute set-point deviation per step over [t1, t2),
// with an optional stat-exclusion set for the perturbation analysis.
double compute_delta(const RunLog& log, long t1, long t2, std::span<const double> setpoints,
                     const std::set<int>& exclude_stats = {});

// Mean of all stats over the final `window` steps.
double final_stat_mean(const RunLog& log, long window);

struct SweepEntry {
    std::string experiment;
    double setting = 0.0;
    std::string agent;
    std::uint64_t seed = 0;
    double delta = 0.0;
    double final_mean = 0.0;
};

struct SweepResult {
    std::vector<SweepEntry> entries;

    std::vector<double> deltas(const std::string& agent, double setting) const;
    std::vector<double> final_means(const std::string& agent, double setting) const;
};

// Number of parallel workers used by the sweep drivers (>= 1).
extern int g_sweep_workers;

SweepResult sweep_setpoints(const RunConfig& base, std::span<const double> setpoints, int seeds);
SweepResult sweep_gamma(const RunConfig& base, std::span<const double> gammas, int seeds);
SweepResult sweep_exploration(const RunConfig& base, std::span<const long> anneal_steps_list,
                              int seeds, bool both_agents);

struct TimeCourse {
    // mean[t][i], sd[t][i] across seeds for stat i at step t.
    std::vector<std::vector<double>> mean;
    std::vector<std::vector<double>> sd;
};

struct PerturbationOutcome {
    SweepResult deltas;  // post-clamp Delta over the unclamped stats
    TimeCourse monolithic;
    TimeCourse modular;
};

// Both agents, clamp per base.perturbation (defaulted if unset), Delta over
// [clamp, total_steps) excluding the clamped stat.
PerturbationOutcome perturbation_experiment(const RunConfig& base, int seeds);

// Delta of a uniform-random policy under the same config; baseline oracle.
double random_policy_delta(const RunConfig& base, std::uint64_t seed);

}  // namespace modq
