#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modq/config.hpp"
#include "modq/csvio.hpp"
#include "modq/harness.hpp"
#include "modq/stats.hpp"
#include "modq/svgplot.hpp"

namespace fs = std::filesystem;
using namespace modq;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset = "paper";
    std::string out_dir = "out";
    std::string agent = "mono";
    std::uint64_t seed = 0;
    int seeds = 10;
    long steps = -1;
    long anneal = -1;
    int workers = 1;
    int stride = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "key-value config file");
    cmd->add_option("--preset", o.preset, "preset when no config file is given")
        ->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--seeds", o.seeds, "seeds per setting");
    cmd->add_option("--steps", o.steps, "override total steps");
    cmd->add_option("--anneal", o.anneal, "override epsilon annealing steps K");
    cmd->add_option("--agent", o.agent, "agent kind")
        ->check(CLI::IsMember({"mono", "modular", "both", "random"}));
    cmd->add_option("--workers", o.workers, "parallel run workers");
    cmd->add_option("--stride", o.stride, "row stride for time-course CSVs");
}

RunConfig base_config(const CommonOpts& o) {
    RunConfig c = o.config_path.empty() ? apply_preset(o.preset) : parse_config(o.config_path);
    c.seed = o.seed;
    if (o.steps > 0) {
        c.total_steps = o.steps;
        c.metric_t1 = o.steps / 2;
        c.metric_t2 = o.steps;
        if (c.buffer_capacity > static_cast<std::size_t>(o.steps))
            c.buffer_capacity = static_cast<std::size_t>(o.steps);
    }
    if (o.anneal > 0) c.anneal_steps = o.anneal;
    if (o.agent != "both") c.agent_kind = agent_kind_from_string(o.agent);
    c.log_stride = o.stride;
    g_sweep_workers = o.workers;
    validate(c);
    return c;
}

int cmd_run(const CommonOpts& o) {
    const RunConfig c = base_config(o);
    const RunLog log = run_episode(c);
    write_runlog_csv(fs::path(o.out_dir) / "run_log.csv", log, c.log_stride);

    SweepResult summary;
    SweepEntry e;
    e.experiment = "run";
    e.setting = static_cast<double>(c.anneal_steps);
    e.agent = to_string(c.agent_kind);
    e.seed = c.seed;
    e.delta = compute_delta(log, c.metric_t1, c.metric_t2, c.setpoints);
    e.final_mean = final_stat_mean(log, c.final_window);
    summary.entries.push_back(e);
    write_sweep_csv(fs::path(o.out_dir) / "summary.csv", summary);
    std::cout << "delta=" << e.delta << " final_stat_mean=" << e.final_mean << "\n";
    return 0;
}

void plot_setpoint(const fs::path& dir) {
    const SweepResult r = read_sweep_csv(dir / "sweep_setpoint.csv");
    std::vector<double> xs, ys;
    for (const auto& e : r.entries) {
        xs.push_back(e.setting);
        ys.push_back(e.final_mean);
    }
    write_scatter_identity_svg(dir / "sweep_setpoint.svg", xs, ys, "set-point",
                               "final stat mean (last 1k steps)", "Set-point sweep");
}

std::string setting_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<BoxGroup> group_by_setting(const SweepResult& r) {
    std::vector<BoxGroup> groups;
    for (const auto& e : r.entries) {
        const std::string label =
            (e.agent == "mono" ? "DQN " : "GmQ ") + setting_label(e.setting);
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const BoxGroup& g) { return g.label == label; });
        if (it == groups.end()) {
            BoxGroup g;
            g.label = label;
            g.color = e.agent == "mono" ? "#4878cf" : "#d65f5f";
            groups.push_back(g);
            it = groups.end() - 1;
        }
        it->values.push_back(e.delta);
    }
    return groups;
}

void plot_gamma(const fs::path& dir) {
    const SweepResult r = read_sweep_csv(dir / "sweep_gamma.csv");
    write_boxplot_svg(dir / "sweep_gamma.svg", group_by_setting(r), "homeostatic deviation",
                      "Discount factor sweep");
}

void plot_explore(const fs::path& dir) {
    const SweepResult r = read_sweep_csv(dir / "sweep_explore.csv");
    write_boxplot_svg(dir / "sweep_explore.svg", group_by_setting(r), "homeostatic deviation",
                      "Exploration annealing sweep");
}

void plot_perturb(const fs::path& dir, double setpoint, std::optional<long> clamp_time) {
    for (const char* agent : {"mono", "modular"}) {
        const TimeCourse tc = read_timecourse_csv(dir / (std::string("timecourse_") + agent + ".csv"));
        write_timecourse_svg(dir / (std::string("timecourse_") + agent + ".svg"), tc, setpoint,
                             clamp_time,
                             std::string(agent == std::string("mono") ? "DQN" : "GmQ") +
                                 " stat time-courses");
    }
    const SweepResult r = read_sweep_csv(dir / "perturb_deltas.csv");
    std::vector<BoxGroup> groups(2);
    groups[0] = {"DQN", "#4878cf", r.deltas("mono", r.entries.front().setting)};
    groups[1] = {"GmQ", "#d65f5f", r.deltas("modular", r.entries.front().setting)};
    write_boxplot_svg(dir / "perturb_deltas.svg", groups, "post-clamp deviation",
                      "Perturbation robustness");
}

int cmd_sweep_setpoint(const CommonOpts& o, std::vector<double> setpoints) {
    RunConfig c = base_config(o);
    if (o.agent == "both")
        throw CLI::ValidationError("--agent both is not meaningful for sweep-setpoint");
    const SweepResult r = sweep_setpoints(c, setpoints, o.seeds);
    write_sweep_csv(fs::path(o.out_dir) / "sweep_setpoint.csv", r);
    plot_setpoint(o.out_dir);
    return 0;
}

int cmd_sweep_gamma(const CommonOpts& o, std::vector<double> gammas) {
    RunConfig c = base_config(o);
    const SweepResult r = sweep_gamma(c, gammas, o.seeds);
    write_sweep_csv(fs::path(o.out_dir) / "sweep_gamma.csv", r);
    plot_gamma(o.out_dir);
    return 0;
}

int cmd_sweep_explore(const CommonOpts& o, std::vector<long> anneals) {
    RunConfig c = base_config(o);
    const SweepResult r = sweep_exploration(c, anneals, o.seeds, o.agent == "both");
    write_sweep_csv(fs::path(o.out_dir) / "sweep_explore.csv", r);
    plot_explore(o.out_dir);
    return 0;
}

int cmd_perturb(const CommonOpts& o) {
    RunConfig c = base_config(o);
    if (!c.perturbation) c.perturbation = Perturbation{c.total_steps / 2, c.n_resources - 1, 20.0};
    const PerturbationOutcome out = perturbation_experiment(c, o.seeds);
    const fs::path dir(o.out_dir);
    write_sweep_csv(dir / "perturb_deltas.csv", out.deltas);
    write_timecourse_csv(dir / "timecourse_mono.csv", out.monolithic, c.log_stride);
    write_timecourse_csv(dir / "timecourse_modular.csv", out.modular, c.log_stride);
    plot_perturb(dir, c.setpoints.front(), c.perturbation->time);
    return 0;
}

int cmd_plot(const CommonOpts& o, const std::string& kind) {
    const fs::path dir(o.out_dir);
    if (kind == "setpoint")
        plot_setpoint(dir);
    else if (kind == "gamma")
        plot_gamma(dir);
    else if (kind == "explore")
        plot_explore(dir);
    else if (kind == "perturb")
        plot_perturb(dir, 5.0, std::nullopt);
    return 0;
}

int cmd_verify();

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homeostatic grid-world comparison of monolithic DQN and modular GmQ agents"};
    app.require_subcommand(1);

    CommonOpts o;
    std::vector<double> setpoints{2.0, 5.0, 8.0};
    std::vector<double> gammas{0.0, 0.25, 0.5, 0.75, 0.9};
    std::vector<long> anneals{1, 400, 2000, 4000};
    std::string plot_kind;

    auto* run = app.add_subcommand("run", "single training run");
    add_common(run, o);

    auto* sp = app.add_subcommand("sweep-setpoint", "set-point sweep (final stat mean)");
    add_common(sp, o);
    sp->add_option("--setpoints", setpoints, "set-points to sweep");

    auto* sg = app.add_subcommand("sweep-gamma", "discount factor sweep (deviation metric)");
    add_common(sg, o);
    sg->add_option("--gammas", gammas, "discount factors to sweep");

    auto* se = app.add_subcommand("sweep-explore", "epsilon annealing sweep");
    add_common(se, o);
    se->add_option("--anneals", anneals, "annealing step counts K");

    auto* pe = app.add_subcommand("perturb", "mid-run stat clamp experiment");
    add_common(pe, o);

    auto* pl = app.add_subcommand("plot", "regenerate SVGs from CSVs in --out");
    add_common(pl, o);
    pl->add_option("--kind", plot_kind, "figure kind")
        ->required()
        ->check(CLI::IsMember({"setpoint", "gamma", "explore", "perturb"}));

    app.add_subcommand("verify", "parameter-count and gradient checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(o);
        if (sp->parsed()) return cmd_sweep_setpoint(o, setpoints);
        if (sg->parsed()) return cmd_sweep_gamma(o, gammas);
        if (se->parsed()) return cmd_sweep_explore(o, anneals);
        if (pe->parsed()) return cmd_perturb(o);
        if (pl->parsed()) return cmd_plot(o, plot_kind);
        return cmd_verify();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

namespace {

// Central finite differences on the TD loss, step 1e-5.
double fd_max_rel_error(int trials, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    const double h = 1e-5;
    for (int trial = 0; trial < trials; ++trial) {
        const std::vector<int> sizes{10, 8, 4};
        QNetwork net = init_network(sizes, rng);
        const int batch = 1 + static_cast<int>(uniform_index(rng, 8));
        Matrix inputs(batch, 10);
        std::vector<int> actions(batch);
        std::vector<double> targets(batch);
        for (int b = 0; b < batch; ++b) {
            for (int i = 0; i < 10; ++i) inputs(b, i) = uniform_real(rng, -1.0, 1.0);
            actions[b] = static_cast<int>(uniform_index(rng, 4));
            targets[b] = uniform_real(rng, -1.0, 1.0);
        }
        Gradients grads = zero_gradients(net);
        backward_td(net, inputs, actions, targets, grads);

        auto loss_at = [&]() {
            const Matrix q = forward_batch(net, inputs);
            double loss = 0.0;
            for (int b = 0; b < batch; ++b) {
                const double r = q(b, actions[b]) - targets[b];
                loss += r * r;
            }
            return loss / batch;
        };
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            for (std::size_t i = 0; i < net.weights[l].d.size(); ++i) {
                double& p = net.weights[l].d[i];
                const double saved = p;
                p = saved + h;
                const double up = loss_at();
                p = saved - h;
                const double dn = loss_at();
                p = saved;
                const double fd = (up - dn) / (2 * h);
                const double an = grads.weights[l].d[i];
                const double rel =
                    std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-8});
                worst = std::max(worst, rel);
            }
            for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
                double& p = net.biases[l][i];
                const double saved = p;
                p = saved + h;
                const double up = loss_at();
                p = saved - h;
                const double dn = loss_at();
                p = saved;
                const double fd = (up - dn) / (2 * h);
                const double an = grads.biases[l][i];
                const double rel =
                    std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-8});
                worst = std::max(worst, rel);
            }
        }
    }
    return worst;
}

int cmd_verify() {
    const std::vector<int> mono_layers{40, 1024, 1024, 4};
    const std::vector<int> module_layers{40, 500, 500, 4};
    const std::size_t mono_params = parameter_count(mono_layers);
    const std::size_t modular_params = 4 * parameter_count(module_layers);
    std::printf("monolithic parameters (40-1024-1024-4): %zu\n", mono_params);
    std::printf("modular parameters (4 x 40-500-500-4):  %zu\n", modular_params);

    const double worst = fd_max_rel_error(20, 20240817);
    std::printf("gradient check max relative error:      %.3e\n", worst);

    const bool ok = mono_params == 1095684 && modular_params == 1092016 && worst < 1e-4;
    std::printf("%s\n", ok ? "verify: OK" : "verify: FAILED");
    return ok ? 0 : 1;
}

}  // namespace
