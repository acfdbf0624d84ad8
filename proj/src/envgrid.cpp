#include "modq/envgrid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace modq {

ResourceGrid build_resource_grid(std::span<const ResourceKernel> kernels, int width, int height) {
    if (kernels.empty()) throw std::invalid_argument("build_resource_grid: no kernels given");
    if (width < 3 || height < 3)
        throw std::invalid_argument("build_resource_grid: grid must be at least 3x3");

    ResourceGrid grid;
    grid.width = width;
    grid.height = height;
    grid.values.reserve(kernels.size());

    for (std::size_t k = 0; k < kernels.size(); ++k) {
        const auto& cov = kernels[k].covariance;
        const double a = cov[0], b = cov[1], c = cov[2], d = cov[3];
        const double det = a * d - b * c;
        if (b != c || det <= 0.0 || a <= 0.0 || d <= 0.0)
            throw std::invalid_argument("build_resource_grid: kernel " + std::to_string(k) +
                                        " covariance is not symmetric positive definite");

        // Inverse covariance for the quadratic form.
        const double ia = d / det, ib = -b / det, id = a / det;
        const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));

        std::vector<double> layer(static_cast<std::size_t>(width) * height);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double dx = x - kernels[k].mean_x;
                const double dy = y - kernels[k].mean_y;
                const double q = dx * (ia * dx + ib * dy) + dy * (ib * dx + id * dy);
                layer[static_cast<std::size_t>(y) * width + x] = norm * std::exp(-0.5 * q);
            }
        }
        grid.values.push_back(std::move(layer));
    }
    return grid;
}

EnvState initial_state(int width, int height, std::span<const double> initial_stats,
                       std::span<const double> setpoints) {
    if (initial_stats.size() != setpoints.size())
        throw std::invalid_argument("initial_state: stat/setpoint length mismatch");
    EnvState s;
    s.pos_x = width / 2;
    s.pos_y = height / 2;
    s.t = 0;
    s.stats.h.assign(initial_stats.begin(), initial_stats.end());
    s.stats.setpoints.assign(setpoints.begin(), setpoints.end());
    s.stats.clamped.assign(initial_stats.size(), 0);
    s.stats.clamp_values.assign(initial_stats.size(), 0.0);
    return s;
}

EnvState step(const EnvState& state, Action action, const ResourceGrid& grid, double depletion) {
    static constexpr int kDx[kNumActions] = {0, 0, 1, -1};  // N, S, E, W
    static constexpr int kDy[kNumActions] = {1, -1, 0, 0};

    EnvState next = state;
    const int idx = static_cast<int>(action);
    const int nx = state.pos_x + kDx[idx];
    const int ny = state.pos_y + kDy[idx];
    if (grid.in_bounds(nx, ny)) {
        next.pos_x = nx;
        next.pos_y = ny;
    }
    for (int i = 0; i < next.stats.count(); ++i) {
        if (next.stats.clamped[i]) {
            next.stats.h[i] = next.stats.clamp_values[i];
        } else {
            next.stats.h[i] = next.stats.h[i] + grid.at(i, next.pos_x, next.pos_y) - depletion;
        }
    }
    next.t = state.t + 1;
    return next;
}

std::vector<double> observe(const EnvState& state, const ResourceGrid& grid) {
    const int n = grid.layers();
    std::vector<double> obs;
    obs.reserve(static_cast<std::size_t>(observation_size(n)));
    for (int layer = 0; layer < n; ++layer) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int x = state.pos_x + dx;
                const int y = state.pos_y + dy;
                obs.push_back(grid.in_bounds(x, y) ? grid.at(layer, x, y) : 0.0);
            }
        }
    }
    obs.insert(obs.end(), state.stats.h.begin(), state.stats.h.end());
    return obs;
}

void apply_clamp(EnvState& state, int stat_index, double value) {
    if (stat_index < 0 || stat_index >= state.stats.count())
        throw std::out_of_range("apply_clamp: stat index " + std::to_string(stat_index) +
                                " out of range");
    state.stats.clamped[stat_index] = 1;
    state.stats.clamp_values[stat_index] = value;
    state.stats.h[stat_index] = value;
}

}  // namespace modq
