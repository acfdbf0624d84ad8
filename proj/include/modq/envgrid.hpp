#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace modq {

// One resource layer: a unit-integral 2D Gaussian evaluated at cell centers.
struct ResourceKernel {
    double mean_x = 0.0;
    double mean_y = 0.0;
    // Row-major 2x2 covariance in cells^2.
    std::array<double, 4> covariance{1.0, 0.0, 0.0, 1.0};
};

struct ResourceGrid {
    int width = 0;
    int height = 0;
    // values[layer][y * width + x], all nonnegative.
    std::vector<std::vector<double>> values;

    int layers() const { return static_cast<int>(values.size()); }
    double at(int layer, int x, int y) const {
        return values[static_cast<std::size_t>(layer)][static_cast<std::size_t>(y) * width + x];
    }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

struct InternalStats {
    std::vector<double> h;
    std::vector<double> setpoints;
    std::vector<std::uint8_t> clamped;
    std::vector<double> clamp_values;

    int count() const { return static_cast<int>(h.size()); }
};

// Index mapping is load-bearing: observation and Q-output order depend on it.
enum class Action : int { North = 0, South = 1, East = 2, West = 3 };
inline constexpr int kNumActions = 4;

struct EnvState {
    int pos_x = 0;
    int pos_y = 0;
    InternalStats stats;
    long t = 0;
};

// Evaluates each kernel's continuous density at integer cell coordinates;
// no renormalization over the grid. Throws std::invalid_argument naming the
// kernel index if a covariance is not symmetric positive definite.
ResourceGrid build_resource_grid(std::span<const ResourceKernel> kernels, int width, int height);

// Agent starts at the grid center with the given stats and no clamps.
EnvState initial_state(int width, int height, std::span<const double> initial_stats,
                       std::span<const double> setpoints);

// One environment step. Moves off-grid are blocked (position unchanged, the
// step still elapses and intake is taken at the unchanged position). For each
// unclamped stat i: h_i += grid[i][next] - depletion. Clamped stats stay at
// their clamp value.
EnvState step(const EnvState& state, Action action, const ResourceGrid& grid, double depletion);

// Flat observation of length 10*N: for each layer, the 3x3 window around the
// agent in row-major order (dy = -1..1 outer, dx = -1..1 inner, y increasing);
// out-of-grid cells read 0. The N stat values follow.
std::vector<double> observe(const EnvState& state, const ResourceGrid& grid);

inline int observation_size(int n_resources) { return 10 * n_resources; }

// Freezes stat `stat_index` at `value` immediately and for all later steps.
void apply_clamp(EnvState& state, int stat_index, double value);

}  // namespace modq
