#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "modq/rng.hpp"

namespace modq {

// Dense row-major matrix of doubles.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> d;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), d(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return d[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return d[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return d.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return d.data() + static_cast<std::size_t>(r) * cols; }
};

// MLP with rectified-linear hidden layers and a linear output layer.
// weights[l] is (layer_sizes[l+1] x layer_sizes[l]).
struct QNetwork {
    std::vector<int> layer_sizes;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
};

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

struct AdamState {
    std::vector<Matrix> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon_hat = 1e-8;
    double learning_rate = 1e-3;
};

std::size_t parameter_count(std::span<const int> layer_sizes);

// Weights uniform in +-sqrt(6/fan_in), biases zero.
QNetwork init_network(std::span<const int> layer_sizes, Rng& rng);

Gradients zero_gradients(const QNetwork& net);
AdamState make_adam(const QNetwork& net, double learning_rate);

std::vector<double> forward(const QNetwork& net, std::span<const double> input);

// Batched forward: inputs is (batch x input_size), one row per sample.
// Returns (batch x output_size).
Matrix forward_batch(const QNetwork& net, const Matrix& inputs);

// Gradients of the mean squared TD error over the batch: only the taken
// action's output unit receives loss gradient. Returns the loss value.
// inputs is (batch x input_size), row per sample.
double backward_td(const QNetwork& net, const Matrix& inputs, std::span<const int> actions,
                   std::span<const double> targets, Gradients& grads);

// Standard bias-corrected Adam step; increments adam.step_count.
void adam_update(QNetwork& net, const Gradients& grads, AdamState& adam);

void copy_parameters(const QNetwork& src, QNetwork& dst);

// Checkpoint: uint32 layer count, uint32 layer sizes, then the flat
// little-endian float64 parameter array (per layer: weights row-major, biases).
void save_checkpoint(const QNetwork& net, const std::filesystem::path& path);
QNetwork load_checkpoint(const std::filesystem::path& path);

}  // namespace modq
