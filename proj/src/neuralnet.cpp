#include "modq/neuralnet.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace modq {

namespace {

void check_sizes(std::span<const int> layer_sizes) {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("network needs at least input and output sizes");
    for (int s : layer_sizes)
        if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
}

// z = a . w over n entries; the simd pragma lets the compiler vectorize the
// reduction (result is stable for a fixed binary).
double dot(const double* a, const double* w, int n) {
    double s = 0.0;
#pragma omp simd reduction(+ : s)
    for (int i = 0; i < n; ++i) s += a[i] * w[i];
    return s;
}

void axpy(double* out, double scale, const double* in, int n) {
#pragma omp simd
    for (int i = 0; i < n; ++i) out[i] += scale * in[i];
}

// One linear layer on a (batch x in) activation matrix.
Matrix linear_batch(const Matrix& act, const Matrix& w, const std::vector<double>& bias) {
    Matrix z(act.rows, w.rows);
    for (int b = 0; b < act.rows; ++b) {
        const double* a = act.row(b);
        double* zr = z.row(b);
        for (int o = 0; o < w.rows; ++o) zr[o] = dot(a, w.row(o), w.cols) + bias[o];
    }
    return z;
}

void relu_inplace(Matrix& z) {
    for (double& v : z.d)
        if (v < 0.0) v = 0.0;
}

}  // namespace

std::size_t parameter_count(std::span<const int> layer_sizes) {
    check_sizes(layer_sizes);
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
        total += static_cast<std::size_t>(layer_sizes[l]) * layer_sizes[l + 1] + layer_sizes[l + 1];
    return total;
}

QNetwork init_network(std::span<const int> layer_sizes, Rng& rng) {
    check_sizes(layer_sizes);
    QNetwork net;
    net.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double scale = std::sqrt(6.0 / fan_in);
        Matrix w(fan_out, fan_in);
        for (double& v : w.d) v = uniform_real(rng, -scale, scale);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

Gradients zero_gradients(const QNetwork& net) {
    Gradients g;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.weights.emplace_back(net.weights[l].rows, net.weights[l].cols);
        g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
}

AdamState make_adam(const QNetwork& net, double learning_rate) {
    AdamState a;
    a.learning_rate = learning_rate;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        a.m_w.emplace_back(net.weights[l].rows, net.weights[l].cols);
        a.v_w.emplace_back(net.weights[l].rows, net.weights[l].cols);
        a.m_b.emplace_back(net.biases[l].size(), 0.0);
        a.v_b.emplace_back(net.biases[l].size(), 0.0);
    }
    return a;
}

std::vector<double> forward(const QNetwork& net, std::span<const double> input) {
    if (static_cast<int>(input.size()) != net.input_size())
        throw std::invalid_argument("forward: input length mismatch");
    std::vector<double> act(input.begin(), input.end());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        const Matrix& w = net.weights[l];
        std::vector<double> next(static_cast<std::size_t>(w.rows));
        for (int o = 0; o < w.rows; ++o) next[o] = dot(act.data(), w.row(o), w.cols) + net.biases[l][o];
        if (l + 1 < net.weights.size())
            for (double& v : next)
                if (v < 0.0) v = 0.0;
        act = std::move(next);
    }
    return act;
}

Matrix forward_batch(const QNetwork& net, const Matrix& inputs) {
    if (inputs.cols != net.input_size())
        throw std::invalid_argument("forward_batch: input width mismatch");
    Matrix act = inputs;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        Matrix z = linear_batch(act, net.weights[l], net.biases[l]);
        if (l + 1 < net.weights.size()) relu_inplace(z);
        act = std::move(z);
    }
    return act;
}

double backward_td(const QNetwork& net, const Matrix& inputs, std::span<const int> actions,
                   std::span<const double> targets, Gradients& grads) {
    const int batch = inputs.rows;
    const std::size_t n_layers = net.weights.size();
    if (inputs.cols != net.input_size())
        throw std::invalid_argument("backward_td: input width mismatch");
    if (static_cast<int>(actions.size()) != batch || static_cast<int>(targets.size()) != batch)
        throw std::invalid_argument("backward_td: batch length mismatch");
    for (int a : actions)
        if (a < 0 || a >= net.output_size())
            throw std::invalid_argument("backward_td: action index out of range");

    // Forward pass keeping post-activation values per layer.
    std::vector<Matrix> acts;
    acts.reserve(n_layers + 1);
    acts.push_back(inputs);
    for (std::size_t l = 0; l < n_layers; ++l) {
        Matrix z = linear_batch(acts.back(), net.weights[l], net.biases[l]);
        if (l + 1 < n_layers) relu_inplace(z);
        acts.push_back(std::move(z));
    }

    // Loss and output delta: mean over the batch of (Q(s,a) - y)^2.
    const Matrix& q = acts.back();
    Matrix delta(batch, net.output_size());
    double loss = 0.0;
    for (int b = 0; b < batch; ++b) {
        const double residual = q(b, actions[b]) - targets[b];
        loss += residual * residual;
        delta(b, actions[b]) = 2.0 * residual / batch;
    }
    loss /= batch;

    for (std::size_t li = n_layers; li-- > 0;) {
        Matrix& gw = grads.weights[li];
        std::vector<double>& gb = grads.biases[li];
        std::fill(gw.d.begin(), gw.d.end(), 0.0);
        std::fill(gb.begin(), gb.end(), 0.0);

        const Matrix& below = acts[li];
        for (int b = 0; b < batch; ++b) {
            const double* dr = delta.row(b);
            const double* ar = below.row(b);
            for (int o = 0; o < gw.rows; ++o) {
                if (dr[o] != 0.0) axpy(gw.row(o), dr[o], ar, gw.cols);
                gb[o] += dr[o];
            }
        }

        if (li > 0) {
            const Matrix& w = net.weights[li];
            Matrix prev(batch, w.cols);
            for (int b = 0; b < batch; ++b) {
                const double* dr = delta.row(b);
                double* pr = prev.row(b);
                for (int o = 0; o < w.rows; ++o)
                    if (dr[o] != 0.0) axpy(pr, dr[o], w.row(o), w.cols);
                // Rectifier gate: post-activation zero means no gradient flows.
                const double* ar = below.row(b);
                for (int i = 0; i < w.cols; ++i)
                    if (ar[i] <= 0.0) pr[i] = 0.0;
            }
            delta = std::move(prev);
        }
    }
    return loss;
}

void adam_update(QNetwork& net, const Gradients& grads, AdamState& adam) {
    adam.step_count += 1;
    const double b1t = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.step_count));
    const double b2t = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.step_count));

    auto update = [&](double* p, const double* g, double* m, double* v, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
            v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
            const double m_hat = m[i] / b1t;
            const double v_hat = v[i] / b2t;
            p[i] -= adam.learning_rate * m_hat / (std::sqrt(v_hat) + adam.epsilon_hat);
        }
    };

    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        update(net.weights[l].d.data(), grads.weights[l].d.data(), adam.m_w[l].d.data(),
               adam.v_w[l].d.data(), net.weights[l].d.size());
        update(net.biases[l].data(), grads.biases[l].data(), adam.m_b[l].data(),
               adam.v_b[l].data(), net.biases[l].size());
    }
}

void copy_parameters(const QNetwork& src, QNetwork& dst) {
    if (src.layer_sizes != dst.layer_sizes)
        throw std::invalid_argument("copy_parameters: layer size mismatch");
    dst.weights = src.weights;
    dst.biases = src.biases;
}

void save_checkpoint(const QNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
    const std::uint32_t n = static_cast<std::uint32_t>(net.layer_sizes.size());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (int s : net.layer_sizes) {
        const std::uint32_t v = static_cast<std::uint32_t>(s);
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        out.write(reinterpret_cast<const char*>(net.weights[l].d.data()),
                  static_cast<std::streamsize>(net.weights[l].d.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(net.biases[l].data()),
                  static_cast<std::streamsize>(net.biases[l].size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

QNetwork load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || n < 2) throw std::runtime_error("load_checkpoint: bad header");
    std::vector<int> sizes(n);
    for (auto& s : sizes) {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof v);
        s = static_cast<int>(v);
    }
    check_sizes(sizes);
    QNetwork net;
    net.layer_sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Matrix w(sizes[l + 1], sizes[l]);
        in.read(reinterpret_cast<char*>(w.d.data()),
                static_cast<std::streamsize>(w.d.size() * sizeof(double)));
        std::vector<double> b(static_cast<std::size_t>(sizes[l + 1]));
        in.read(reinterpret_cast<char*>(b.data()),
                static_cast<std::streamsize>(b.size() * sizeof(double)));
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    if (!in) throw std::runtime_error("load_checkpoint: truncated file");
    return net;
}

}  // namespace modq
