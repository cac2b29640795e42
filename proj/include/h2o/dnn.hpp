#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace h2o {

enum class Activation { ReLU, Tanh, Sigmoid, Softmax, Identity };
enum class LossKind { Mse, Cce };

const char* to_string(Activation a);
Activation parse_activation(std::string_view s);
const char* to_string(LossKind l);
LossKind parse_loss(std::string_view s);

// Dense layer, W stored row-major (out x in).
struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;
    std::vector<double> b;
    Activation act = Activation::Identity;

    double& weight(std::size_t r, std::size_t c) { return w[r * in + c]; }
    double weight(std::size_t r, std::size_t c) const { return w[r * in + c]; }
};

struct Network {
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out; }
    std::size_t num_params() const;
    void validate() const;
};

// Glorot-uniform weights, zero biases.
Network make_network(std::size_t input_dim, std::span<const std::size_t> hidden, Activation hidden_act,
                     std::size_t output_dim, Activation output_act, std::uint64_t seed);

std::vector<double> activate(Activation a, std::span<const double> z);

// Pre-activations z[l] and outputs r[l+1] of every layer; r[0] is the input.
struct ForwardCache {
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> r;
};

std::vector<double> forward(const Network& net, std::span<const double> input, ForwardCache* cache = nullptr);

// Predictions entering the cross-entropy are clamped below at this value.
inline constexpr double kCceEpsilon = 1e-12;

// MSE is the squared L2 norm of the difference; CCE is -sum t log p.
double loss(LossKind kind, std::span<const double> target, std::span<const double> prediction);

struct Example {
    std::vector<double> x;
    std::vector<double> y;
};

// Same shapes as the network's parameters.
struct Gradients {
    std::vector<std::vector<double>> dw;
    std::vector<std::vector<double>> db;
    double loss = 0.0; // mean loss over the batch
};

// Exact gradients of the mean batch loss.
Gradients gradient(const Network& net, std::span<const Example> batch, LossKind kind);
Gradients gradient(const Network& net, std::span<const Example* const> batch, LossKind kind);

double mean_loss(const Network& net, std::span<const Example> data, LossKind kind);

struct TrainParams {
    double learning_rate = 0.01;
    std::size_t epochs = 500;
    std::size_t batch_size = 32;
    double train_fraction = 0.8;
    LossKind loss = LossKind::Mse;
    std::uint64_t seed = 1;

    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double test_loss = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    // Absolute error of every output component over the test split after the
    // last epoch (train split if the test split is empty).
    std::vector<double> test_abs_errors;
    std::size_t train_size = 0;
    std::size_t test_size = 0;

    double min_test_loss() const;
    double fraction_errors_within(double bound) const;
};

// Seeded 80/20 split (by default), then mini-batch SGD with per-epoch
// shuffling. Throws DivergenceError on a non-finite loss.
TrainReport train(Network& net, std::span<const Example> data, const TrainParams& params);

void write_train_report_csv(std::ostream& os, const TrainReport& report);

void write_network(std::ostream& os, const Network& net);
Network read_network(std::istream& is);

} // namespace h2o
