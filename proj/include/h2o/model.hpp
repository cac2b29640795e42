#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "h2o/dnn.hpp"

namespace h2o {

struct SampleMeta {
    std::uint64_t scenario = 0; // index within the collection run
    std::uint64_t seed = 0;     // scenario seed
    std::uint64_t slot = 0;
    std::uint64_t ue = 0;
};

// One labelled decision: a UE's membership row and the (label, frequency)
// chosen for it.
struct Sample {
    std::vector<double> u;
    int a = 0;
    double f = 0.0;
    SampleMeta meta;
};

// Frequency target scale.
//   Linear: f / f_hi (f_hi = largest node capacity).
//   Log:    log(f / f_lo) / log(f_hi / f_lo) with [f_lo, f_hi] fitted to the
//           offloaded frequencies of the training samples.
enum class FreqScale { Linear, Log };

const char* to_string(FreqScale s);
FreqScale parse_freq_scale(std::string_view s);

struct Normalizer {
    std::size_t num_nodes = 0;
    FreqScale scale = FreqScale::Log;
    double f_lo = 1e6;
    double f_hi = 1e12;

    double label_norm(int a) const;
    int label(double a_norm) const;
    double freq_norm(double f) const;
    double freq(double f_norm) const;

    std::array<double, 2> normalize(int a, double f) const { return {label_norm(a), freq_norm(f)}; }
};

// Linear scale with f_hi = global_fmax and f_lo = f_floor.
Normalizer linear_normalizer(std::size_t num_nodes, double global_fmax, double f_floor);
// Log scale fitted to the offloaded samples; falls back to [f_floor, global_fmax]
// when there are none.
Normalizer fit_log_normalizer(std::size_t num_nodes, std::span<const Sample> samples, double global_fmax,
                              double f_floor);

// Regression: two sigmoid outputs (a_norm, f_norm) under MSE.
// Classification: softmax over the c+1 labels under CCE; the frequency comes
// from the median training frequency of the predicted label.
enum class Head { Regression, Classification };

const char* to_string(Head h);
Head parse_head(std::string_view s);

struct ModelSpec {
    std::vector<std::size_t> hidden = {30, 30, 30, 30, 30, 30};
    Activation hidden_act = Activation::ReLU;
    Activation output_act = Activation::Sigmoid; // regression head only
    Head head = Head::Regression;
    FreqScale scale = FreqScale::Log;
};

struct Model {
    Head head = Head::Regression;
    Network net;
    Normalizer norm;
    std::vector<double> label_freq; // classification head, indexed by label
};

struct Decision {
    int a = 0;
    double f = 0.0;
};

Model init_model(const ModelSpec& spec, std::size_t num_nodes, std::span<const Sample> samples, double global_fmax,
                 double f_floor, std::uint64_t seed);

std::vector<Example> make_examples(const Model& model, std::span<const Sample> samples);
LossKind model_loss(const Model& model);

Decision predict(const Model& model, std::span<const double> u);

void write_model(std::ostream& os, const Model& model);
Model read_model(std::istream& is);

} // namespace h2o
