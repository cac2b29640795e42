#pragma once

// Central finite-difference check of dnn gradients, shared by the unit and
// acceptance suites.

#include <algorithm>
#include <cmath>
#include <vector>

#include "h2o/dnn.hpp"
#include "h2o/rng.hpp"

namespace h2o::testing {

struct GradCase {
    Network net;
    std::vector<Example> batch;
    LossKind loss = LossKind::Mse;
};

// Random depth, widths, activations, loss and batch. Softmax outputs pair
// with either loss; CCE targets are distributions.
inline GradCase random_grad_case(std::uint64_t seed) {
    Rng rng(seed);
    const Activation hidden_acts[] = {Activation::ReLU, Activation::Tanh, Activation::Sigmoid, Activation::Identity};
    const Activation out_acts[] = {Activation::Sigmoid, Activation::Identity, Activation::Softmax, Activation::Tanh};
    std::size_t in = 1 + rng.index(6);
    std::vector<std::size_t> hidden(rng.index(4));
    for (auto& h : hidden) h = 1 + rng.index(8);
    std::size_t out = 1 + rng.index(4);
    Activation out_act = out_acts[rng.index(4)];
    GradCase gc;
    gc.loss = out_act == Activation::Softmax && rng.uniform() < 0.5 ? LossKind::Cce : LossKind::Mse;
    if (gc.loss == LossKind::Cce && out < 2) out = 2;
    gc.net = make_network(in, hidden, hidden_acts[rng.index(4)], out, out_act, seed);
    for (auto& L : gc.net.layers) {
        for (auto& b : L.b) b = rng.uniform(-0.5, 0.5);
        if (rng.uniform() < 0.3) L.act = hidden_acts[rng.index(4)];
    }
    gc.net.layers.back().act = out_act;
    std::size_t n = 1 + rng.index(6);
    for (std::size_t k = 0; k < n; ++k) {
        Example ex;
        for (std::size_t i = 0; i < in; ++i) ex.x.push_back(rng.uniform(-1.5, 1.5));
        if (gc.loss == LossKind::Cce) {
            double s = 0.0;
            for (std::size_t j = 0; j < out; ++j) s += ex.y.emplace_back(rng.uniform());
            for (auto& y : ex.y) y /= s;
        } else {
            for (std::size_t j = 0; j < out; ++j) ex.y.push_back(rng.uniform(-1.0, 1.0));
        }
        gc.batch.push_back(std::move(ex));
    }
    return gc;
}

// True when no ReLU pre-activation in the batch lies within `margin` of 0.
inline bool away_from_kinks(const GradCase& gc, double margin) {
    ForwardCache cache;
    for (const auto& ex : gc.batch) {
        forward(gc.net, ex.x, &cache);
        for (std::size_t l = 0; l < gc.net.layers.size(); ++l) {
            if (gc.net.layers[l].act != Activation::ReLU) continue;
            for (double z : cache.z[l])
                if (std::abs(z) < margin) return false;
        }
    }
    return true;
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over all
// parameters, with central differences of step h.
inline double max_gradient_error(const GradCase& gc, double h = 1e-5, double floor = 1e-7) {
    Gradients g = gradient(gc.net, gc.batch, gc.loss);
    Network net = gc.net;
    double worst = 0.0;
    auto probe = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + h;
        double up = mean_loss(net, gc.batch, gc.loss);
        param = saved - h;
        double down = mean_loss(net, gc.batch, gc.loss);
        param = saved;
        double numeric = (up - down) / (2.0 * h);
        double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        for (std::size_t k = 0; k < net.layers[l].w.size(); ++k) probe(net.layers[l].w[k], g.dw[l][k]);
        for (std::size_t k = 0; k < net.layers[l].b.size(); ++k) probe(net.layers[l].b[k], g.db[l][k]);
    }
    return worst;
}

} // namespace h2o::testing
