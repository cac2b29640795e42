#include "h2o/dnn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "h2o/error.hpp"
#include "h2o/rng.hpp"
#include "h2o/textio.hpp"

namespace h2o {

namespace {

constexpr std::string_view kNetworkMagic = "h2o-network";
constexpr int kNetworkVersion = 1;

// d(loss)/d(prediction) for a single example.
std::vector<double> loss_gradient(LossKind kind, std::span<const double> t, std::span<const double> p) {
    std::vector<double> g(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (kind == LossKind::Mse) {
            g[k] = 2.0 * (p[k] - t[k]);
        } else if (p[k] > kCceEpsilon) {
            g[k] = -t[k] / p[k];
        }
        // Clamped CCE entries are constant in p, so their derivative is zero.
    }
    return g;
}

// Backpropagates d(loss)/d(r) through the activation to d(loss)/d(z).
void activation_backward(Activation a, std::span<const double> z, std::span<const double> r, std::vector<double>& g) {
    switch (a) {
    case Activation::ReLU:
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = z[k] > 0.0 ? g[k] : 0.0;
        break;
    case Activation::Tanh:
        for (std::size_t k = 0; k < g.size(); ++k) g[k] *= 1.0 - r[k] * r[k];
        break;
    case Activation::Sigmoid:
        for (std::size_t k = 0; k < g.size(); ++k) g[k] *= r[k] * (1.0 - r[k]);
        break;
    case Activation::Softmax: {
        double dot = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) dot += g[k] * r[k];
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = r[k] * (g[k] - dot);
        break;
    }
    case Activation::Identity:
        break;
    }
}

void require_finite(double v, const std::string& where) {
    if (!std::isfinite(v)) throw DivergenceError(where + ": non-finite loss " + text::fmt(v));
}

std::string read_line(std::istream& is, const char* what) {
    std::string line;
    while (std::getline(is, line)) {
        auto t = text::trim(line);
        if (!t.empty() && t.front() != '#') return std::string(t);
    }
    throw ConfigError(std::string("network file: unexpected end of input, expected ") + what);
}

std::vector<std::string_view> expect(std::string&&, std::string_view, std::size_t) = delete;

std::vector<std::string_view> expect(const std::string& line, std::string_view key, std::size_t fields) {
    auto tok = text::tokens(line);
    if (tok.empty() || tok[0] != key || tok.size() != fields + 1)
        throw ConfigError("network file: expected '" + std::string(key) + "' line, got '" + line + "'");
    return tok;
}

} // namespace

const char* to_string(Activation a) {
    switch (a) {
    case Activation::ReLU: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
    case Activation::Identity: return "identity";
    }
    return "?";
}

Activation parse_activation(std::string_view s) {
    for (auto a : {Activation::ReLU, Activation::Tanh, Activation::Sigmoid, Activation::Softmax, Activation::Identity})
        if (s == to_string(a)) return a;
    throw ConfigError("unknown activation '" + std::string(s) + "'");
}

const char* to_string(LossKind l) { return l == LossKind::Mse ? "mse" : "cce"; }

LossKind parse_loss(std::string_view s) {
    if (s == "mse") return LossKind::Mse;
    if (s == "cce") return LossKind::Cce;
    throw ConfigError("unknown loss '" + std::string(s) + "'");
}

std::size_t Network::num_params() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

void Network::validate() const {
    if (layers.empty()) throw ContractError("network has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& L = layers[l];
        if (L.in == 0 || L.out == 0) throw ContractError("network layer " + std::to_string(l) + " has a zero dimension");
        if (L.w.size() != L.in * L.out || L.b.size() != L.out)
            throw ContractError("network layer " + std::to_string(l) + " parameter sizes do not match its shape");
        if (l > 0 && layers[l - 1].out != L.in)
            throw ContractError("network layer " + std::to_string(l) + " input does not chain with the previous layer");
    }
}

Network make_network(std::size_t input_dim, std::span<const std::size_t> hidden, Activation hidden_act,
                     std::size_t output_dim, Activation output_act, std::uint64_t seed) {
    Network net;
    std::vector<std::size_t> dims{input_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(output_dim);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer L;
        L.in = dims[l];
        L.out = dims[l + 1];
        L.act = l + 2 == dims.size() ? output_act : hidden_act;
        L.w.resize(L.in * L.out);
        L.b.assign(L.out, 0.0);
        const double limit = std::sqrt(6.0 / static_cast<double>(L.in + L.out));
        Rng rng(seed, Stream::NetInit, l);
        for (auto& w : L.w) w = rng.uniform(-limit, limit);
        net.layers.push_back(std::move(L));
    }
    net.validate();
    return net;
}

std::vector<double> activate(Activation a, std::span<const double> z) {
    std::vector<double> r(z.begin(), z.end());
    switch (a) {
    case Activation::ReLU:
        for (auto& v : r) v = std::max(0.0, v);
        break;
    case Activation::Tanh:
        for (auto& v : r) v = std::tanh(v);
        break;
    case Activation::Sigmoid:
        for (auto& v : r) v = 1.0 / (1.0 + std::exp(-v));
        break;
    case Activation::Softmax: {
        if (r.empty()) break;
        const double hi = *std::max_element(r.begin(), r.end());
        double sum = 0.0;
        for (auto& v : r) {
            v = std::exp(v - hi);
            sum += v;
        }
        for (auto& v : r) v /= sum;
        break;
    }
    case Activation::Identity:
        break;
    }
    return r;
}

std::vector<double> forward(const Network& net, std::span<const double> input, ForwardCache* cache) {
    if (input.size() != net.input_dim())
        throw ContractError("forward: input has " + std::to_string(input.size()) + " entries, network expects " +
                            std::to_string(net.input_dim()));
    std::vector<double> r(input.begin(), input.end());
    if (cache) {
        cache->z.clear();
        cache->r.clear();
        cache->r.push_back(r);
    }
    for (const Layer& L : net.layers) {
        std::vector<double> z(L.b);
        for (std::size_t o = 0; o < L.out; ++o) {
            const double* row = &L.w[o * L.in];
            double acc = 0.0;
            for (std::size_t i = 0; i < L.in; ++i) acc += row[i] * r[i];
            z[o] += acc;
        }
        r = activate(L.act, z);
        if (cache) {
            cache->z.push_back(std::move(z));
            cache->r.push_back(r);
        }
    }
    return r;
}

double loss(LossKind kind, std::span<const double> target, std::span<const double> prediction) {
    if (target.size() != prediction.size()) throw ContractError("loss: target and prediction sizes differ");
    double s = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) {
        if (kind == LossKind::Mse) {
            double d = prediction[k] - target[k];
            s += d * d;
        } else if (target[k] != 0.0) {
            s -= target[k] * std::log(std::max(prediction[k], kCceEpsilon));
        }
    }
    return s;
}

Gradients gradient(const Network& net, std::span<const Example* const> batch, LossKind kind) {
    if (batch.empty()) throw ContractError("gradient: empty batch");
    Gradients g;
    g.dw.resize(net.layers.size());
    g.db.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        g.dw[l].assign(net.layers[l].w.size(), 0.0);
        g.db[l].assign(net.layers[l].b.size(), 0.0);
    }
    ForwardCache cache;
    for (const Example* ex : batch) {
        auto out = forward(net, ex->x, &cache);
        if (ex->y.size() != out.size()) throw ContractError("gradient: target size does not match network output");
        g.loss += loss(kind, ex->y, out);
        std::vector<double> delta = loss_gradient(kind, ex->y, out);
        for (std::size_t l = net.layers.size(); l-- > 0;) {
            const Layer& L = net.layers[l];
            activation_backward(L.act, cache.z[l], cache.r[l + 1], delta);
            const auto& input = cache.r[l];
            for (std::size_t o = 0; o < L.out; ++o) {
                g.db[l][o] += delta[o];
                double* row = &g.dw[l][o * L.in];
                for (std::size_t i = 0; i < L.in; ++i) row[i] += delta[o] * input[i];
            }
            if (l == 0) break;
            std::vector<double> prev(L.in, 0.0);
            for (std::size_t o = 0; o < L.out; ++o) {
                const double* row = &L.w[o * L.in];
                for (std::size_t i = 0; i < L.in; ++i) prev[i] += row[i] * delta[o];
            }
            delta = std::move(prev);
        }
    }
    const double scale = 1.0 / static_cast<double>(batch.size());
    g.loss *= scale;
    for (auto& v : g.dw)
        for (auto& x : v) x *= scale;
    for (auto& v : g.db)
        for (auto& x : v) x *= scale;
    return g;
}

Gradients gradient(const Network& net, std::span<const Example> batch, LossKind kind) {
    std::vector<const Example*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& ex : batch) ptrs.push_back(&ex);
    return gradient(net, std::span<const Example* const>(ptrs), kind);
}

double mean_loss(const Network& net, std::span<const Example> data, LossKind kind) {
    if (data.empty()) return 0.0;
    double s = 0.0;
    for (const auto& ex : data) s += loss(kind, ex.y, forward(net, ex.x));
    return s / static_cast<double>(data.size());
}

void TrainParams::validate() const {
    if (!(learning_rate >= 0.0)) throw ConfigError("learning rate must be >= 0");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw ConfigError("train fraction must lie in (0, 1]");
}

double TrainReport::min_test_loss() const {
    double m = INFINITY;
    for (const auto& e : epochs) m = std::min(m, e.test_loss);
    return m;
}

double TrainReport::fraction_errors_within(double bound) const {
    if (test_abs_errors.empty()) return 0.0;
    auto n = std::count_if(test_abs_errors.begin(), test_abs_errors.end(), [&](double e) { return e <= bound; });
    return static_cast<double>(n) / static_cast<double>(test_abs_errors.size());
}

TrainReport train(Network& net, std::span<const Example> data, const TrainParams& params) {
    params.validate();
    net.validate();
    if (data.empty()) throw ContractError("train: empty dataset");

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(params.seed, Stream::Shuffle, 0);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[split_rng.index(i)]);
    auto n_train = static_cast<std::size_t>(std::llround(params.train_fraction * static_cast<double>(data.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, data.size());

    std::vector<Example> train_set, test_set;
    for (std::size_t k = 0; k < order.size(); ++k) (k < n_train ? train_set : test_set).push_back(data[order[k]]);

    TrainReport rep;
    rep.train_size = train_set.size();
    rep.test_size = test_set.size();

    std::vector<const Example*> batch;
    std::vector<std::size_t> idx(train_set.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t epoch = 1; epoch <= params.epochs; ++epoch) {
        Rng rng(params.seed, Stream::Shuffle, epoch);
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
        for (std::size_t start = 0; start < idx.size(); start += params.batch_size) {
            batch.clear();
            for (std::size_t k = start; k < std::min(idx.size(), start + params.batch_size); ++k)
                batch.push_back(&train_set[idx[k]]);
            Gradients g = gradient(net, std::span<const Example* const>(batch), params.loss);
            require_finite(g.loss, "epoch " + std::to_string(epoch));
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                Layer& L = net.layers[l];
                for (std::size_t k = 0; k < L.w.size(); ++k) L.w[k] -= params.learning_rate * g.dw[l][k];
                for (std::size_t k = 0; k < L.b.size(); ++k) L.b[k] -= params.learning_rate * g.db[l][k];
            }
        }
        EpochStats st;
        st.epoch = epoch;
        st.train_loss = mean_loss(net, train_set, params.loss);
        st.test_loss = test_set.empty() ? st.train_loss : mean_loss(net, test_set, params.loss);
        require_finite(st.train_loss, "epoch " + std::to_string(epoch) + " train");
        require_finite(st.test_loss, "epoch " + std::to_string(epoch) + " test");
        rep.epochs.push_back(st);
    }

    const auto& eval = test_set.empty() ? train_set : test_set;
    for (const auto& ex : eval) {
        auto out = forward(net, ex.x);
        for (std::size_t k = 0; k < out.size(); ++k) rep.test_abs_errors.push_back(std::abs(out[k] - ex.y[k]));
    }
    return rep;
}

void write_train_report_csv(std::ostream& os, const TrainReport& report) {
    os << "epoch,train_loss,test_loss\n";
    for (const auto& e : report.epochs)
        os << e.epoch << ',' << text::fmt(e.train_loss) << ',' << text::fmt(e.test_loss) << '\n';
}

void write_network(std::ostream& os, const Network& net) {
    net.validate();
    os << kNetworkMagic << ' ' << kNetworkVersion << '\n';
    os << "layers " << net.layers.size() << '\n';
    for (const Layer& L : net.layers) {
        os << "layer " << L.in << ' ' << L.out << ' ' << to_string(L.act) << '\n';
        os << "w " << text::fmt(L.w, ' ') << '\n';
        os << "b " << text::fmt(L.b, ' ') << '\n';
    }
    os << "end-network\n";
}

Network read_network(std::istream& is) {
    const std::string head_line = read_line(is, "header");
    auto head = expect(head_line, kNetworkMagic, 1);
    if (text::parse_int(head[1]) != kNetworkVersion)
        throw ConfigError("network file: unsupported version " + std::string(head[1]));
    const std::string count_line = read_line(is, "layers");
    auto count = text::parse_int(expect(count_line, "layers", 1)[1]);
    if (count < 1) throw ConfigError("network file: layer count must be >= 1");
    Network net;
    for (long long l = 0; l < count; ++l) {
        const std::string layer_line = read_line(is, "layer");
        auto tok = expect(layer_line, "layer", 3);
        Layer L;
        L.in = static_cast<std::size_t>(text::parse_int(tok[1]));
        L.out = static_cast<std::size_t>(text::parse_int(tok[2]));
        L.act = parse_activation(tok[3]);
        for (const char* key : {"w", "b"}) {
            auto line = read_line(is, key);
            auto vals = text::tokens(line);
            if (vals.empty() || vals[0] != key) throw ConfigError("network file: expected '" + std::string(key) + "' line");
            auto& dst = std::string_view(key) == "w" ? L.w : L.b;
            for (std::size_t k = 1; k < vals.size(); ++k) dst.push_back(text::parse_double(vals[k]));
        }
        net.layers.push_back(std::move(L));
    }
    if (read_line(is, "end-network") != "end-network") throw ConfigError("network file: missing end-network");
    try {
        net.validate();
    } catch (const ContractError& e) {
        throw ConfigError(std::string("network file: ") + e.what());
    }
    return net;
}

} // namespace h2o
