#include "h2o/model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "h2o/error.hpp"
#include "h2o/textio.hpp"

namespace h2o {

namespace {

constexpr std::string_view kModelMagic = "h2o-model";
constexpr int kModelVersion = 1;

std::string next_line(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
        auto t = text::trim(line);
        if (!t.empty() && t.front() != '#') return std::string(t);
    }
    throw ConfigError("model file: unexpected end of input");
}

} // namespace

const char* to_string(FreqScale s) { return s == FreqScale::Linear ? "linear" : "log"; }

FreqScale parse_freq_scale(std::string_view s) {
    if (s == "linear") return FreqScale::Linear;
    if (s == "log") return FreqScale::Log;
    throw ConfigError("unknown frequency scale '" + std::string(s) + "'");
}

const char* to_string(Head h) { return h == Head::Regression ? "regression" : "classification"; }

Head parse_head(std::string_view s) {
    if (s == "regression") return Head::Regression;
    if (s == "classification") return Head::Classification;
    throw ConfigError("unknown head '" + std::string(s) + "'");
}

double Normalizer::label_norm(int a) const {
    if (a < 0 || static_cast<std::size_t>(a) > num_nodes) throw ContractError("normalize: label out of range");
    return static_cast<double>(a) / static_cast<double>(num_nodes);
}

int Normalizer::label(double a_norm) const {
    double a = std::nearbyint(a_norm * static_cast<double>(num_nodes));
    if (!std::isfinite(a)) a = 0.0;
    return static_cast<int>(std::clamp(a, 0.0, static_cast<double>(num_nodes)));
}

double Normalizer::freq_norm(double f) const {
    if (!(f > 0.0)) throw ContractError("normalize: frequency must be positive");
    if (scale == FreqScale::Linear) return f / f_hi;
    if (f_hi <= f_lo) return 0.5;
    return std::clamp(std::log(f / f_lo) / std::log(f_hi / f_lo), 0.0, 1.0);
}

double Normalizer::freq(double f_norm) const {
    if (!std::isfinite(f_norm)) f_norm = 0.0;
    if (scale == FreqScale::Linear) return std::clamp(f_norm, f_lo / f_hi, 1.0) * f_hi;
    if (f_hi <= f_lo) return f_lo;
    return f_lo * std::exp(std::clamp(f_norm, 0.0, 1.0) * std::log(f_hi / f_lo));
}

Normalizer linear_normalizer(std::size_t num_nodes, double global_fmax, double f_floor) {
    Normalizer n;
    n.num_nodes = num_nodes;
    n.scale = FreqScale::Linear;
    n.f_lo = f_floor;
    n.f_hi = global_fmax;
    return n;
}

Normalizer fit_log_normalizer(std::size_t num_nodes, std::span<const Sample> samples, double global_fmax,
                              double f_floor) {
    Normalizer n;
    n.num_nodes = num_nodes;
    n.scale = FreqScale::Log;
    double lo = INFINITY, hi = 0.0;
    for (const auto& s : samples) {
        if (s.a == 0) continue;
        lo = std::min(lo, s.f);
        hi = std::max(hi, s.f);
    }
    if (hi == 0.0) {
        lo = f_floor;
        hi = global_fmax;
    }
    n.f_lo = lo;
    n.f_hi = hi;
    return n;
}

Model init_model(const ModelSpec& spec, std::size_t num_nodes, std::span<const Sample> samples, double global_fmax,
                 double f_floor, std::uint64_t seed) {
    if (num_nodes == 0) throw ContractError("init_model: no nodes");
    Model m;
    m.head = spec.head;
    m.norm = spec.scale == FreqScale::Linear ? linear_normalizer(num_nodes, global_fmax, f_floor)
                                             : fit_log_normalizer(num_nodes, samples, global_fmax, f_floor);
    if (spec.head == Head::Regression) {
        m.net = make_network(num_nodes, spec.hidden, spec.hidden_act, 2, spec.output_act, seed);
    } else {
        m.net = make_network(num_nodes, spec.hidden, spec.hidden_act, num_nodes + 1, Activation::Softmax, seed);
        m.label_freq.assign(num_nodes + 1, f_floor);
        for (std::size_t a = 1; a <= num_nodes; ++a) {
            std::vector<double> fs;
            for (const auto& s : samples)
                if (static_cast<std::size_t>(s.a) == a) fs.push_back(s.f);
            if (fs.empty()) continue;
            std::sort(fs.begin(), fs.end());
            m.label_freq[a] = fs[fs.size() / 2];
        }
    }
    return m;
}

LossKind model_loss(const Model& model) { return model.head == Head::Regression ? LossKind::Mse : LossKind::Cce; }

std::vector<Example> make_examples(const Model& model, std::span<const Sample> samples) {
    std::vector<Example> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.u.size() != model.norm.num_nodes) throw ContractError("make_examples: sample width does not match model");
        Example ex;
        ex.x = s.u;
        if (model.head == Head::Regression) {
            auto t = model.norm.normalize(s.a, s.f);
            ex.y.assign(t.begin(), t.end());
        } else {
            ex.y.assign(model.norm.num_nodes + 1, 0.0);
            ex.y[static_cast<std::size_t>(s.a)] = 1.0;
        }
        out.push_back(std::move(ex));
    }
    return out;
}

Decision predict(const Model& model, std::span<const double> u) {
    auto out = forward(model.net, u);
    Decision d;
    if (model.head == Head::Regression) {
        d.a = model.norm.label(out[0]);
        d.f = model.norm.freq(out[1]);
    } else {
        d.a = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
        d.f = model.label_freq[static_cast<std::size_t>(d.a)];
    }
    return d;
}

void write_model(std::ostream& os, const Model& m) {
    os << kModelMagic << ' ' << kModelVersion << '\n';
    os << "head " << to_string(m.head) << '\n';
    os << "normalizer " << m.norm.num_nodes << ' ' << to_string(m.norm.scale) << ' ' << text::fmt(m.norm.f_lo) << ' '
       << text::fmt(m.norm.f_hi) << '\n';
    os << "label_freq";
    for (double f : m.label_freq) os << ' ' << text::fmt(f);
    os << '\n';
    write_network(os, m.net);
}

Model read_model(std::istream& is) {
    auto tok_line = next_line(is);
    auto tok = text::tokens(tok_line);
    if (tok.size() != 2 || tok[0] != kModelMagic) throw ConfigError("model file: bad header '" + tok_line + "'");
    if (text::parse_int(tok[1]) != kModelVersion) throw ConfigError("model file: unsupported version");
    Model m;
    auto line = next_line(is);
    tok = text::tokens(line);
    if (tok.size() != 2 || tok[0] != "head") throw ConfigError("model file: expected head line");
    m.head = parse_head(tok[1]);
    line = next_line(is);
    tok = text::tokens(line);
    if (tok.size() != 5 || tok[0] != "normalizer") throw ConfigError("model file: expected normalizer line");
    m.norm.num_nodes = static_cast<std::size_t>(text::parse_int(tok[1]));
    m.norm.scale = parse_freq_scale(tok[2]);
    m.norm.f_lo = text::parse_double(tok[3]);
    m.norm.f_hi = text::parse_double(tok[4]);
    line = next_line(is);
    tok = text::tokens(line);
    if (tok.empty() || tok[0] != "label_freq") throw ConfigError("model file: expected label_freq line");
    for (std::size_t k = 1; k < tok.size(); ++k) m.label_freq.push_back(text::parse_double(tok[k]));
    m.net = read_network(is);
    if (m.net.input_dim() != m.norm.num_nodes) throw ConfigError("model file: network input width != node count");
    std::size_t want = m.head == Head::Regression ? 2 : m.norm.num_nodes + 1;
    if (m.net.output_dim() != want) throw ConfigError("model file: network output width does not match head");
    if (m.head == Head::Classification && m.label_freq.size() != want)
        throw ConfigError("model file: label_freq length does not match node count");
    return m;
}

} // namespace h2o
