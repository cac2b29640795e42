#include "h2o/upso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "h2o/admission.hpp"
#include "h2o/error.hpp"
#include "h2o/rng.hpp"

namespace h2o {

namespace {

double max_capacity(const Scenario& sc) {
    double hi = 0.0;
    for (const auto& n : sc.nodes) hi = std::max(hi, n.f_max);
    for (const auto& u : sc.ues) hi = std::max(hi, u.f_local_max);
    return hi;
}

double frequency_cap(const Scenario& sc, std::size_t i, int label) {
    return label == 0 ? sc.ues[i].f_local_max : sc.node_for_label(label).f_max;
}

int round_label(double x, std::size_t num_nodes) {
    double r = std::nearbyint(x);
    return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(num_nodes)));
}

} // namespace

void PsoParams::validate() const {
    if (swarm_size < 1) throw ContractError("PsoParams: swarm size must be >= 1");
    if (iterations < 1) throw ContractError("PsoParams: iterations must be >= 1");
    if (!(w_max >= w_min && w_min >= 0.0)) throw ContractError("PsoParams: need w_max >= w_min >= 0");
    if (!(penalty > 0.0)) throw ContractError("PsoParams: penalty must be positive");
    if (!(f_floor > 0.0)) throw ContractError("PsoParams: f_floor must be positive");
    if (init_velocity < 0.0 || init_velocity > 1.0) throw ContractError("PsoParams: init_velocity must lie in [0, 1]");
    if (local_prior < 0.0 || local_prior >= 1.0) throw ContractError("PsoParams: local_prior must lie in [0, 1)");
}

std::size_t roulette_select(std::span<const double> probs, double r) {
    if (probs.empty()) throw ContractError("roulette_select: empty distribution");
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (probs[k] > 0.0) last_positive = k;
        if (acc > r) return k;
    }
    // Cumulative sum fell short of r by rounding.
    return last_positive;
}

Solution decode(std::span<const double> x, const Scenario& sc, const PsoParams& params) {
    const std::size_t n = sc.num_ues();
    if (x.size() != 2 * n) throw ContractError("decode: position length must be 2N");
    Solution s;
    s.a.resize(n);
    s.f.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        int a = round_label(x[i], sc.num_nodes());
        s.a[i] = a;
        if (a == 0) s.f[i] = local_frequency(sc.ues[i], sc.config.local_policy);
        else s.f[i] = std::clamp(x[n + i], params.f_floor, frequency_cap(sc, i, a));
    }
    if (params.decoder == Decoder::Penalty) return s;
    NodeAdmission adm(sc);
    for (std::size_t i = 0; i < n; ++i) {
        if (s.a[i] != 0) adm.try_admit(i, static_cast<std::size_t>(s.a[i] - 1), s.f[i]);
    }
    return adm.to_solution();
}

const char* to_string(Decoder d) { return d == Decoder::Penalty ? "penalty" : "admission"; }

Decoder parse_decoder(std::string_view s) {
    if (s == "penalty") return Decoder::Penalty;
    if (s == "admission") return Decoder::Admission;
    throw ConfigError("unknown decoder '" + std::string(s) + "'");
}

double fitness(const Solution& solution, const Scenario& sc, double penalty) {
    if (solution.size() == 0) return 0.0;
    auto rep = evaluate_solution(sc, solution);
    return rep.total_energy + penalty * static_cast<double>(rep.violated.size());
}

double fitness(const Particle& p, const Scenario& sc, const PsoParams& params) {
    return fitness(decode(p.x, sc, params), sc, params.penalty);
}

double inertia_weight(const PsoParams& params, std::size_t t) {
    return params.w_max - (params.w_max - params.w_min) * static_cast<double>(t) / static_cast<double>(params.iterations);
}

Swarm init_swarm(const MembershipMatrix& u, const Scenario& sc, const PsoParams& params, std::uint64_t seed) {
    params.validate();
    const std::size_t n = sc.num_ues();
    const std::size_t c = sc.num_nodes();
    if (u.rows() != n || u.cols() != c) throw ContractError("init_swarm: U shape does not match the scenario");

    std::vector<std::vector<double>> probs(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto p = selection_probabilities(u, i);
        if (params.local_in_roulette) {
            for (auto& v : p) v *= 1.0 - params.local_prior;
            p.insert(p.begin(), params.local_prior);
        }
        probs[i] = std::move(p);
    }

    Swarm swarm;
    swarm.num_ues = n;
    swarm.particles.resize(params.swarm_size);
    for (std::size_t k = 0; k < params.swarm_size; ++k) {
        Rng rng(seed, Stream::SwarmInit, k);
        Particle& p = swarm.particles[k];
        p.x.assign(2 * n, 0.0);
        p.v.assign(2 * n, 0.0);
        std::vector<std::size_t> count(c + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t pick = roulette_select(probs[i], rng.uniform());
            int label = params.local_in_roulette ? static_cast<int>(pick) : static_cast<int>(pick) + 1;
            p.x[i] = label;
            ++count[static_cast<std::size_t>(label)];
        }
        // Even split of each node's capacity over the UEs that picked it.
        for (std::size_t i = 0; i < n; ++i) {
            int label = static_cast<int>(p.x[i]);
            if (label == 0) p.x[n + i] = local_frequency(sc.ues[i], sc.config.local_policy);
            else p.x[n + i] = sc.node_for_label(label).f_max / static_cast<double>(count[static_cast<std::size_t>(label)]);
        }
        if (params.init_velocity > 0.0) {
            Rng vrng(seed, Stream::SwarmInit, k, 1);
            const double label_span = params.label_vmax * static_cast<double>(c);
            const double freq_span = params.freq_vmax * (max_capacity(sc) - params.f_floor);
            for (std::size_t d = 0; d < 2 * n; ++d) {
                double span = params.init_velocity * (d < n ? label_span : freq_span);
                p.v[d] = vrng.uniform(-span, span);
            }
        }
        p.fit = fitness(p, sc, params);
        p.pbest_x = p.x;
        p.pbest_fit = p.fit;
        if (k == 0 || p.fit < swarm.gbest_fit) {
            swarm.gbest_fit = p.fit;
            swarm.gbest_x = p.x;
        }
    }
    return swarm;
}

void step(Swarm& swarm, std::size_t t, const Scenario& sc, const PsoParams& params, std::uint64_t seed) {
    const std::size_t n = swarm.num_ues;
    const std::size_t c = sc.num_nodes();
    const double w = inertia_weight(params, t);
    const double label_span = params.label_vmax * static_cast<double>(c);
    const double freq_span = params.freq_vmax * (max_capacity(sc) - params.f_floor);

    for (std::size_t k = 0; k < swarm.particles.size(); ++k) {
        Particle& p = swarm.particles[k];
        Rng rng(seed, Stream::SwarmStep, t, k);
        for (std::size_t d = 0; d < 2 * n; ++d) {
            double r1 = rng.uniform();
            double r2 = rng.uniform();
            double v = w * p.v[d] + params.c_cog * r1 * (p.pbest_x[d] - p.x[d]) +
                       params.c_soc * r2 * (swarm.gbest_x[d] - p.x[d]);
            double span = d < n ? label_span : freq_span;
            p.v[d] = std::clamp(v, -span, span);
            p.x[d] += p.v[d];
        }
        for (std::size_t i = 0; i < n; ++i) {
            int label = round_label(p.x[i], c);
            p.x[i] = label;
            p.x[n + i] = std::clamp(p.x[n + i], params.f_floor, frequency_cap(sc, i, label));
        }
        p.fit = fitness(p, sc, params);
        if (p.fit < p.pbest_fit) {
            p.pbest_fit = p.fit;
            p.pbest_x = p.x;
        }
    }
    // Global best is refreshed after the whole swarm moved, in particle order.
    for (const auto& p : swarm.particles) {
        if (p.pbest_fit < swarm.gbest_fit) {
            swarm.gbest_fit = p.pbest_fit;
            swarm.gbest_x = p.pbest_x;
        }
    }
}

PsoResult solve(const Scenario& sc, const PsoParams& params, std::uint64_t seed, double gamma, double tau) {
    params.validate();
    PsoResult res;
    if (sc.num_ues() == 0) {
        res.report = evaluate_solution(sc, res.solution);
        res.trace.assign(params.iterations + 1, 0.0);
        return res;
    }
    auto u = membership_matrix_u(sc, gamma, tau);
    Swarm swarm = init_swarm(u, sc, params, seed);
    res.trace.push_back(swarm.gbest_fit);
    for (std::size_t t = 0; t < params.iterations; ++t) {
        step(swarm, t, sc, params, seed);
        res.trace.push_back(swarm.gbest_fit);
    }
    res.solution = decode(swarm.gbest_x, sc, params);
    res.fitness = swarm.gbest_fit;
    res.report = evaluate_solution(sc, res.solution);
    return res;
}

} // namespace h2o
