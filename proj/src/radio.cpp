#include "h2o/radio.hpp"

#include <algorithm>
#include <cmath>

#include "h2o/error.hpp"

namespace h2o {

const char* to_string(ConstraintId id) {
    switch (id) {
    case ConstraintId::Exclusivity: return "EXCLUSIVITY";
    case ConstraintId::Latency: return "LATENCY";
    case ConstraintId::LocalCap: return "LOCAL_CAP";
    case ConstraintId::NodeCap: return "NODE_CAP";
    case ConstraintId::Coverage: return "COVERAGE";
    }
    return "?";
}

bool EvalReport::has(std::size_t ue, ConstraintId id) const {
    return std::any_of(violated.begin(), violated.end(),
                       [&](const Violation& v) { return v.ue == ue && v.constraint == id; });
}

double horizontal_distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double horizontal_distance(const Ue& ue, const HmecNode& node) { return horizontal_distance(ue.pos, node.pos); }

double channel_gain(const Ue& ue, const HmecNode& node) {
    double dx = ue.pos.x - node.pos.x;
    double dy = ue.pos.y - node.pos.y;
    double r2 = dx * dx + dy * dy;
    if (node.kind == NodeKind::UAV) return node.fading / (node.altitude * node.altitude + r2);
    if (r2 == 0.0)
        throw GeometryError("UE " + std::to_string(ue.id) + " coincides with ground node " + std::to_string(node.id));
    return node.fading / r2;
}

double received_power(const Ue& ue, const HmecNode& node) { return ue.p_tx * channel_gain(ue, node); }

double rate_with_interference(const Ue& ue, const HmecNode& node, double interference, const Scenario& sc) {
    double signal = received_power(ue, node);
    double denom = sc.noise_power() + (node.kind == NodeKind::UAV ? 0.0 : std::max(0.0, interference));
    return sc.bandwidth() * std::log2(1.0 + signal / denom);
}

double achievable_rate(const Ue& ue, const HmecNode& node, std::span<const std::size_t> co_channel,
                       const Scenario& sc) {
    double interference = 0.0;
    if (node.kind != NodeKind::UAV) {
        for (auto k : co_channel) {
            const Ue& other = sc.ues.at(k);
            if (other.id == ue.id) throw ContractError("achievable_rate: co-channel set contains the UE itself");
            interference += received_power(other, node);
        }
    }
    return rate_with_interference(ue, node, interference, sc);
}

std::optional<double> min_feasible_frequency(const Task& task, double rate) {
    if (!(rate > 0.0)) throw ContractError("min_feasible_frequency: rate must be positive");
    double remaining = task.deadline - task.bits / rate;
    if (!(remaining > 0.0)) return std::nullopt;
    return task.cycles / remaining;
}

double local_energy(const Task& task, double f_local, double kappa) {
    if (!(f_local > 0.0)) throw ContractError("local_energy: frequency must be positive");
    // Power k f^3 held for F / f seconds.
    return kappa * f_local * f_local * task.cycles;
}

double offload_energy(const Task& task, double rate, double p_tx) {
    if (!(rate > 0.0)) throw ContractError("offload_energy: rate must be positive");
    return p_tx * task.bits / rate;
}

double local_frequency(const Ue& ue, LocalPolicy policy) {
    if (policy == LocalPolicy::Fixed) return ue.f_local_max;
    return std::min(ue.task.cycles / ue.task.deadline, ue.f_local_max);
}

bool local_deadline_ok(const Ue& ue, double f_local) {
    return f_local > 0.0 && ue.task.cycles / f_local <= ue.task.deadline * (1.0 + kFeasibilityRelTol);
}

bool within_coverage(const Ue& ue, const HmecNode& node) {
    if (node.kind != NodeKind::UAV) return true;
    return horizontal_distance(ue, node) <= node.altitude * std::tan(node.antenna_angle);
}

EvalReport evaluate_solution(const Scenario& sc, const Solution& sol) {
    const std::size_t n = sc.num_ues();
    const std::size_t c = sc.num_nodes();
    if (sol.a.size() != n || sol.f.size() != n)
        throw ContractError("evaluate_solution: solution length does not match the UE count");

    EvalReport rep;
    rep.per_ue_energy.assign(n, 0.0);
    rep.per_ue_rate.assign(n, 0.0);

    auto valid_label = [c](int a) { return a >= 0 && static_cast<std::size_t>(a) <= c; };

    // Received power of the co-channel population at each ground node.
    std::vector<double> pooled(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
        const HmecNode& node = sc.nodes[j];
        if (node.kind == NodeKind::UAV) continue;
        for (std::size_t i = 0; i < n; ++i) {
            bool member = sc.config.interference == InterferenceMode::AllUes ||
                          (valid_label(sol.a[i]) && sol.a[i] == static_cast<int>(j) + 1);
            if (member) pooled[j] += received_power(sc.ues[i], node);
        }
    }

    // Capacity: one entry per oversubscribed node, attributed to the UE whose
    // allocation first pushes the running sum (index order) past f_max.
    std::vector<double> load(c, 0.0);
    std::vector<bool> flagged(c, false);
    for (std::size_t i = 0; i < n; ++i) {
        int a = sol.a[i];
        if (a <= 0 || !valid_label(a)) continue;
        auto j = static_cast<std::size_t>(a - 1);
        load[j] += sol.f[i];
        if (!flagged[j] && load[j] > sc.nodes[j].f_max * (1.0 + kFeasibilityRelTol)) {
            flagged[j] = true;
            rep.violated.push_back({i, ConstraintId::NodeCap});
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const Ue& ue = sc.ues[i];
        const int a = sol.a[i];
        const double f = sol.f[i];
        if (!valid_label(a)) {
            rep.violated.push_back({i, ConstraintId::Exclusivity});
            continue;
        }
        if (a == 0) {
            if (!(f > 0.0) || f > ue.f_local_max * (1.0 + kFeasibilityRelTol))
                rep.violated.push_back({i, ConstraintId::LocalCap});
            if (!local_deadline_ok(ue, f)) rep.violated.push_back({i, ConstraintId::Latency});
            if (f > 0.0) rep.per_ue_energy[i] = local_energy(ue.task, f, sc.config.kappa);
            continue;
        }
        ++rep.admitted;
        const HmecNode& node = sc.node_for_label(a);
        if (!within_coverage(ue, node)) rep.violated.push_back({i, ConstraintId::Coverage});
        double interference = 0.0;
        if (node.kind != NodeKind::UAV) interference = pooled[node.id] - received_power(ue, node);
        double rate = rate_with_interference(ue, node, interference, sc);
        rep.per_ue_rate[i] = rate;
        rep.per_ue_energy[i] = offload_energy(ue.task, rate, ue.p_tx);
        bool on_time = f > 0.0 && ue.task.bits / rate + ue.task.cycles / f <=
                                      ue.task.deadline * (1.0 + kFeasibilityRelTol);
        if (!on_time) rep.violated.push_back({i, ConstraintId::Latency});
    }

    for (double e : rep.per_ue_energy) rep.total_energy += e;
    rep.feasible = rep.violated.empty();
    return rep;
}

std::vector<double> interference_dissimilarity(const Scenario& sc, double gamma) {
    const std::size_t n = sc.num_ues();
    const std::size_t c = sc.num_nodes();
    std::vector<double> h(n * c, 0.0);
    std::vector<double> signal(n * c, 0.0);
    std::vector<double> total(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            signal[i * c + j] = received_power(sc.ues[i], sc.nodes[j]);
            total[j] += signal[i * c + j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            double s = signal[i * c + j];
            double interference = 0.0;
            if (sc.nodes[j].kind != NodeKind::UAV) interference = std::max(0.0, total[j] - s);
            h[i * c + j] = (gamma * interference + sc.noise_power()) / s;
        }
    }
    return h;
}

MembershipMatrix membership_matrix_u(const Scenario& sc, double gamma, double tau) {
    if (!(tau > 1.0)) throw ContractError("membership_matrix_u: tau must exceed 1");
    if (gamma < 0.0) throw ContractError("membership_matrix_u: gamma must be non-negative");
    const std::size_t n = sc.num_ues();
    const std::size_t c = sc.num_nodes();
    auto h = interference_dissimilarity(sc, gamma);
    MembershipMatrix u(n, c, MembershipKind::InterferenceU);
    for (std::size_t i = 0; i < n; ++i) fuzzy_row(std::span<const double>(h.data() + i * c, c), tau, u.row(i));
    return u;
}

std::vector<double> selection_probabilities(const MembershipMatrix& u, std::size_t i) {
    if (i >= u.rows()) throw ContractError("selection_probabilities: row out of range");
    auto row = u.row(i);
    double sum = 0.0;
    for (double v : row) {
        if (v < 0.0) throw ContractError("selection_probabilities: negative membership");
        sum += v;
    }
    if (!(sum > 0.0)) throw ContractError("selection_probabilities: all-zero membership row");
    std::vector<double> p(row.begin(), row.end());
    for (auto& v : p) v /= sum;
    return p;
}

} // namespace h2o
