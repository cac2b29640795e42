#include "h2o/admission.hpp"

#include <algorithm>

#include "h2o/error.hpp"

namespace h2o {

std::vector<double> member_rates(const Scenario& sc, std::size_t node_idx, std::span<const std::size_t> members) {
    const HmecNode& node = sc.nodes.at(node_idx);
    std::vector<double> rates(members.size(), 0.0);
    double pooled = 0.0;
    if (node.kind != NodeKind::UAV) {
        if (sc.config.interference == InterferenceMode::AllUes) {
            for (const auto& ue : sc.ues) pooled += received_power(ue, node);
        } else {
            for (auto i : members) pooled += received_power(sc.ues[i], node);
        }
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
        const Ue& ue = sc.ues[members[k]];
        double interference = node.kind == NodeKind::UAV ? 0.0 : pooled - received_power(ue, node);
        rates[k] = rate_with_interference(ue, node, interference, sc);
    }
    return rates;
}

std::optional<std::vector<double>> member_min_frequencies(const Scenario& sc, std::size_t node_idx,
                                                          std::span<const std::size_t> members) {
    const HmecNode& node = sc.nodes.at(node_idx);
    auto rates = member_rates(sc, node_idx, members);
    std::vector<double> f(members.size(), 0.0);
    for (std::size_t k = 0; k < members.size(); ++k) {
        const Ue& ue = sc.ues[members[k]];
        if (!within_coverage(ue, node)) return std::nullopt;
        auto fmin = min_feasible_frequency(ue.task, rates[k]);
        if (!fmin) return std::nullopt;
        f[k] = *fmin;
    }
    return f;
}

NodeAdmission::NodeAdmission(const Scenario& scenario)
    : sc_(scenario), members_(scenario.num_nodes()), requested_(scenario.num_nodes()), freqs_(scenario.num_nodes()) {}

bool NodeAdmission::try_admit(std::size_t ue, std::size_t node, double requested) {
    if (node >= members_.size() || ue >= sc_.num_ues()) throw ContractError("NodeAdmission: index out of range");
    auto trial = members_[node];
    trial.push_back(ue);
    auto f = member_min_frequencies(sc_, node, trial);
    if (!f) return false;
    auto req = requested_[node];
    req.push_back(requested);
    double load = 0.0;
    for (std::size_t k = 0; k < f->size(); ++k) {
        (*f)[k] = std::max((*f)[k], req[k]);
        load += (*f)[k];
    }
    if (load > sc_.nodes[node].f_max) return false;
    members_[node] = std::move(trial);
    requested_[node] = std::move(req);
    freqs_[node] = std::move(*f);
    return true;
}

Solution NodeAdmission::to_solution() const {
    Solution s;
    s.a.assign(sc_.num_ues(), 0);
    s.f.resize(sc_.num_ues());
    for (std::size_t i = 0; i < sc_.num_ues(); ++i) s.f[i] = local_frequency(sc_.ues[i], sc_.config.local_policy);
    for (std::size_t j = 0; j < members_.size(); ++j) {
        for (std::size_t k = 0; k < members_[j].size(); ++k) {
            s.a[members_[j][k]] = static_cast<int>(j) + 1;
            s.f[members_[j][k]] = freqs_[j][k];
        }
    }
    return s;
}

} // namespace h2o
