#include "h2o/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "h2o/admission.hpp"
#include "h2o/rng.hpp"

namespace h2o {

Solution local_only(const Scenario& sc) {
    Solution s = Solution::all_local(sc.num_ues());
    for (std::size_t i = 0; i < sc.num_ues(); ++i) s.f[i] = local_frequency(sc.ues[i], sc.config.local_policy);
    return s;
}

Solution random_offload(const Scenario& sc, std::uint64_t seed) {
    NodeAdmission adm(sc);
    if (sc.num_nodes() == 0) return adm.to_solution();
    Rng rng(seed, Stream::RandomPolicy);
    for (std::size_t i = 0; i < sc.num_ues(); ++i) {
        std::size_t j = std::min(rng.index(sc.num_nodes()), sc.num_nodes() - 1);
        adm.try_admit(i, j);
    }
    return adm.to_solution();
}

std::size_t nearest_node(const Scenario& sc, std::size_t ue) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < sc.num_nodes(); ++j) {
        const auto& node = sc.nodes[j];
        double r = horizontal_distance(sc.ues[ue], node);
        double d = node.kind == NodeKind::UAV ? std::hypot(r, node.altitude) : r;
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

Solution greedy_offload(const Scenario& sc) {
    NodeAdmission adm(sc);
    const std::size_t c = sc.num_nodes();
    std::vector<std::vector<std::size_t>> contenders(c);
    for (std::size_t i = 0; i < sc.num_ues(); ++i) contenders[nearest_node(sc, i)].push_back(i);

    for (std::size_t j = 0; j < c; ++j) {
        std::vector<std::pair<double, std::size_t>> keyed;
        for (auto i : contenders[j]) {
            std::size_t alone[] = {i};
            auto f = member_min_frequencies(sc, j, alone);
            if (f) keyed.emplace_back((*f)[0], i);
        }
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [f, i] : keyed) adm.try_admit(i, j);
    }
    return adm.to_solution();
}

} // namespace h2o
