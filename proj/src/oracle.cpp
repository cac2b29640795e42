#include "h2o/oracle.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "h2o/admission.hpp"
#include "h2o/error.hpp"

namespace h2o {

OracleResult brute_force_oracle(const Scenario& sc) {
    const std::size_t n = sc.num_ues();
    const std::size_t c = sc.num_nodes();
    if (n > kOracleMaxUes || c > kOracleMaxNodes)
        throw RefusalError("oracle refuses N=" + std::to_string(n) + ", c=" + std::to_string(c) + " (limits N<=" +
                           std::to_string(kOracleMaxUes) + ", c<=" + std::to_string(kOracleMaxNodes) + ")");

    std::vector<double> f_local(n), e_local(n);
    std::vector<bool> local_ok(n);
    for (std::size_t i = 0; i < n; ++i) {
        f_local[i] = local_frequency(sc.ues[i], LocalPolicy::EnergyOpt);
        e_local[i] = local_energy(sc.ues[i].task, f_local[i], sc.config.kappa);
        local_ok[i] = local_deadline_ok(sc.ues[i], f_local[i]);
    }

    OracleResult best;
    best.energy = std::numeric_limits<double>::infinity();
    std::vector<int> a(n, 0);
    std::vector<std::vector<std::size_t>> members(c);
    Solution cand;
    cand.a.resize(n);
    cand.f.resize(n);

    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= c + 1;
    // Index digits with UE 0 most significant, so the scan is lexicographic.
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t i = n; i-- > 0;) {
            a[i] = static_cast<int>(rest % (c + 1));
            rest /= c + 1;
        }
        ++best.enumerated;
        for (auto& m : members) m.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (a[i] > 0) members[static_cast<std::size_t>(a[i] - 1)].push_back(i);

        bool ok = true;
        double energy = 0.0;
        for (std::size_t i = 0; i < n && ok; ++i) {
            if (a[i] != 0) continue;
            ok = local_ok[i];
            cand.a[i] = 0;
            cand.f[i] = f_local[i];
            energy += e_local[i];
        }
        for (std::size_t j = 0; j < c && ok; ++j) {
            if (members[j].empty()) continue;
            auto f = member_min_frequencies(sc, j, members[j]);
            if (!f) {
                ok = false;
                break;
            }
            auto rates = member_rates(sc, j, members[j]);
            double load = 0.0;
            for (std::size_t k = 0; k < members[j].size(); ++k) {
                std::size_t i = members[j][k];
                load += (*f)[k];
                cand.a[i] = a[i];
                cand.f[i] = (*f)[k];
                energy += offload_energy(sc.ues[i].task, rates[k], sc.ues[i].p_tx);
            }
            ok = load <= sc.nodes[j].f_max;
        }
        if (ok) {
            ++best.feasible;
            if (energy < best.energy) {
                best.energy = energy;
                best.solution = cand;
            }
        }
    }
    if (best.feasible == 0) throw std::runtime_error("oracle: no feasible assignment");
    return best;
}

} // namespace h2o
