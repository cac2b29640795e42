#include <doctest.h>

#include <cmath>
#include <limits>

#include "h2o/error.hpp"
#include "h2o/oracle.hpp"
#include "h2o/upso.hpp"
#include "support.hpp"

using namespace h2o;
using namespace h2o::testing;

namespace {

struct ScanResult {
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_a;
    std::size_t feasible = 0;
    std::size_t enumerated = 0;
};

// Plain nested enumeration with rates recomputed per assignment.
ScanResult rescan(const Scenario& sc) {
    const std::size_t n = sc.num_ues(), c = sc.num_nodes();
    ScanResult out;
    std::vector<int> a(n, 0);
    for (;;) {
        ++out.enumerated;
        bool ok = true;
        double energy = 0.0;
        std::vector<double> load(c, 0.0);
        for (std::size_t i = 0; i < n && ok; ++i) {
            const Ue& ue = sc.ues[i];
            if (a[i] == 0) {
                double f = std::min(ue.task.cycles / ue.task.deadline, ue.f_local_max);
                ok = ue.task.cycles / f <= ue.task.deadline * (1 + 1e-9);
                energy += sc.config.kappa * f * f * ue.task.cycles;
                continue;
            }
            const HmecNode& node = sc.nodes[static_cast<std::size_t>(a[i] - 1)];
            double r = std::hypot(ue.pos.x - node.pos.x, ue.pos.y - node.pos.y);
            if (node.kind == NodeKind::UAV && r > node.altitude * std::tan(node.antenna_angle)) {
                ok = false;
                break;
            }
            double gain = node.kind == NodeKind::UAV ? node.fading / (node.altitude * node.altitude + r * r)
                                                     : node.fading / (r * r);
            double interference = 0.0;
            if (node.kind != NodeKind::UAV) {
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == i || a[k] != a[i]) continue;
                    const Ue& o = sc.ues[k];
                    double rk = std::hypot(o.pos.x - node.pos.x, o.pos.y - node.pos.y);
                    interference += o.p_tx * node.fading / (rk * rk);
                }
            }
            double rate = sc.config.bandwidth * std::log2(1 + ue.p_tx * gain / (sc.config.noise_power + interference));
            double slack = ue.task.deadline - ue.task.bits / rate;
            if (slack <= 0) {
                ok = false;
                break;
            }
            load[static_cast<std::size_t>(a[i] - 1)] += ue.task.cycles / slack;
            energy += ue.p_tx * ue.task.bits / rate;
        }
        for (std::size_t j = 0; j < c && ok; ++j) ok = load[j] <= sc.nodes[j].f_max;
        if (ok) {
            ++out.feasible;
            if (energy < out.best) {
                out.best = energy;
                out.best_a = a;
            }
        }
        std::size_t i = n;
        while (i > 0 && a[i - 1] == static_cast<int>(c)) a[--i] = 0;
        if (i == 0) break;
        ++a[i - 1];
    }
    return out;
}

Scenario random_small(Rng& gen, std::size_t n, std::size_t c) {
    SimConfig cfg;
    std::vector<Ue> ues;
    for (std::size_t i = 0; i < n; ++i) ues.push_back(make_ue(i, {gen.uniform(-60, 60), gen.uniform(-60, 60)}, cfg));
    std::vector<HmecNode> nodes;
    for (std::size_t j = 0; j < c; ++j) {
        NodeKind kind = j == 0 ? NodeKind::UAV : (gen.uniform() < 0.5 ? NodeKind::GV : NodeKind::GS);
        double cap = gen.uniform(4e8, 2.5e9);
        nodes.push_back(make_node(j, kind, {gen.uniform(-40, 40), gen.uniform(-40, 40)}, cap, 20.0,
                                  gen.uniform(40.0, 80.0)));
        nodes.back().fading = gen.exponential();
    }
    Scenario sc = make_scenario(ues, nodes, cfg);
    sc.config.deadline = 2.0;
    return sc;
}

} // namespace

TEST_CASE("oracle: unreachable or empty nodes force local") {
    SimConfig cfg;
    Scenario sc = make_scenario({make_ue(0, {200, 0}, cfg)},
                                {make_node(0, NodeKind::UAV, {0, 0}, 1e10, 20.0, 45.0), make_node(1, NodeKind::GS, {0, 0}, 0.0)},
                                cfg);
    auto res = brute_force_oracle(sc);
    CHECK(res.solution.a == std::vector<int>{0});
    CHECK(res.solution.f[0] == 5e8);
    CHECK(res.energy == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(res.enumerated == 3);
    CHECK(res.feasible == 1);
}

TEST_CASE("oracle: a UE beside a roomy GS offloads when that is cheaper") {
    SimConfig cfg;
    Scenario sc = make_scenario({make_ue(0, {1, 0}, cfg)}, {make_node(0, NodeKind::GS, {0, 0}, 1e12)}, cfg);
    double rate = cfg.bandwidth * std::log2(1.0 + cfg.tx_power / cfg.noise_power);
    double e_off = cfg.tx_power * cfg.task_bits / rate;
    double e_loc = cfg.kappa * 5e8 * 5e8 * cfg.task_cycles;
    REQUIRE(e_off < e_loc);
    auto res = brute_force_oracle(sc);
    CHECK(res.solution.a == std::vector<int>{1});
    CHECK(res.energy == doctest::Approx(e_off).epsilon(1e-12));
    CHECK(res.solution.f[0] == doctest::Approx(cfg.task_cycles / (cfg.deadline - cfg.task_bits / rate)).epsilon(1e-12));
}

TEST_CASE("oracle: equal options break towards the smallest label vector") {
    SimConfig cfg;
    Scenario sc = make_scenario({make_ue(0, {0, 3}, cfg)},
                                {make_node(0, NodeKind::GS, {-4, 0}, 1e12), make_node(1, NodeKind::GS, {4, 0}, 1e12)}, cfg);
    CHECK(brute_force_oracle(sc).solution.a == std::vector<int>{1});
}

TEST_CASE("oracle agrees with an independent exhaustive scan") {
    Rng gen(77);
    for (int k = 0; k < 60; ++k) {
        std::size_t n = 1 + gen.index(5), c = 1 + gen.index(3);
        Scenario sc = random_small(gen, n, c);
        if (k % 5 == 0) {
            sc.config.interference = InterferenceMode::CoAssigned;
        }
        auto ref = rescan(sc);
        auto res = brute_force_oracle(sc);
        CHECK(res.enumerated == ref.enumerated);
        CHECK(res.feasible == ref.feasible);
        CHECK(res.solution.a == ref.best_a);
        CHECK(rel_diff(res.energy, ref.best) <= 1e-12);
        auto rep = evaluate_solution(sc, res.solution);
        CHECK(rep.feasible);
        CHECK(rel_diff(rep.total_energy, res.energy) <= 1e-12);
    }
}

TEST_CASE("oracle bounds U-PSO from below") {
    Rng gen(90);
    for (int k = 0; k < 15; ++k) {
        Scenario sc = random_small(gen, 4, 2);
        auto res = brute_force_oracle(sc);
        PsoParams p;
        auto pso = solve(sc, p, gen.next(), 1.0, 2.0);
        auto rep = evaluate_solution(sc, pso.solution);
        if (rep.feasible) CHECK(rep.total_energy >= res.energy * (1 - 1e-12));
    }
}

TEST_CASE("oracle refuses large instances") {
    SimConfig cfg;
    std::vector<Ue> seven;
    for (std::size_t i = 0; i < 7; ++i) seven.push_back(make_ue(i, {double(i), 1}, cfg));
    Scenario big_n = make_scenario(seven, {make_node(0, NodeKind::GS, {0, 0}, 1e12)}, cfg);
    CHECK_THROWS_AS(brute_force_oracle(big_n), RefusalError);
    std::vector<HmecNode> four;
    for (std::size_t j = 0; j < 4; ++j) four.push_back(make_node(j, NodeKind::GS, {double(j), 0}, 1e12));
    Scenario big_c = make_scenario({make_ue(0, {0, 5}, cfg)}, four, cfg);
    CHECK_THROWS_AS(brute_force_oracle(big_c), RefusalError);
    seven.pop_back();
    CHECK_NOTHROW(brute_force_oracle(make_scenario(seven, {make_node(0, NodeKind::GS, {0, 0}, 1e12)}, cfg)));
}
