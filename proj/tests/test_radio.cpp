#include <doctest.h>

#include <cmath>
#include <numeric>

#include "h2o/error.hpp"
#include "h2o/lsfcm.hpp"
#include "h2o/radio.hpp"
#include "support.hpp"

using namespace h2o;
using namespace h2o::testing;

namespace {

// Energy and rates recomputed straight from the definitions.
double independent_energy(const Scenario& sc, const Solution& sol) {
    double total = 0.0;
    for (std::size_t i = 0; i < sc.num_ues(); ++i) {
        const Ue& u = sc.ues[i];
        if (sol.a[i] == 0) {
            total += sc.config.kappa * std::pow(sol.f[i], 3.0) * (u.task.cycles / sol.f[i]);
            continue;
        }
        const HmecNode& n = sc.nodes[static_cast<std::size_t>(sol.a[i] - 1)];
        auto gain = [&](const Ue& v) {
            double r2 = std::pow(v.pos.x - n.pos.x, 2) + std::pow(v.pos.y - n.pos.y, 2);
            return n.kind == NodeKind::UAV ? n.fading / (n.altitude * n.altitude + r2) : n.fading / r2;
        };
        double interference = 0.0;
        if (n.kind != NodeKind::UAV)
            for (std::size_t k = 0; k < sc.num_ues(); ++k)
                if (k != i && sol.a[k] == sol.a[i]) interference += sc.ues[k].p_tx * gain(sc.ues[k]);
        double rate = sc.config.bandwidth * std::log2(1.0 + u.p_tx * gain(u) / (interference + sc.config.noise_power));
        total += u.p_tx * u.task.bits / rate;
    }
    return total;
}

Scenario random_placed(Rng& gen, std::size_t n_lo, std::size_t n_hi, std::uint64_t seed) {
    SimConfig cfg = random_config(gen, n_lo, n_hi);
    return place_nodes(generate_scenario(cfg, seed), LsfcmParams{});
}

} // namespace

TEST_CASE("horizontal distance") {
    CHECK(horizontal_distance(Point{0, 0}, Point{3, 4}) == 5.0);
    CHECK(horizontal_distance(Point{50, 50}, Point{50, 50}) == 0.0);
    CHECK(horizontal_distance(make_ue(0, {0, 0}), make_node(0, NodeKind::GS, {50, 50}, 1e12)) ==
          doctest::Approx(70.7107).epsilon(1e-6));
}

TEST_CASE("channel gain") {
    Ue origin = make_ue(0, {0, 0});
    CHECK(channel_gain(origin, make_node(0, NodeKind::UAV, {0, 0}, 1e10, 20.0)) == doctest::Approx(0.0025));
    CHECK(channel_gain(origin, make_node(0, NodeKind::GS, {10, 0}, 1e12)) == doctest::Approx(0.01));
    HmecNode uav = make_node(0, NodeKind::UAV, {21.0238, 0}, 1e10, 20.0);
    uav.fading = 2.0;
    CHECK(channel_gain(origin, uav) == doctest::Approx(2.375e-3).epsilon(1e-4));
    CHECK_THROWS_AS(channel_gain(origin, make_node(0, NodeKind::GS, {0, 0}, 1e12)), GeometryError);
    CHECK_THROWS_AS(channel_gain(origin, make_node(0, NodeKind::GV, {0, 0}, 1e11)), GeometryError);
}

TEST_CASE("achievable rate") {
    // alpha / R^2 = 1e-7 / 100 = 1e-9, so SNR = 1 at sigma^2 = 1e-9.
    HmecNode gs = make_node(0, NodeKind::GS, {10, 0}, 1e12);
    gs.fading = 1e-7;
    Scenario sc = make_scenario({make_ue(0, {0, 0}), make_ue(1, {20, 0})}, {gs});
    const Ue& u = sc.ues[0];
    CHECK(achievable_rate(u, sc.nodes[0], {}, sc) == doctest::Approx(1e6));
    std::vector<std::size_t> co{1};
    CHECK(achievable_rate(u, sc.nodes[0], co, sc) == doctest::Approx(1e6 * std::log2(1.5)));
    CHECK(achievable_rate(u, sc.nodes[0], co, sc) == doctest::Approx(5.8496e5).epsilon(1e-4));
    std::vector<std::size_t> self{0};
    CHECK_THROWS_AS(achievable_rate(u, sc.nodes[0], self, sc), ContractError);

    Scenario air = make_scenario({make_ue(0, {0, 0}), make_ue(1, {5, 0})}, {make_node(0, NodeKind::UAV, {0, 0}, 1e10, 20)});
    CHECK(achievable_rate(air.ues[0], air.nodes[0], co, air) == achievable_rate(air.ues[0], air.nodes[0], {}, air));
}

TEST_CASE("minimum feasible frequency") {
    Task t{1e9, 8e5, 2.0};
    auto f = min_feasible_frequency(t, 1e6);
    REQUIRE(f);
    CHECK(*f == doctest::Approx(1e9 / 1.2));
    CHECK(*f == doctest::Approx(8.3333e8).epsilon(1e-4));
    CHECK_FALSE(min_feasible_frequency(t, 4e5));
    CHECK_FALSE(min_feasible_frequency(t, 3e5));
    Task empty{1e9, 0.0, 2.0};
    CHECK(*min_feasible_frequency(empty, 1e6) == doctest::Approx(5e8));
    CHECK_THROWS_AS(min_feasible_frequency(t, 0.0), ContractError);
}

TEST_CASE("local and offload energy") {
    Task t{1e9, 8e5, 2.0};
    CHECK(local_energy(t, 1e9) == doctest::Approx(1.0));
    CHECK(local_energy(t, 5e8) == doctest::Approx(0.25));
    CHECK(local_energy(Task{0.0, 8e5, 2.0}, 5e8) == 0.0);
    CHECK(offload_energy(t, 1e6, 1.0) == doctest::Approx(0.8));
    CHECK(offload_energy(Task{1e9, 0.0, 2.0}, 1e6, 1.0) == 0.0);
    for (double r : {1e5, 3.7e6, 2e7}) CHECK(offload_energy(t, 2 * r, 1.0) == offload_energy(t, r, 1.0) / 2);
}

TEST_CASE("evaluate_solution: all local at the energy-optimal frequency") {
    SimConfig cfg;
    cfg.num_ue = 10;
    Scenario sc = generate_scenario(cfg, 1);
    Solution sol = Solution::all_local(10);
    for (auto& f : sol.f) f = 5e8;
    auto rep = evaluate_solution(sc, sol);
    CHECK(rep.feasible);
    CHECK(rep.violated.empty());
    CHECK(rep.total_energy == doctest::Approx(2.5));
    CHECK(rep.admitted == 0);
}

TEST_CASE("evaluate_solution: capacity and coverage violations") {
    Scenario sc = make_scenario({make_ue(0, {0, 0}), make_ue(1, {50, 0})},
                                {make_node(0, NodeKind::GS, {5, 0}, 1e9), make_node(1, NodeKind::UAV, {0, 0}, 1e10, 20.0, 45.0)});
    Solution over{{1, 0}, {2e9, 5e8}};
    auto rep = evaluate_solution(sc, over);
    CHECK(rep.has(0, ConstraintId::NodeCap));
    CHECK_FALSE(rep.feasible);

    Solution far{{0, 2}, {5e8, 5e9}};
    rep = evaluate_solution(sc, far);
    CHECK(rep.has(1, ConstraintId::Coverage)); // 50 > 20 tan 45 = 20
    CHECK_FALSE(rep.has(0, ConstraintId::Coverage));

    Solution bad_label{{3, 0}, {1e9, 5e8}};
    CHECK(evaluate_solution(sc, bad_label).has(0, ConstraintId::Exclusivity));

    Solution too_fast{{0, 0}, {2e9, 5e8}};
    CHECK(evaluate_solution(sc, too_fast).has(0, ConstraintId::LocalCap));

    Solution too_slow{{0, 0}, {4e8, 5e8}};
    CHECK(evaluate_solution(sc, too_slow).has(0, ConstraintId::Latency));

    CHECK_THROWS_AS(evaluate_solution(sc, Solution::all_local(3)), ContractError);
}

TEST_CASE("evaluate_solution: feasible iff nothing violated, totals add up") {
    Rng gen(21);
    for (int trial = 0; trial < 60; ++trial) {
        Scenario sc = random_placed(gen, 1, 25, 300 + trial);
        const int c = static_cast<int>(sc.num_nodes());
        Solution sol = Solution::all_local(sc.num_ues());
        for (std::size_t i = 0; i < sc.num_ues(); ++i) {
            sol.a[i] = static_cast<int>(gen.index(static_cast<std::size_t>(c) + 1));
            sol.f[i] = sol.a[i] == 0 ? gen.uniform(4e8, 1e9) : gen.uniform(1e8, 5e9);
        }
        auto rep = evaluate_solution(sc, sol);
        CHECK(rep.feasible == rep.violated.empty());
        CHECK(rel_diff(rep.total_energy, std::accumulate(rep.per_ue_energy.begin(), rep.per_ue_energy.end(), 0.0)) <=
              1e-12);
        CHECK(rel_diff(rep.total_energy, independent_energy(sc, sol)) <= 1e-12);
    }
}

TEST_CASE("rate falls as an interferer gets louder; UAV rates ignore interferers") {
    Rng gen(8);
    for (int trial = 0; trial < 100; ++trial) {
        HmecNode gv = make_node(0, NodeKind::GV, {gen.uniform(-50, 50), gen.uniform(-50, 50)}, 1e11);
        Scenario sc = make_scenario({make_ue(0, {gen.uniform(-90, 90), gen.uniform(-90, 90)}),
                                     make_ue(1, {gen.uniform(-90, 90), gen.uniform(-90, 90)})},
                                    {gv, make_node(1, NodeKind::UAV, {0, 0}, 1e10, 20.0)});
        std::vector<std::size_t> co{1};
        double before = achievable_rate(sc.ues[0], sc.nodes[0], co, sc);
        sc.ues[1].p_tx *= gen.uniform(1.5, 10.0);
        CHECK(achievable_rate(sc.ues[0], sc.nodes[0], co, sc) < before);
        CHECK(achievable_rate(sc.ues[0], sc.nodes[1], co, sc) == achievable_rate(sc.ues[0], sc.nodes[1], {}, sc));
    }
}

TEST_CASE("minimum feasible frequency meets the deadline exactly") {
    Rng gen(13);
    for (int trial = 0; trial < 200; ++trial) {
        Task t{gen.uniform(1e8, 5e9), gen.uniform(1e4, 2e6), gen.uniform(0.5, 4.0)};
        double rate = gen.uniform(1e5, 5e7);
        auto f = min_feasible_frequency(t, rate);
        if (t.bits / rate >= t.deadline) {
            CHECK_FALSE(f);
            continue;
        }
        REQUIRE(f);
        CHECK(rel_diff(t.bits / rate + t.cycles / *f, t.deadline) <= 1e-9);
        CHECK(t.bits / rate + t.cycles / (*f * (1.0 - 1e-6)) > t.deadline);
    }
}

TEST_CASE("coverage check matches the closed form") {
    Rng gen(17);
    for (int trial = 0; trial < 300; ++trial) {
        double h = gen.uniform(10, 60);
        double phi = gen.uniform(20, 85);
        double r = gen.uniform(0, 2.0 * h * std::tan(phi * kDeg));
        Scenario sc = make_scenario({make_ue(0, {r, 0})}, {make_node(0, NodeKind::UAV, {0, 0}, 1e12, h, phi)});
        Solution sol{{1}, {1e11}};
        auto rep = evaluate_solution(sc, sol);
        CHECK(rep.has(0, ConstraintId::Coverage) == (r > h * std::tan(sc.nodes[0].antenna_angle)));
    }
}

TEST_CASE("all-UE interference mode counts unassigned UEs") {
    Scenario sc = make_scenario({make_ue(0, {0, 0}), make_ue(1, {12, 0})}, {make_node(0, NodeKind::GS, {5, 0}, 1e12)});
    Solution sol{{1, 0}, {1e9, 5e8}};
    double co = evaluate_solution(sc, sol).per_ue_rate[0];
    sc.config.interference = InterferenceMode::AllUes;
    double all = evaluate_solution(sc, sol).per_ue_rate[0];
    CHECK(all < co);
    std::vector<std::size_t> one{1};
    CHECK(all == doctest::Approx(achievable_rate(sc.ues[0], sc.nodes[0], one, sc)));
}

TEST_CASE("fuzzy rows from dissimilarities") {
    std::vector<double> out(3);
    std::vector<double> h{1.0, 2.0, 4.0};
    fuzzy_row(h, 2.0, out);
    CHECK(out[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
    CHECK(out[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-12));

    std::vector<double> eq{3.0, 3.0}, o2(2);
    fuzzy_row(eq, 2.0, o2);
    CHECK(o2[0] == doctest::Approx(0.5));
    CHECK(o2[1] == doctest::Approx(0.5));

    double prev = 0.0;
    for (double d : {1e-1, 1e-3, 1e-6, 1e-12}) {
        std::vector<double> lim{d, 1.0};
        fuzzy_row(lim, 2.0, o2);
        CHECK(o2[0] > prev);
        prev = o2[0];
    }
    CHECK(prev > 1.0 - 1e-9);
    std::vector<double> zero{0.0, 1.0};
    fuzzy_row(zero, 2.0, o2);
    CHECK(o2[0] == 1.0);
    CHECK(o2[1] == 0.0);
}

TEST_CASE("fuzzy rows are scale invariant") {
    Rng gen(4);
    for (int trial = 0; trial < 200; ++trial) {
        auto h = random_vector(gen, 5, 1e-6, 1e3);
        double k = std::exp(gen.uniform(-20, 20));
        std::vector<double> scaled(h);
        for (auto& v : scaled) v *= k;
        std::vector<double> a(5), b(5);
        fuzzy_row(h, 2.0, a);
        fuzzy_row(scaled, 2.0, b);
        for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-12);
    }
}

TEST_CASE("interference membership: symmetric nodes split evenly") {
    Scenario sc = make_scenario({make_ue(0, {0, 0})}, {make_node(0, NodeKind::UAV, {10, 0}, 1e10, 20.0),
                                                      make_node(1, NodeKind::UAV, {-10, 0}, 1e10, 20.0)});
    auto u = membership_matrix_u(sc, 1.0, 2.0);
    CHECK(u.kind() == MembershipKind::InterferenceU);
    CHECK(u(0, 0) == doctest::Approx(0.5));
    CHECK(u(0, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(membership_matrix_u(sc, 1.0, 1.0), ContractError);
    CHECK_THROWS_AS(membership_matrix_u(sc, -1.0, 2.0), ContractError);
}

TEST_CASE("interference membership matches a direct evaluation") {
    Rng gen(31);
    for (int trial = 0; trial < 40; ++trial) {
        Scenario sc = random_placed(gen, 2, 30, 500 + trial);
        double gamma = gen.uniform(0.0, 2.0);
        auto u = membership_matrix_u(sc, gamma, 2.0);
        const std::size_t c = sc.num_nodes();
        for (std::size_t i = 0; i < sc.num_ues(); ++i) {
            std::vector<double> h(c);
            for (std::size_t j = 0; j < c; ++j) {
                double s = sc.ues[i].p_tx * channel_gain(sc.ues[i], sc.nodes[j]);
                double interference = 0.0;
                if (sc.nodes[j].kind != NodeKind::UAV)
                    for (std::size_t k = 0; k < sc.num_ues(); ++k)
                        if (k != i) interference += sc.ues[k].p_tx * channel_gain(sc.ues[k], sc.nodes[j]);
                h[j] = (gamma * interference + sc.config.noise_power) / s;
            }
            double row = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
                double denom = 0.0;
                for (std::size_t k = 0; k < c; ++k) denom += h[j] / h[k];
                CHECK(rel_diff(u(i, j), 1.0 / denom) <= 1e-9);
                CHECK(u(i, j) >= 0.0);
                CHECK(u(i, j) <= 1.0);
                row += u(i, j);
            }
            CHECK(std::abs(row - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("selection probabilities") {
    MembershipMatrix u(2, 3, MembershipKind::InterferenceU);
    u(0, 0) = 4.0 / 7.0;
    u(0, 1) = 2.0 / 7.0;
    u(0, 2) = 1.0 / 7.0;
    auto p = selection_probabilities(u, 0);
    CHECK(p[0] == doctest::Approx(4.0 / 7.0));
    CHECK(p[1] == doctest::Approx(2.0 / 7.0));
    CHECK(p[2] == doctest::Approx(1.0 / 7.0));
    CHECK_THROWS_AS(selection_probabilities(u, 1), ContractError);
    CHECK_THROWS_AS(selection_probabilities(u, 2), ContractError);

    MembershipMatrix half(1, 2, MembershipKind::InterferenceU);
    half(0, 0) = half(0, 1) = 0.5;
    auto q = selection_probabilities(half, 0);
    CHECK(q[0] == 0.5);
    CHECK(q[1] == 0.5);
}
