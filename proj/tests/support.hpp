#pragma once

// Hand-built fixtures and seeded generators shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "h2o/rng.hpp"
#include "h2o/scenario.hpp"

namespace h2o::testing {

inline constexpr double kDeg = 3.14159265358979323846 / 180.0;

inline Ue make_ue(std::size_t id, Point pos, const SimConfig& cfg = {}) {
    Ue u;
    u.id = id;
    u.pos = pos;
    u.task = {cfg.task_cycles, cfg.task_bits, cfg.deadline};
    u.p_tx = cfg.tx_power;
    u.f_local_max = cfg.local_fmax;
    return u;
}

inline HmecNode make_node(std::size_t id, NodeKind kind, Point pos, double f_max, double altitude = 0.0,
                          double half_angle_deg = 80.0) {
    HmecNode n;
    n.id = id;
    n.kind = kind;
    n.pos = pos;
    n.f_max = f_max;
    n.fading = 1.0;
    if (kind == NodeKind::UAV) {
        n.altitude = altitude;
        n.antenna_angle = half_angle_deg * kDeg;
    }
    return n;
}

// Scenario from explicit UEs and nodes; the config counts are made to match.
inline Scenario make_scenario(std::vector<Ue> ues, std::vector<HmecNode> nodes, SimConfig cfg = {}) {
    Scenario sc;
    cfg.num_ue = ues.size();
    cfg.num_uav = cfg.num_gv = cfg.num_gs = 0;
    cfg.gs_positions.clear();
    for (auto& n : nodes) {
        if (n.kind == NodeKind::UAV) ++cfg.num_uav;
        if (n.kind == NodeKind::GV) ++cfg.num_gv;
        if (n.kind == NodeKind::GS) {
            ++cfg.num_gs;
            cfg.gs_positions.push_back(n.pos);
        }
    }
    cfg.fading = FadingModel::Constant;
    sc.config = cfg;
    sc.ues = std::move(ues);
    sc.nodes = std::move(nodes);
    for (std::size_t j = 0; j < sc.nodes.size(); ++j) sc.nodes[j].id = j;
    for (std::size_t i = 0; i < sc.ues.size(); ++i) sc.ues[i].id = i;
    return sc;
}

// Random configuration around the defaults: node mix, UE count, radius and
// deadline vary; everything stays valid.
inline SimConfig random_config(Rng& rng, std::size_t n_lo, std::size_t n_hi) {
    SimConfig cfg;
    cfg.num_uav = 1 + rng.index(3);
    cfg.num_gv = rng.index(2);
    cfg.num_gs = 1;
    cfg.num_ue = n_lo + rng.index(n_hi - n_lo + 1);
    cfg.radius = rng.uniform(60.0, 140.0);
    cfg.gs_positions = {{rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0)}};
    cfg.deadline = rng.uniform(1.2, 3.0);
    return cfg;
}

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

inline double rel_diff(double a, double b) {
    double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

} // namespace h2o::testing
