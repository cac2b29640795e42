#include "h2o/lsfcm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "h2o/error.hpp"
#include "h2o/rng.hpp"

namespace h2o {

namespace {

std::vector<Point> ue_positions(const Scenario& sc) {
    std::vector<Point> pts;
    pts.reserve(sc.ues.size());
    for (const auto& u : sc.ues) pts.push_back(u.pos);
    return pts;
}

double sq_dist(Point a, Point b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

} // namespace

double lsfcm_distance(Point ue, Point center, NodeKind kind, double altitude) {
    double r2 = sq_dist(ue, center);
    return kind == NodeKind::UAV ? altitude * altitude + r2 : r2;
}

MembershipMatrix memberships_from_dissimilarity(std::span<const double> d, std::size_t rows, std::size_t cols,
                                                double tau) {
    if (d.size() != rows * cols) throw ContractError("memberships: dissimilarity shape mismatch");
    MembershipMatrix mu(rows, cols, MembershipKind::LsfcmMu);
    for (std::size_t i = 0; i < rows; ++i) fuzzy_row(d.subspan(i * cols, cols), tau, mu.row(i));
    return mu;
}

MembershipMatrix update_memberships(std::span<const Point> positions, std::span<const Point> centers, double tau) {
    const std::size_t n = positions.size(), c = centers.size();
    std::vector<double> d(n * c);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < c; ++j) d[i * c + j] = sq_dist(positions[i], centers[j]);
    return memberships_from_dissimilarity(d, n, c, tau);
}

std::vector<Point> update_centroids(std::span<const Point> positions, const MembershipMatrix& mu, double tau,
                                    const std::vector<bool>& fixed_mask, std::span<const Point> previous) {
    const std::size_t c = previous.size();
    if (mu.rows() != positions.size() || mu.cols() != c || fixed_mask.size() != c)
        throw ContractError("update_centroids: shape mismatch");
    std::vector<Point> out(previous.begin(), previous.end());
    for (std::size_t j = 0; j < c; ++j) {
        if (fixed_mask[j]) continue;
        double wsum = 0.0, x = 0.0, y = 0.0;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            double w = std::pow(mu(i, j), tau);
            wsum += w;
            x += w * positions[i].x;
            y += w * positions[i].y;
        }
        if (wsum > 0.0) out[j] = {x / wsum, y / wsum};
    }
    return out;
}

double objective(std::span<const Point> positions, std::span<const Point> centers, const MembershipMatrix& mu,
                 double tau) {
    if (mu.rows() != positions.size() || mu.cols() != centers.size())
        throw ContractError("objective: shape mismatch");
    double g = 0.0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = 0; j < centers.size(); ++j)
            g += std::pow(mu(i, j), tau) * sq_dist(positions[i], centers[j]);
    return g;
}

std::vector<Point> seed_centers(std::span<const Point> positions, std::size_t count, std::uint64_t seed) {
    std::vector<Point> centers;
    if (count == 0) return centers;
    if (positions.empty()) return std::vector<Point>(count, Point{});
    Rng rng(seed, Stream::FcmInit);
    centers.push_back(positions[rng.index(positions.size())]);
    std::vector<double> best(positions.size(), std::numeric_limits<double>::infinity());
    while (centers.size() < count) {
        double total = 0.0;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            best[i] = std::min(best[i], sq_dist(positions[i], centers.back()));
            total += best[i];
        }
        if (!(total > 0.0)) {
            // Fewer distinct UE positions than centers.
            centers.push_back(positions[rng.index(positions.size())]);
            continue;
        }
        double r = rng.uniform() * total;
        std::size_t pick = positions.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < positions.size(); ++i) {
            acc += best[i];
            if (acc > r) {
                pick = i;
                break;
            }
        }
        centers.push_back(positions[pick]);
    }
    return centers;
}

FcmState run_fcm(std::span<const Point> positions, std::vector<Point> centers, std::vector<bool> fixed_mask,
                 const LsfcmParams& params) {
    if (centers.size() != fixed_mask.size()) throw ContractError("run_fcm: fixed_mask size mismatch");
    if (!(params.tau > 1.0)) throw ContractError("run_fcm: tau must exceed 1");
    FcmState st;
    st.fixed_mask = std::move(fixed_mask);
    st.centers = std::move(centers);
    st.mu = update_memberships(positions, st.centers, params.tau);

    double delta = 1.0, previous = 0.0;
    std::size_t t = 1;
    while (std::abs(delta) > params.epsilon && t < params.max_iterations) {
        st.centers = update_centroids(positions, st.mu, params.tau, st.fixed_mask, st.centers);
        double g = objective(positions, st.centers, st.mu, params.tau);
        st.mu = update_memberships(positions, st.centers, params.tau);
        st.objective_trace.push_back(g);
        delta = g - previous;
        previous = g;
        ++t;
    }
    st.iterations = st.objective_trace.size();
    return st;
}

FcmState run_lsfcm(const Scenario& sc, const LsfcmParams& params) {
    const auto positions = ue_positions(sc);
    const std::size_t c = sc.num_nodes();
    std::size_t unfixed = 0;
    for (const auto& n : sc.nodes)
        if (n.kind != NodeKind::GS) ++unfixed;
    auto seeds = seed_centers(positions, unfixed, sc.seed);

    std::vector<Point> centers(c);
    std::vector<bool> mask(c, false);
    std::size_t next = 0;
    for (std::size_t j = 0; j < c; ++j) {
        if (sc.nodes[j].kind == NodeKind::GS) {
            centers[j] = sc.nodes[j].pos;
            mask[j] = true;
        } else {
            centers[j] = seeds[next++];
        }
    }
    return run_fcm(positions, std::move(centers), std::move(mask), params);
}

std::vector<std::size_t> hard_labels(const MembershipMatrix& mu) {
    std::vector<std::size_t> labels(mu.rows(), 0);
    for (std::size_t i = 0; i < mu.rows(); ++i) {
        auto row = mu.row(i);
        labels[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return labels;
}

Placement assign_centers_to_nodes(const FcmState& st, const Scenario& sc) {
    const std::size_t c = sc.num_nodes();
    if (st.centers.size() != c) throw ContractError("assign_centers_to_nodes: center count must equal node count");
    Placement pl;
    pl.cluster_of_ue = hard_labels(st.mu);
    pl.center_to_node.assign(c, 0);
    pl.node_positions.resize(c);
    pl.node_altitudes.resize(c);
    for (std::size_t j = 0; j < c; ++j) {
        pl.node_positions[j] = sc.nodes[j].pos;
        pl.node_altitudes[j] = sc.nodes[j].altitude;
    }

    std::vector<double> demand(c, 0.0);
    for (std::size_t i = 0; i < pl.cluster_of_ue.size(); ++i) demand[pl.cluster_of_ue[i]] += sc.ues[i].task.cycles;

    std::vector<std::size_t> free_centers, free_nodes, gs_nodes;
    for (std::size_t j = 0; j < c; ++j) {
        if (sc.nodes[j].kind == NodeKind::GS) gs_nodes.push_back(j);
        else free_nodes.push_back(j);
        if (!st.fixed_mask[j]) free_centers.push_back(j);
    }
    // Fixed centers map to GS nodes in order.
    std::size_t g = 0;
    for (std::size_t j = 0; j < c; ++j) {
        if (!st.fixed_mask[j]) continue;
        if (g >= gs_nodes.size()) throw ContractError("assign_centers_to_nodes: more fixed centers than GS nodes");
        pl.center_to_node[j] = gs_nodes[g++];
    }
    if (free_centers.size() != free_nodes.size())
        throw ContractError("assign_centers_to_nodes: unfixed centers do not match UAV/GV count");

    std::stable_sort(free_centers.begin(), free_centers.end(),
                     [&](std::size_t a, std::size_t b) { return demand[a] > demand[b]; });
    std::stable_sort(free_nodes.begin(), free_nodes.end(),
                     [&](std::size_t a, std::size_t b) { return sc.nodes[a].f_max > sc.nodes[b].f_max; });
    for (std::size_t k = 0; k < free_centers.size(); ++k) {
        std::size_t center = free_centers[k], node = free_nodes[k];
        pl.center_to_node[center] = node;
        pl.node_positions[node] = st.centers[center];
    }
    return pl;
}

Scenario apply_placement(const Scenario& sc, const Placement& pl) {
    if (pl.node_positions.size() != sc.num_nodes()) throw ContractError("apply_placement: size mismatch");
    Scenario out = sc;
    for (std::size_t j = 0; j < out.nodes.size(); ++j) {
        auto& node = out.nodes[j];
        if (node.kind == NodeKind::GS) continue;
        node.pos = pl.node_positions[j];
        if (node.kind == NodeKind::UAV) node.altitude = pl.node_altitudes[j];
        if (node.kind == NodeKind::GV) {
            bool clash = true;
            while (clash) {
                clash = false;
                for (const auto& ue : out.ues) {
                    if (ue.pos == node.pos) {
                        node.pos.x += 1.0;
                        clash = true;
                        break;
                    }
                }
            }
        }
    }
    return out;
}

Scenario place_nodes(const Scenario& sc, const LsfcmParams& params) {
    auto st = run_lsfcm(sc, params);
    return apply_placement(sc, assign_centers_to_nodes(st, sc));
}

} // namespace h2o
