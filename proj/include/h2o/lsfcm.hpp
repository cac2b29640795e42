#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "h2o/membership.hpp"
#include "h2o/scenario.hpp"

namespace h2o {

struct LsfcmParams {
    double tau = 2.0;
    double epsilon = 1e-4;
    std::size_t max_iterations = 100; // T_FCM
};

struct FcmState {
    std::vector<Point> centers;
    MembershipMatrix mu;
    std::vector<bool> fixed_mask;
    std::vector<double> objective_trace;
    std::size_t iterations = 0;
};

struct Placement {
    std::vector<Point> node_positions; // indexed like scenario.nodes
    std::vector<double> node_altitudes;
    std::vector<std::size_t> cluster_of_ue;
    std::vector<std::size_t> center_to_node;
};

// Large-scale inverse path gain: R^2 for ground kinds, H^2 + R^2 for UAVs.
double lsfcm_distance(Point ue, Point center, NodeKind kind, double altitude = 0.0);

// mu_ij from d' = R^2 to each center (all treated as ground kind).
MembershipMatrix update_memberships(std::span<const Point> positions, std::span<const Point> centers, double tau);
// Same, from an explicit N x c dissimilarity matrix.
MembershipMatrix memberships_from_dissimilarity(std::span<const double> d, std::size_t rows, std::size_t cols,
                                                double tau);

// Weighted centroids for unfixed centers; fixed and degenerate centers keep `previous`.
std::vector<Point> update_centroids(std::span<const Point> positions, const MembershipMatrix& mu, double tau,
                                    const std::vector<bool>& fixed_mask, std::span<const Point> previous);

double objective(std::span<const Point> positions, std::span<const Point> centers, const MembershipMatrix& mu,
                 double tau);

// Spread (k-means++ style) seeding for `count` centers over the UE positions.
std::vector<Point> seed_centers(std::span<const Point> positions, std::size_t count, std::uint64_t seed);

// Iterates centroid -> objective -> membership until |dG| <= epsilon or the
// iteration cap. `centers` and `fixed_mask` give the starting state.
FcmState run_fcm(std::span<const Point> positions, std::vector<Point> centers, std::vector<bool> fixed_mask,
                 const LsfcmParams& params);

// Full placement run: GS centers are pinned at the GS coordinates, the rest are
// seeded from the scenario seed. Center order follows scenario.nodes.
FcmState run_lsfcm(const Scenario& scenario, const LsfcmParams& params);

// Hard labels by argmax mu (ties to the lowest index).
std::vector<std::size_t> hard_labels(const MembershipMatrix& mu);

Placement assign_centers_to_nodes(const FcmState& state, const Scenario& scenario);

// Moves UAV/GV nodes to their placed positions. A GV landing exactly on a UE
// is nudged 1 m along +x so its R^-2 gain stays finite.
Scenario apply_placement(const Scenario& scenario, const Placement& placement);

// generate -> LS-FCM -> assignment -> apply, the usual preprocessing chain.
Scenario place_nodes(const Scenario& scenario, const LsfcmParams& params);

} // namespace h2o
