#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "h2o/membership.hpp"
#include "h2o/scenario.hpp"

namespace h2o {

// Stable constraint identifiers used in reports and by the scheduling layer.
enum class ConstraintId { Exclusivity, Latency, LocalCap, NodeCap, Coverage };

const char* to_string(ConstraintId id);

// Per-UE decision: a[i] = 0 runs locally, a[i] = k offloads to nodes[k-1].
struct Solution {
    std::vector<int> a;
    std::vector<double> f;

    static Solution all_local(std::size_t n) { return {std::vector<int>(n, 0), std::vector<double>(n, 0.0)}; }
    std::size_t size() const { return a.size(); }
    bool operator==(const Solution&) const = default;
};

struct Violation {
    std::size_t ue = 0;
    ConstraintId constraint = ConstraintId::Latency;
    bool operator==(const Violation&) const = default;
};

struct EvalReport {
    double total_energy = 0.0;
    std::vector<double> per_ue_energy;
    std::vector<double> per_ue_rate; // 0 for local UEs
    std::vector<Violation> violated;
    bool feasible = true;

    std::size_t admitted = 0; // UEs that offload
    bool has(std::size_t ue, ConstraintId id) const;
};

// Relative slack allowed on latency and capacity comparisons.
inline constexpr double kFeasibilityRelTol = 1e-9;

double horizontal_distance(const Ue& ue, const HmecNode& node);
double horizontal_distance(Point a, Point b);

// UAV: alpha / (H^2 + R^2); ground nodes: alpha / R^2. Throws GeometryError
// for a ground node at R = 0.
double channel_gain(const Ue& ue, const HmecNode& node);

// Received power P_k * h_k at `node`.
double received_power(const Ue& ue, const HmecNode& node);

// Shannon rate. `co_channel` holds indices into scenario.ues and is ignored
// for UAVs (orthogonal channels).
double achievable_rate(const Ue& ue, const HmecNode& node, std::span<const std::size_t> co_channel,
                       const Scenario& scenario);
// Same, with the interference already summed.
double rate_with_interference(const Ue& ue, const HmecNode& node, double interference, const Scenario& scenario);

// F / (T_req - D/rate) or nullopt when the upload alone exhausts the deadline.
std::optional<double> min_feasible_frequency(const Task& task, double rate);

double local_energy(const Task& task, double f_local, double kappa = 1e-27);
double offload_energy(const Task& task, double rate, double p_tx);

// Local execution frequency under the configured policy.
double local_frequency(const Ue& ue, LocalPolicy policy);
bool local_deadline_ok(const Ue& ue, double f_local);
bool within_coverage(const Ue& ue, const HmecNode& node);

// Objective and constraint check for a complete decision.
EvalReport evaluate_solution(const Scenario& scenario, const Solution& solution);

// Interference-aware membership U. h'_ij = (gamma * I_ij + sigma^2) / S_ij with
// S_ij = P_i * alpha_j * g_ij and I_ij the received power of all other UEs at
// a GV/GS (zero for UAVs).
MembershipMatrix membership_matrix_u(const Scenario& scenario, double gamma, double tau);
// The h' dissimilarity matrix behind membership_matrix_u (row-major N x c).
std::vector<double> interference_dissimilarity(const Scenario& scenario, double gamma);

// Roulette probabilities for UE i: row i of U renormalised.
std::vector<double> selection_probabilities(const MembershipMatrix& u, std::size_t i);

} // namespace h2o
