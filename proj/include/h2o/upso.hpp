#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "h2o/membership.hpp"
#include "h2o/radio.hpp"
#include "h2o/scenario.hpp"

namespace h2o {

// How a position becomes a Solution.
//   Penalty:   round labels, clamp frequencies, nothing else. Infeasible
//              decisions stay in the solution and are charged by the penalty.
//   Admission: the rounded labels and clamped frequencies are requests that go
//              through sequential admission in UE index order; a request that
//              would break a deadline, coverage or node capacity becomes local
//              execution and admitted UEs get at least their minimum frequency.
//              The particle itself is never modified.
enum class Decoder { Penalty, Admission };

struct PsoParams {
    std::size_t swarm_size = 10;  // P
    std::size_t iterations = 100; // T_pso
    double w_max = 0.9;
    double w_min = 0.4;
    double c_cog = 2.0;
    double c_soc = 2.0;
    double penalty = 100.0; // rho, charged per violated constraint
    double f_floor = 1e6;   // lower clamp on allocated frequencies
    // Velocity limits as fractions of each dimension's range.
    double label_vmax = 1.0;
    double freq_vmax = 1.0;
    // Initial velocities are uniform in +-init_velocity * (velocity limit).
    double init_velocity = 1.0;
    // Optionally let the initial roulette pick local execution with weight
    // `local_prior`; the node memberships share the remaining 1 - local_prior.
    bool local_in_roulette = false;
    double local_prior = 0.0;
    Decoder decoder = Decoder::Admission;

    void validate() const;
};

// Position layout: x[0..N) are labels as reals, x[N..2N) are frequencies.
struct Particle {
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> pbest_x;
    double pbest_fit = 0.0;
    double fit = 0.0;
};

struct Swarm {
    std::vector<Particle> particles;
    std::vector<double> gbest_x;
    double gbest_fit = 0.0;
    std::size_t num_ues = 0;
};

struct PsoResult {
    Solution solution;
    double fitness = 0.0;
    std::vector<double> trace; // gbest fitness after init, then after each step
    EvalReport report;
};

// Smallest index whose cumulative probability exceeds r.
std::size_t roulette_select(std::span<const double> probs, double r);

// Rounds/clamps a position into a Solution according to params.decoder. Local
// labels take the scenario's local frequency policy.
Solution decode(std::span<const double> x, const Scenario& scenario, const PsoParams& params);

// Objective plus penalty * number of violated constraints.
double fitness(const Solution& solution, const Scenario& scenario, double penalty);
double fitness(const Particle& particle, const Scenario& scenario, const PsoParams& params);

// Inertia weight w(t) = w_max - (w_max - w_min) t / T.
double inertia_weight(const PsoParams& params, std::size_t t);

Swarm init_swarm(const MembershipMatrix& u, const Scenario& scenario, const PsoParams& params, std::uint64_t seed);

// One velocity/position update at iteration t, followed by rounding, clamping,
// evaluation and best-position bookkeeping.
void step(Swarm& swarm, std::size_t t, const Scenario& scenario, const PsoParams& params, std::uint64_t seed);

// U matrix -> roulette initialisation -> T_pso steps. `scenario` must already
// carry the placement.
const char* to_string(Decoder d);
Decoder parse_decoder(std::string_view s);

PsoResult solve(const Scenario& scenario, const PsoParams& params, std::uint64_t seed, double gamma, double tau);

} // namespace h2o
