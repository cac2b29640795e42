#pragma once

#include <cstddef>

#include "h2o/radio.hpp"
#include "h2o/scenario.hpp"

namespace h2o {

inline constexpr std::size_t kOracleMaxUes = 6;
inline constexpr std::size_t kOracleMaxNodes = 3;

struct OracleResult {
    Solution solution;
    double energy = 0.0;
    std::size_t enumerated = 0;
    std::size_t feasible = 0;
};

// Exhaustive search over all (c+1)^N label vectors. Each assignment gets
// co-channel-consistent rates and minimum deadline-meeting frequencies; local
// UEs run at the energy-optimal local frequency. Returns the cheapest feasible
// assignment, ties broken towards the lexicographically smallest label vector.
// Throws RefusalError beyond N = 6 or c = 3.
OracleResult brute_force_oracle(const Scenario& scenario);

} // namespace h2o
