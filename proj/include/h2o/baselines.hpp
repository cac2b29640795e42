#pragma once

#include <cstdint>

#include "h2o/radio.hpp"
#include "h2o/scenario.hpp"

namespace h2o {

// Every UE runs its own task at the local policy frequency.
Solution local_only(const Scenario& scenario);

// Each UE (index order) draws a node uniformly and is admitted at its minimum
// feasible frequency if the node can still serve everyone; otherwise local.
Solution random_offload(const Scenario& scenario, std::uint64_t seed);

// Each UE targets its nearest node (UAV distance includes altitude). Per node,
// candidates are admitted in ascending order of the frequency they would need
// alone; whoever no longer fits runs locally.
Solution greedy_offload(const Scenario& scenario);

// Index of the nearest node, ties to the lowest index.
std::size_t nearest_node(const Scenario& scenario, std::size_t ue);

} // namespace h2o
