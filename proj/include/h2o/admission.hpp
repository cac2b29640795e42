#pragma once

#include <optional>
#include <span>
#include <vector>

#include "h2o/radio.hpp"
#include "h2o/scenario.hpp"

namespace h2o {

// Rates of `members` at node j when they share it. In AllUes mode every other
// UE interferes, admitted or not.
std::vector<double> member_rates(const Scenario& scenario, std::size_t node, std::span<const std::size_t> members);

// Minimum deadline-meeting frequencies for all members, or nullopt if any
// member cannot meet its deadline (or sits outside UAV coverage).
std::optional<std::vector<double>> member_min_frequencies(const Scenario& scenario, std::size_t node,
                                                          std::span<const std::size_t> members);

// Incremental per-node bookkeeping shared by the baselines: a UE is admitted
// only if every member of the node, itself included, still meets its deadline
// and the node's capacity covers the sum. Each member is allocated the larger
// of its requested frequency and its minimum deadline-meeting frequency.
class NodeAdmission {
public:
    explicit NodeAdmission(const Scenario& scenario);

    bool try_admit(std::size_t ue, std::size_t node, double requested = 0.0);
    // Writes admitted labels/frequencies into `solution`; everybody else local.
    Solution to_solution() const;
    const std::vector<std::size_t>& members(std::size_t node) const { return members_[node]; }

private:
    const Scenario& sc_;
    std::vector<std::vector<std::size_t>> members_;
    std::vector<std::vector<double>> requested_;
    std::vector<std::vector<double>> freqs_;
};

} // namespace h2o
