#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "h2o/membership.hpp"
#include "h2o/model.hpp"
#include "h2o/radio.hpp"
#include "h2o/scenario.hpp"
#include "h2o/upso.hpp"

namespace h2o {

// Remaining capacity and admitted UEs per node during sequential decisions.
class ResidualState {
public:
    explicit ResidualState(const Scenario& scenario);

    double remaining(std::size_t node) const { return remaining_[node]; }
    double committed(std::size_t node) const;
    const std::vector<std::size_t>& admitted(std::size_t node) const { return admitted_[node]; }
    double allocated(std::size_t ue) const { return alloc_[ue]; }

    void commit(std::size_t ue, std::size_t node, double f);
    void release(std::size_t ue, std::size_t node);

private:
    std::vector<double> f_max_;
    std::vector<double> remaining_;
    std::vector<std::vector<std::size_t>> admitted_;
    std::vector<double> alloc_;
};

enum ConstraintBit : std::size_t { kBitLatency = 0, kBitNodeCap = 1, kBitCoverage = 2, kBitValidLabel = 3 };
inline constexpr std::size_t kNumConstraintBits = 4;
using ConstraintBits = std::array<bool, kNumConstraintBits>;

bool all_pass(const ConstraintBits& bits);
std::string format_bits(const ConstraintBits& bits);

ConstraintBits constraint_layer(const Decision& candidate, std::size_t ue, const ResidualState& state,
                                const Scenario& scenario);
Decision decision_layer(const Decision& candidate, const ConstraintBits& bits, const Ue& ue, LocalPolicy policy);

enum class AdmissionOrder { Index, DescendingDemand };

const char* to_string(AdmissionOrder o);
AdmissionOrder parse_admission_order(std::string_view s);

struct ScheduleTrace {
    std::vector<Decision> candidates;
    std::vector<ConstraintBits> bits;
    std::vector<std::size_t> order;
    std::vector<std::size_t> demoted; // by the post-pass
};

// Network decisions for every UE, filtered by the scheduling layer.
Solution decide_all(const Scenario& scenario, const Model& model, double gamma, double tau,
                    AdmissionOrder order = AdmissionOrder::Index, ScheduleTrace* trace = nullptr);

// Turns a solution into one sample per UE. Offloaded UEs are labelled with
// their minimum deadline-meeting frequency at the solution's co-channel set,
// scaled by (1 + headroom); UEs whose offload is infeasible are labelled local.
std::vector<Sample> label_samples(const Scenario& scenario, const Solution& solution, const MembershipMatrix& u,
                                  double headroom, std::uint64_t scenario_index);

class SampleDb {
public:
    SampleDb() = default;
    explicit SampleDb(std::size_t width) : width_(width) {}

    std::size_t width() const { return width_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const std::vector<Sample>& samples() const { return samples_; }

    void append(Sample s);
    // Euclidean distance to the closest stored u; +inf when empty.
    double nearest_distance(std::span<const double> u) const;

    void write(std::ostream& os) const;
    static SampleDb read(std::istream& is);
    // Writes to path + ".partial" and renames on success; a failed write
    // leaves the .partial file behind and throws.
    void save(const std::string& path) const;
    static SampleDb load(const std::string& path);

private:
    std::size_t width_ = 0;
    std::vector<Sample> samples_;
};

enum class Novelty { Known, Novel };
const char* to_string(Novelty n);

Novelty feedback_check(const SampleDb& db, std::span<const double> u, double delta);

// Runs the feedback loop on one scenario: NOVEL rows are resolved with U-PSO
// and their labelled samples appended. Returns the number appended.
std::size_t feedback_update(SampleDb& db, const Scenario& scenario, const PsoParams& params, std::uint64_t seed,
                            double gamma, double tau, double delta, double headroom, std::uint64_t scenario_index);

} // namespace h2o
