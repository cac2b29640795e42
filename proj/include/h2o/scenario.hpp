#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace h2o {

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

enum class NodeKind { UAV, GV, GS };

enum class FadingModel { Exponential, Constant };

// Frequency a UE uses when it executes its own task.
enum class LocalPolicy { Fixed, EnergyOpt };

// Which UEs contribute co-channel interference at a GV/GS.
enum class InterferenceMode { CoAssigned, AllUes };

struct Task {
    double cycles = 0.0;   // F_i
    double bits = 0.0;     // D_i
    double deadline = 0.0; // T_req, seconds
    bool operator==(const Task&) const = default;
};

struct Ue {
    std::size_t id = 0;
    Point pos;
    Task task;
    double p_tx = 0.0;        // watts
    double f_local_max = 0.0; // cycles/s
    bool operator==(const Ue&) const = default;
};

struct HmecNode {
    std::size_t id = 0;
    NodeKind kind = NodeKind::GS;
    Point pos;
    double altitude = 0.0;      // metres, UAV only
    double f_max = 0.0;         // cycles/s
    double antenna_angle = 0.0; // half-angle in radians, UAV only
    double fading = 1.0;        // small-scale power gain alpha
    bool operator==(const HmecNode&) const = default;
};

// Simulation defaults.
struct SimConfig {
    double radius = 100.0;
    std::size_t num_uav = 3;
    std::size_t num_gv = 1;
    std::size_t num_gs = 1;
    std::size_t num_ue = 10;
    std::vector<Point> gs_positions{{50.0, 50.0}};

    double task_cycles = 1e9;
    double task_bits = 8e5; // 100 kB
    double deadline = 2.0;
    double tx_power = 1.0;
    double local_fmax = 1e9;

    double uav_fmax = 1e10;
    double gv_fmax = 1e11;
    double gs_fmax = 1e12;
    double uav_altitude = 20.0;
    double uav_half_angle_deg = 80.0;

    double bandwidth = 1e6;
    double noise_power = 1e-9;
    double kappa = 1e-27; // effective switched capacitance
    double gamma = 1.0;   // interference trade-off in the U matrix
    double tau = 2.0;     // fuzzy weighting exponent

    FadingModel fading = FadingModel::Exponential;
    LocalPolicy local_policy = LocalPolicy::EnergyOpt;
    InterferenceMode interference = InterferenceMode::CoAssigned;

    std::size_t num_nodes() const { return num_uav + num_gv + num_gs; }
    // Throws ConfigError on the first invalid field.
    void validate() const;
    bool operator==(const SimConfig&) const = default;
};

struct Scenario {
    SimConfig config;
    std::uint64_t seed = 0;
    std::uint64_t slot = 0;
    std::vector<Ue> ues;
    std::vector<HmecNode> nodes; // ordered [UAVs, GVs, GSs]

    std::size_t num_ues() const { return ues.size(); }
    std::size_t num_nodes() const { return nodes.size(); }
    double bandwidth() const { return config.bandwidth; }
    double noise_power() const { return config.noise_power; }
    // Node for a 1-based offloading label.
    const HmecNode& node_for_label(int label) const { return nodes.at(static_cast<std::size_t>(label - 1)); }
    bool operator==(const Scenario&) const = default;
};

Scenario generate_scenario(const SimConfig& config, std::uint64_t seed);

// Fresh per-node fading draws keyed by (seed, slot); geometry and tasks are kept.
Scenario resample_fading(const Scenario& scenario, std::uint64_t slot);

const char* to_string(NodeKind kind);
const char* to_string(FadingModel model);
const char* to_string(LocalPolicy policy);
const char* to_string(InterferenceMode mode);

// Flat `key = value` text, `#` comments. Unknown keys are rejected.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
std::string format_config(const SimConfig& config);
// Applies one key/value override on top of an existing config.
void set_config_value(SimConfig& config, const std::string& key, const std::string& value);

// Line-delimited records: one `config` line, a `scenario` header, then
// one `ue` or `node` line per entity. Doubles use round-trip precision.
void write_scenario(std::ostream& out, const Scenario& scenario);
Scenario read_scenario(std::istream& in);

} // namespace h2o
