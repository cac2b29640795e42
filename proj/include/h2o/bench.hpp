#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "h2o/lsfcm.hpp"
#include "h2o/model.hpp"
#include "h2o/scenario.hpp"
#include "h2o/scheduler.hpp"
#include "h2o/upso.hpp"

namespace h2o {

enum class Policy { Local, Random, Greedy, Pso, Dnn };

const char* to_string(Policy p);
Policy parse_policy(std::string_view s);
inline constexpr Policy kAllPolicies[] = {Policy::Pso, Policy::Dnn, Policy::Greedy, Policy::Random, Policy::Local};

// Which solver labels the training samples.
enum class SampleSource { Pso, Greedy, Random };

const char* to_string(SampleSource s);
SampleSource parse_sample_source(std::string_view s);

struct BenchSettings {
    SimConfig sim;
    std::vector<std::uint64_t> seeds = default_seeds(20);
    PsoParams pso;
    LsfcmParams fcm;
    AdmissionOrder order = AdmissionOrder::Index;

    // Sample collection.
    std::size_t collect_scenarios = 200;
    std::size_t collect_ue_lo = 10;
    std::size_t collect_ue_hi = 10;
    std::uint64_t collect_seed = 1000;
    double headroom = 0.02;

    ModelSpec model;
    TrainParams train;

    // Sweeps.
    std::vector<std::size_t> n_values = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::vector<double> treq_values = {1.0, 1.5, 2.0, 2.5, 3.0};
    std::size_t treq_n = 50;
    std::vector<std::size_t> arch_layers = {1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<std::size_t> arch_widths = {10, 20, 30};

    // Held-out evaluation for sample_source_compare.
    std::size_t holdout_scenarios = 30;
    std::size_t holdout_n = 50;
    std::size_t holdout_slots = 10;
    std::uint64_t holdout_seed = 5000;

    // Oracle instances: one UAV and one GS, constant fading.
    std::size_t oracle_instances = 50;
    std::size_t oracle_n = 4;

    // Optional prerequisites; empty means build in-process.
    std::string samples_path;
    std::string model_path;

    std::function<void(const std::string&)> log;

    static std::vector<std::uint64_t> default_seeds(std::size_t n);
    void say(const std::string& msg) const {
        if (log) log(msg);
    }
};

// Oracle-sized layout: one UAV, one GS, constant fading, n UEs.
SimConfig oracle_instance_config(const SimConfig& base, std::size_t n);

// Scenario generation followed by LS-FCM placement.
Scenario prepare_scenario(const SimConfig& config, std::uint64_t seed, const LsfcmParams& fcm);

Solution run_policy(Policy policy, const Scenario& scenario, const BenchSettings& settings, const Model* model,
                    std::uint64_t seed);

// One sample per UE of each collected scenario. Scenario k uses seed
// collect_seed + k and N drawn uniformly from [collect_ue_lo, collect_ue_hi].
SampleDb collect_samples(const BenchSettings& settings, SampleSource source = SampleSource::Pso);
// Same with the configuration overridden.
SampleDb collect_samples(const BenchSettings& settings, const SimConfig& config, SampleSource source);

struct TrainedModel {
    Model model;
    TrainReport report;
};

TrainedModel train_model(const BenchSettings& settings, const SampleDb& samples);

// Loads settings.model_path when set; otherwise loads or collects samples and
// trains.
Model obtain_model(const BenchSettings& settings);
SampleDb obtain_samples(const BenchSettings& settings);

struct PolicyOutcome {
    double energy = 0.0;
    std::size_t admitted = 0;
    bool feasible = true;
    double seconds = 0.0;
};

PolicyOutcome evaluate_policy(Policy policy, const Scenario& scenario, const BenchSettings& settings,
                              const Model* model, std::uint64_t seed);

struct ResultRow {
    std::string experiment;
    std::string policy;
    std::string sweep_var;
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
};

struct ResultTable {
    std::vector<ResultRow> rows;

    void add(std::string experiment, std::string policy, std::string sweep_var, double sweep_value, std::uint64_t seed,
             std::string metric, double value);
    void write_csv(std::ostream& os) const;
    // Mean of `metric` over rows matching policy and sweep value.
    std::optional<double> mean(std::string_view policy, std::string_view metric, double sweep_value) const;
};

inline constexpr const char* kExperimentIds[] = {
    "arch_sweep",   "loss_curves",      "error_hist",      "sample_source_compare", "energy_vs_n",
    "admitted_vs_n", "admitted_vs_treq", "runtime_compare", "oracle_check",
};

bool is_experiment(std::string_view id);

ResultTable run_experiment(std::string_view id, const BenchSettings& settings);

// Writes <out>/<id>.csv and <out>/<id>.manifest; returns the CSV path.
std::string write_experiment(std::string_view id, const BenchSettings& settings, const ResultTable& table,
                             const std::string& out_dir);

void write_manifest(std::ostream& os, std::string_view id, const BenchSettings& settings, const ResultTable& table);

} // namespace h2o
