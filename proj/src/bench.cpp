#include "h2o/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "h2o/baselines.hpp"
#include "h2o/error.hpp"
#include "h2o/oracle.hpp"
#include "h2o/rng.hpp"
#include "h2o/textio.hpp"

namespace h2o {

namespace {

constexpr std::string_view kBenchVersion = "h2o-bench 1";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double global_fmax(const SimConfig& c) { return std::max({c.uav_fmax, c.gv_fmax, c.gs_fmax}); }

std::string join(const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
    return s;
}

template <class T> std::string join_num(const std::vector<T>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + text::fmt(static_cast<double>(v[k]));
    return s;
}

void require_file(const std::string& path, const char* what, const char* how) {
    if (!std::filesystem::exists(path))
        throw std::runtime_error(std::string(what) + " '" + path + "' not found; " + how);
}

void add_outcomes(ResultTable& t, std::string_view exp, std::string_view var, double value, std::uint64_t seed,
                  Policy p, const PolicyOutcome& o, bool energy, bool admitted) {
    if (energy) t.add(std::string(exp), to_string(p), std::string(var), value, seed, "energy", o.energy);
    if (admitted)
        t.add(std::string(exp), to_string(p), std::string(var), value, seed, "admitted", static_cast<double>(o.admitted));
}

ResultTable sweep_n(std::string_view id, const BenchSettings& s, bool energy, bool admitted) {
    Model model = obtain_model(s);
    ResultTable t;
    for (auto n : s.n_values) {
        SimConfig cfg = s.sim;
        cfg.num_ue = n;
        for (auto seed : s.seeds) {
            Scenario sc = prepare_scenario(cfg, seed, s.fcm);
            for (Policy p : kAllPolicies)
                add_outcomes(t, id, "n", static_cast<double>(n), seed, p, evaluate_policy(p, sc, s, &model, seed), energy,
                             admitted);
        }
        s.say(std::string(id) + ": N=" + std::to_string(n) + " done");
    }
    return t;
}

ResultTable admitted_vs_treq(const BenchSettings& s) {
    ResultTable t;
    for (double treq : s.treq_values) {
        SimConfig cfg = s.sim;
        cfg.deadline = treq;
        // The network's frequency output is deadline specific, so each T_req
        // point gets samples and a model of its own.
        BenchSettings local = s;
        local.sim = cfg;
        local.samples_path.clear();
        local.model_path.clear();
        TrainedModel tm = train_model(local, collect_samples(local, cfg, SampleSource::Pso));
        cfg.num_ue = s.treq_n;
        for (auto seed : s.seeds) {
            Scenario sc = prepare_scenario(cfg, seed, s.fcm);
            for (Policy p : kAllPolicies)
                add_outcomes(t, "admitted_vs_treq", "treq", treq, seed, p, evaluate_policy(p, sc, local, &tm.model, seed),
                             false, true);
        }
        s.say("admitted_vs_treq: T_req=" + text::fmt(treq) + " done");
    }
    return t;
}

ResultTable arch_sweep(const BenchSettings& s) {
    SampleDb db = obtain_samples(s);
    ResultTable t;
    for (auto width : s.arch_widths) {
        for (auto layers : s.arch_layers) {
            BenchSettings local = s;
            local.model.hidden.assign(layers, width);
            TrainedModel tm = train_model(local, db);
            std::string pol = "dnn_w" + std::to_string(width);
            t.add("arch_sweep", pol, "layers", static_cast<double>(layers), s.train.seed, "final_test_loss",
                  tm.report.epochs.back().test_loss);
            t.add("arch_sweep", pol, "layers", static_cast<double>(layers), s.train.seed, "min_test_loss",
                  tm.report.min_test_loss());
            s.say("arch_sweep: width " + std::to_string(width) + " layers " + std::to_string(layers) + " done");
        }
    }
    return t;
}

ResultTable loss_curves(const BenchSettings& s) {
    TrainedModel tm = train_model(s, obtain_samples(s));
    ResultTable t;
    for (const auto& e : tm.report.epochs) {
        t.add("loss_curves", "dnn", "epoch", static_cast<double>(e.epoch), s.train.seed, "train_loss", e.train_loss);
        t.add("loss_curves", "dnn", "epoch", static_cast<double>(e.epoch), s.train.seed, "test_loss", e.test_loss);
    }
    return t;
}

ResultTable error_hist(const BenchSettings& s) {
    TrainedModel tm = train_model(s, obtain_samples(s));
    ResultTable t;
    const auto& errs = tm.report.test_abs_errors;
    const std::size_t width = tm.model.net.output_dim();
    for (std::size_t k = 0; k < errs.size(); ++k) {
        std::string metric = "abs_error_" + std::to_string(k % width);
        t.add("error_hist", "dnn", "sample", static_cast<double>(k / width), s.train.seed, metric, errs[k]);
    }
    for (double bound : {0.025, 0.05, 0.1}) {
        t.add("error_hist", "dnn", "bound", bound, s.train.seed, "fraction_within", tm.report.fraction_errors_within(bound));
    }
    return t;
}

ResultTable sample_source_compare(const BenchSettings& s) {
    ResultTable t;
    SimConfig eval_cfg = s.sim;
    eval_cfg.num_ue = s.holdout_n;
    for (SampleSource src : {SampleSource::Pso, SampleSource::Greedy, SampleSource::Random}) {
        BenchSettings local = s;
        local.samples_path.clear();
        local.model_path.clear();
        SampleDb db = src == SampleSource::Pso ? obtain_samples(s) : collect_samples(local, src);
        TrainedModel tm = train_model(local, db);
        std::string pol = std::string("dnn_") + to_string(src);
        for (std::size_t k = 0; k < s.holdout_scenarios; ++k) {
            std::uint64_t seed = s.holdout_seed + k;
            Scenario base = prepare_scenario(eval_cfg, seed, s.fcm);
            for (std::size_t slot = 0; slot < s.holdout_slots; ++slot) {
                Scenario sc = resample_fading(base, slot);
                auto rep = evaluate_solution(sc, decide_all(sc, tm.model, sc.config.gamma, sc.config.tau, s.order));
                t.add("sample_source_compare", pol, "slot", static_cast<double>(slot), seed, "energy", rep.total_energy);
            }
        }
        s.say(std::string("sample_source_compare: ") + pol + " done");
    }
    return t;
}

ResultTable runtime_compare(const BenchSettings& s) {
    Model model = obtain_model(s);
    ResultTable t;
    for (auto n : s.n_values) {
        SimConfig cfg = s.sim;
        cfg.num_ue = n;
        for (auto seed : s.seeds) {
            Scenario sc = prepare_scenario(cfg, seed, s.fcm);
            for (Policy p : {Policy::Pso, Policy::Dnn}) {
                auto o = evaluate_policy(p, sc, s, &model, seed);
                t.add("runtime_compare", to_string(p), "n", static_cast<double>(n), seed, "seconds", o.seconds);
            }
        }
        s.say("runtime_compare: N=" + std::to_string(n) + " done");
    }
    return t;
}

ResultTable oracle_check(const BenchSettings& s) {
    ResultTable t;
    SimConfig cfg = oracle_instance_config(s.sim, s.oracle_n);
    for (std::size_t k = 0; k < s.oracle_instances; ++k) {
        std::uint64_t seed = k + 1;
        Scenario sc = prepare_scenario(cfg, seed, s.fcm);
        auto oracle = brute_force_oracle(sc);
        auto pso = solve(sc, s.pso, seed, cfg.gamma, cfg.tau);
        double gap = oracle.energy > 0.0 ? (pso.report.total_energy - oracle.energy) / oracle.energy : 0.0;
        t.add("oracle_check", "oracle", "instance", static_cast<double>(k), seed, "energy", oracle.energy);
        t.add("oracle_check", "pso", "instance", static_cast<double>(k), seed, "energy", pso.report.total_energy);
        t.add("oracle_check", "pso", "instance", static_cast<double>(k), seed, "relative_gap", gap);
    }
    return t;
}

} // namespace

const char* to_string(Policy p) {
    switch (p) {
    case Policy::Local: return "local";
    case Policy::Random: return "random";
    case Policy::Greedy: return "greedy";
    case Policy::Pso: return "pso";
    case Policy::Dnn: return "dnn";
    }
    return "?";
}

Policy parse_policy(std::string_view s) {
    for (Policy p : kAllPolicies)
        if (s == to_string(p)) return p;
    throw ConfigError("unknown policy '" + std::string(s) + "' (local, random, greedy, pso, dnn)");
}

const char* to_string(SampleSource s) {
    switch (s) {
    case SampleSource::Pso: return "pso";
    case SampleSource::Greedy: return "greedy";
    case SampleSource::Random: return "random";
    }
    return "?";
}

SampleSource parse_sample_source(std::string_view s) {
    for (SampleSource v : {SampleSource::Pso, SampleSource::Greedy, SampleSource::Random})
        if (s == to_string(v)) return v;
    throw ConfigError("unknown sample source '" + std::string(s) + "' (pso, greedy, random)");
}

std::vector<std::uint64_t> BenchSettings::default_seeds(std::size_t n) {
    std::vector<std::uint64_t> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = k + 1;
    return v;
}

SimConfig oracle_instance_config(const SimConfig& base, std::size_t n) {
    SimConfig cfg = base;
    cfg.num_uav = 1;
    cfg.num_gv = 0;
    cfg.num_gs = 1;
    cfg.num_ue = n;
    cfg.fading = FadingModel::Constant;
    if (cfg.gs_positions.size() != 1) cfg.gs_positions = {cfg.gs_positions.empty() ? Point{50.0, 50.0} : cfg.gs_positions[0]};
    return cfg;
}

Scenario prepare_scenario(const SimConfig& config, std::uint64_t seed, const LsfcmParams& fcm) {
    return place_nodes(generate_scenario(config, seed), fcm);
}

Solution run_policy(Policy policy, const Scenario& sc, const BenchSettings& s, const Model* model, std::uint64_t seed) {
    switch (policy) {
    case Policy::Local: return local_only(sc);
    case Policy::Random: return random_offload(sc, seed);
    case Policy::Greedy: return greedy_offload(sc);
    case Policy::Pso: return solve(sc, s.pso, seed, sc.config.gamma, sc.config.tau).solution;
    case Policy::Dnn:
        if (!model) throw ContractError("run_policy: dnn policy needs a trained model");
        return decide_all(sc, *model, sc.config.gamma, sc.config.tau, s.order);
    }
    throw ContractError("run_policy: unknown policy");
}

PolicyOutcome evaluate_policy(Policy policy, const Scenario& sc, const BenchSettings& s, const Model* model,
                              std::uint64_t seed) {
    auto t0 = Clock::now();
    Solution sol = run_policy(policy, sc, s, model, seed);
    PolicyOutcome o;
    o.seconds = seconds_since(t0);
    auto rep = evaluate_solution(sc, sol);
    o.energy = rep.total_energy;
    o.admitted = rep.admitted;
    o.feasible = rep.feasible;
    return o;
}

SampleDb collect_samples(const BenchSettings& s, SampleSource source) { return collect_samples(s, s.sim, source); }

SampleDb collect_samples(const BenchSettings& s, const SimConfig& config, SampleSource source) {
    if (s.collect_scenarios < 1) throw ConfigError("collect: need at least one scenario");
    if (s.collect_ue_lo < 1 || s.collect_ue_hi < s.collect_ue_lo) throw ConfigError("collect: bad UE range");
    SampleDb db(config.num_nodes());
    for (std::size_t k = 0; k < s.collect_scenarios; ++k) {
        std::uint64_t seed = s.collect_seed + k;
        SimConfig cfg = config;
        Rng rng(s.collect_seed, Stream::Collect, k);
        cfg.num_ue = s.collect_ue_lo + rng.index(s.collect_ue_hi - s.collect_ue_lo + 1);
        Scenario sc = prepare_scenario(cfg, seed, s.fcm);
        Solution sol;
        switch (source) {
        case SampleSource::Pso: sol = solve(sc, s.pso, seed, cfg.gamma, cfg.tau).solution; break;
        case SampleSource::Greedy: sol = greedy_offload(sc); break;
        case SampleSource::Random: sol = random_offload(sc, seed); break;
        }
        auto u = membership_matrix_u(sc, cfg.gamma, cfg.tau);
        for (auto& smp : label_samples(sc, sol, u, s.headroom, k)) db.append(std::move(smp));
        if ((k + 1) % 50 == 0 || k + 1 == s.collect_scenarios)
            s.say(std::string("collect[") + to_string(source) + "]: " + std::to_string(k + 1) + "/" +
                  std::to_string(s.collect_scenarios) + " scenarios, " + std::to_string(db.size()) + " samples");
    }
    return db;
}

TrainedModel train_model(const BenchSettings& s, const SampleDb& samples) {
    if (samples.empty()) throw ConfigError("train: sample database is empty");
    TrainedModel tm;
    tm.model = init_model(s.model, samples.width(), samples.samples(), global_fmax(s.sim), s.pso.f_floor,
                          s.train.seed);
    TrainParams tp = s.train;
    tp.loss = model_loss(tm.model);
    auto examples = make_examples(tm.model, samples.samples());
    tm.report = train(tm.model.net, examples, tp);
    s.say("train: " + std::to_string(tp.epochs) + " epochs, final test loss " +
          text::fmt(tm.report.epochs.empty() ? 0.0 : tm.report.epochs.back().test_loss));
    return tm;
}

SampleDb obtain_samples(const BenchSettings& s) {
    if (!s.samples_path.empty()) {
        require_file(s.samples_path, "sample database", "run `h2o collect --out <file>` first");
        return SampleDb::load(s.samples_path);
    }
    return collect_samples(s, SampleSource::Pso);
}

Model obtain_model(const BenchSettings& s) {
    if (!s.model_path.empty()) {
        require_file(s.model_path, "model", "run `h2o train --out <file>` first");
        std::ifstream is(s.model_path);
        Model m = read_model(is);
        if (m.net.input_dim() != s.sim.num_nodes())
            throw ConfigError("model '" + s.model_path + "' expects " + std::to_string(m.net.input_dim()) +
                              " nodes but the configuration has " + std::to_string(s.sim.num_nodes()));
        return m;
    }
    return train_model(s, obtain_samples(s)).model;
}

void ResultTable::add(std::string experiment, std::string policy, std::string sweep_var, double sweep_value,
                      std::uint64_t seed, std::string metric, double value) {
    rows.push_back({std::move(experiment), std::move(policy), std::move(sweep_var), sweep_value, seed, std::move(metric),
                    value});
}

void ResultTable::write_csv(std::ostream& os) const {
    os << "experiment,policy,sweep_var,sweep_value,seed,metric,value\n";
    for (const auto& r : rows) {
        os << r.experiment << ',' << r.policy << ',' << r.sweep_var << ',' << text::fmt(r.sweep_value) << ',' << r.seed
           << ',' << r.metric << ',' << text::fmt(r.value) << '\n';
    }
}

std::optional<double> ResultTable::mean(std::string_view policy, std::string_view metric, double sweep_value) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (r.policy == policy && r.metric == metric && r.sweep_value == sweep_value) {
            sum += r.value;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

bool is_experiment(std::string_view id) {
    return std::any_of(std::begin(kExperimentIds), std::end(kExperimentIds), [&](const char* e) { return id == e; });
}

ResultTable run_experiment(std::string_view id, const BenchSettings& s) {
    if (s.seeds.empty()) throw ConfigError("bench: seed list is empty");
    if (id == "arch_sweep") return arch_sweep(s);
    if (id == "loss_curves") return loss_curves(s);
    if (id == "error_hist") return error_hist(s);
    if (id == "sample_source_compare") return sample_source_compare(s);
    if (id == "energy_vs_n") return sweep_n(id, s, true, false);
    if (id == "admitted_vs_n") return sweep_n(id, s, false, true);
    if (id == "admitted_vs_treq") return admitted_vs_treq(s);
    if (id == "runtime_compare") return runtime_compare(s);
    if (id == "oracle_check") return oracle_check(s);
    throw ConfigError("unknown experiment '" + std::string(id) + "'");
}

void write_manifest(std::ostream& os, std::string_view id, const BenchSettings& s, const ResultTable& table) {
    os << kBenchVersion << '\n';
    os << "experiment = " << id << '\n';
    os << "rows = " << table.rows.size() << '\n';
    os << "seeds = " << join(s.seeds) << '\n';
    os << "n_values = " << join_num(s.n_values) << '\n';
    os << "treq_values = " << join_num(s.treq_values) << '\n';
    os << "treq_n = " << s.treq_n << '\n';
    os << "pso = swarm " << s.pso.swarm_size << ", iterations " << s.pso.iterations << ", w " << text::fmt(s.pso.w_max)
       << ".." << text::fmt(s.pso.w_min) << ", c " << text::fmt(s.pso.c_cog) << "/" << text::fmt(s.pso.c_soc)
       << ", penalty " << text::fmt(s.pso.penalty) << ", decoder " << to_string(s.pso.decoder) << ", init_velocity "
       << text::fmt(s.pso.init_velocity) << '\n';
    os << "lsfcm = tau " << text::fmt(s.fcm.tau) << ", epsilon " << text::fmt(s.fcm.epsilon) << ", max_iterations "
       << s.fcm.max_iterations << '\n';
    os << "admission_order = " << to_string(s.order) << '\n';
    os << "collect = scenarios " << s.collect_scenarios << ", ue " << s.collect_ue_lo << ".." << s.collect_ue_hi
       << ", seed " << s.collect_seed << ", headroom " << text::fmt(s.headroom) << '\n';
    os << "model = head " << to_string(s.model.head) << ", hidden " << join_num(s.model.hidden) << " "
       << to_string(s.model.hidden_act) << ", output " << to_string(s.model.output_act) << ", freq_scale "
       << to_string(s.model.scale) << '\n';
    os << "train = lr " << text::fmt(s.train.learning_rate) << ", epochs " << s.train.epochs << ", batch "
       << s.train.batch_size << ", train_fraction " << text::fmt(s.train.train_fraction) << ", seed " << s.train.seed
       << '\n';
    os << "holdout = scenarios " << s.holdout_scenarios << ", n " << s.holdout_n << ", slots " << s.holdout_slots
       << ", seed " << s.holdout_seed << '\n';
    os << "oracle = instances " << s.oracle_instances << ", n " << s.oracle_n << '\n';
    os << "samples_path = " << s.samples_path << '\n';
    os << "model_path = " << s.model_path << '\n';
    os << "[config]\n" << format_config(s.sim);
}

std::string write_experiment(std::string_view id, const BenchSettings& s, const ResultTable& table,
                             const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto base = std::filesystem::path(out_dir) / std::string(id);
    const std::string csv = base.string() + ".csv";
    {
        std::ofstream os(csv, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + csv);
        table.write_csv(os);
        if (!os) throw std::runtime_error("write failed for " + csv);
    }
    {
        std::ofstream os(base.string() + ".manifest", std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + base.string() + ".manifest");
        write_manifest(os, id, s, table);
    }
    return csv;
}

} // namespace h2o
