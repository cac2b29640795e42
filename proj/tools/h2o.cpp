// h2o: command-line front end for scenario generation, placement, solving,
// sample collection, training, online decisions and the benchmark suite.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "h2o/baselines.hpp"
#include "h2o/bench.hpp"
#include "h2o/error.hpp"
#include "h2o/lsfcm.hpp"
#include "h2o/oracle.hpp"
#include "h2o/scheduler.hpp"
#include "h2o/textio.hpp"
#include "h2o/upso.hpp"

namespace {

using namespace h2o;

struct Globals {
    std::uint64_t seed = 1;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out;
    bool quiet = false;
};

SimConfig load_sim_config(const Globals& g) {
    SimConfig cfg = g.config_path.empty() ? SimConfig{} : load_config(g.config_path);
    for (const auto& kv : g.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        set_config_value(cfg, std::string(text::trim(kv.substr(0, eq))), std::string(text::trim(kv.substr(eq + 1))));
    }
    cfg.validate();
    return cfg;
}

// Writes through `fn` to --out, or stdout when --out is empty.
template <class Fn> void emit(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    fn(os);
    if (!os) throw std::runtime_error("write failed for " + path);
}

Scenario read_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open scenario file " + path);
    return read_scenario(is);
}

Model read_model_file(const std::string& path) {
    if (path.empty()) throw std::runtime_error("the dnn policy needs --model <file> (create one with `h2o train`)");
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open model file " + path + " (create one with `h2o train`)");
    return read_model(is);
}

// A placed scenario from --in, or generated from --seed/--config and placed.
Scenario scenario_input(const Globals& g, const std::string& in, std::size_t n_override) {
    if (!in.empty()) return read_scenario_file(in);
    SimConfig cfg = load_sim_config(g);
    if (n_override > 0) cfg.num_ue = n_override;
    return prepare_scenario(cfg, g.seed, LsfcmParams{cfg.tau, 1e-4, 100});
}

void write_solution(std::ostream& os, const Scenario& sc, const Solution& sol, const std::string& policy) {
    auto rep = evaluate_solution(sc, sol);
    os << "solution policy=" << policy << " seed=" << sc.seed << " slot=" << sc.slot << " ues=" << sol.size()
       << " energy=" << text::fmt(rep.total_energy) << " admitted=" << rep.admitted
       << " feasible=" << (rep.feasible ? 1 : 0) << '\n';
    os << "# ue label frequency energy rate\n";
    for (std::size_t i = 0; i < sol.size(); ++i) {
        os << "ue " << i << ' ' << sol.a[i] << ' ' << text::fmt(sol.f[i]) << ' ' << text::fmt(rep.per_ue_energy[i]) << ' '
           << text::fmt(rep.per_ue_rate[i]) << '\n';
    }
    for (const auto& v : rep.violated) os << "violation " << v.ue << ' ' << to_string(v.constraint) << '\n';
    os << "end\n";
}

PsoParams pso_params(std::size_t swarm, std::size_t iters, const std::string& decoder) {
    PsoParams p;
    p.swarm_size = swarm;
    p.iterations = iters;
    p.decoder = parse_decoder(decoder);
    p.validate();
    return p;
}

struct ModelFlags {
    std::string head = "regression";
    std::string scale = "log";
    std::size_t layers = 6;
    std::size_t width = 30;
    std::string hidden_act = "relu";
    std::string output_act = "sigmoid";
    double lr = 0.01;
    std::size_t epochs = 500;
    std::size_t batch = 32;
    std::uint64_t train_seed = 1;

    void add_to(CLI::App* app) {
        app->add_option("--head", head, "regression or classification")->capture_default_str();
        app->add_option("--freq-scale", scale, "frequency target scale: log or linear")->capture_default_str();
        app->add_option("--layers", layers, "hidden layers")->capture_default_str();
        app->add_option("--width", width, "nodes per hidden layer")->capture_default_str();
        app->add_option("--hidden-act", hidden_act, "relu, tanh, sigmoid or identity")->capture_default_str();
        app->add_option("--output-act", output_act, "output activation of the regression head")->capture_default_str();
        app->add_option("--lr", lr, "learning rate")->capture_default_str();
        app->add_option("--epochs", epochs, "training epochs")->capture_default_str();
        app->add_option("--batch", batch, "mini-batch size")->capture_default_str();
        app->add_option("--train-seed", train_seed, "seed for init, split and shuffling")->capture_default_str();
    }
    void apply(BenchSettings& s) const {
        s.model.head = parse_head(head);
        s.model.scale = parse_freq_scale(scale);
        s.model.hidden.assign(layers, width);
        s.model.hidden_act = parse_activation(hidden_act);
        s.model.output_act = parse_activation(output_act);
        s.train.learning_rate = lr;
        s.train.epochs = epochs;
        s.train.batch_size = batch;
        s.train.seed = train_seed;
        s.train.validate();
    }
};

void logger(const Globals& g, const std::string& msg) {
    if (!g.quiet) std::cerr << msg << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid MEC offloading toolkit: LS-FCM placement, U-PSO, DNN scheduling and benchmarks"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--config", g.config_path, "Configuration file (key = value lines)");
    app.add_option("--set", g.overrides, "Override a configuration key, key=value (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_option("--out", g.out, "Output file (directory for bench); stdout when omitted");
    app.add_flag("--quiet", g.quiet, "Suppress progress messages");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a scenario (UAV/GV at the origin, not yet placed)");
    std::size_t gen_n = 0;
    std::uint64_t gen_slot = 0;
    gen->add_option("--n", gen_n, "Number of UEs (overrides the configuration)");
    gen->add_option("--slot", gen_slot, "Fading slot");

    // place
    auto* place = app.add_subcommand("place", "Run LS-FCM and move UAVs/GVs to their cluster centers");
    std::string place_in;
    std::size_t place_n = 0;
    LsfcmParams fcm;
    place->add_option("--in", place_in, "Scenario file from `gen` (generated from --seed when omitted)");
    place->add_option("--n", place_n, "Number of UEs when generating");
    place->add_option("--epsilon", fcm.epsilon, "Objective change threshold")->capture_default_str();
    place->add_option("--max-iter", fcm.max_iterations, "Iteration cap")->capture_default_str();

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Decide offloading with one policy");
    std::string solve_in, policy = "pso", solve_model, decoder = "admission";
    std::size_t solve_n = 0, swarm = 10, iters = 100;
    std::string trace_path;
    solve_cmd->add_option("--in", solve_in, "Placed scenario file (generated and placed from --seed when omitted)");
    solve_cmd->add_option("--n", solve_n, "Number of UEs when generating");
    solve_cmd->add_option("--policy", policy, "local, random, greedy, pso or dnn")->capture_default_str();
    solve_cmd->add_option("--model", solve_model, "Model file for the dnn policy");
    solve_cmd->add_option("--swarm", swarm, "PSO swarm size")->capture_default_str();
    solve_cmd->add_option("--iterations", iters, "PSO iterations")->capture_default_str();
    solve_cmd->add_option("--decoder", decoder, "PSO decoder: admission or penalty")->capture_default_str();
    solve_cmd->add_option("--trace", trace_path, "Write the PSO best-fitness trace as CSV");

    // collect
    auto* collect = app.add_subcommand("collect", "Collect labelled samples from solved scenarios");
    std::size_t n_scen = 200, ue_lo = 10, ue_hi = 10;
    std::string source = "pso";
    double headroom = 0.02;
    collect->add_option("--scenarios", n_scen, "Number of scenarios")->capture_default_str();
    collect->add_option("--ue-min", ue_lo, "Smallest N")->capture_default_str();
    collect->add_option("--ue-max", ue_hi, "Largest N")->capture_default_str();
    collect->add_option("--source", source, "Labelling solver: pso, greedy or random")->capture_default_str();
    collect->add_option("--headroom", headroom, "Frequency label headroom over the minimum")->capture_default_str();
    collect->add_option("--swarm", swarm, "PSO swarm size")->capture_default_str();
    collect->add_option("--iterations", iters, "PSO iterations")->capture_default_str();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the network on a sample database");
    std::string samples_path, report_path;
    ModelFlags mf;
    train_cmd->add_option("--samples", samples_path, "Sample database from `collect`")->required();
    train_cmd->add_option("--report", report_path, "Write per-epoch losses as CSV");
    mf.add_to(train_cmd);

    // decide
    auto* decide = app.add_subcommand("decide", "Online decisions: network + scheduling layer");
    std::string decide_in, decide_model, order = "index", db_path;
    std::size_t decide_n = 0;
    double delta = 0.05;
    decide->add_option("--in", decide_in, "Placed scenario file (generated and placed from --seed when omitted)");
    decide->add_option("--n", decide_n, "Number of UEs when generating");
    decide->add_option("--model", decide_model, "Model file from `train`")->required();
    decide->add_option("--order", order, "Admission order: index or demand")->capture_default_str();
    decide->add_option("--feedback", db_path, "Sample database to grow with NOVEL rows (resolved by U-PSO)");
    decide->add_option("--delta", delta, "Novelty distance threshold")->capture_default_str();

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark experiment, writing <out>/<id>.csv and a manifest");
    std::string exp_id, bench_samples, bench_model;
    std::size_t n_seeds = 20;
    ModelFlags bmf;
    bench->add_option("experiment", exp_id, "Experiment id")->required();
    bench->add_option("--seeds", n_seeds, "Seeds 1..k per sweep point")->capture_default_str();
    bench->add_option("--samples", bench_samples, "Use this sample database instead of collecting");
    bench->add_option("--model", bench_model, "Use this model instead of training");
    bench->add_option("--scenarios", n_scen, "Scenarios collected for training")->capture_default_str();
    bench->add_option("--swarm", swarm, "PSO swarm size")->capture_default_str();
    bench->add_option("--iterations", iters, "PSO iterations")->capture_default_str();
    bench->add_option("--headroom", headroom, "Frequency label headroom")->capture_default_str();
    bmf.add_to(bench);

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum for small instances (N <= 6, <= 3 nodes); generated instances use one UAV and one GS with constant fading");
    std::string oracle_in;
    std::size_t oracle_n = 4;
    oracle->add_option("--in", oracle_in, "Placed scenario file");
    oracle->add_option("--n", oracle_n, "Number of UEs when generating")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*gen) {
            SimConfig cfg = load_sim_config(g);
            if (gen_n > 0) cfg.num_ue = gen_n;
            Scenario sc = generate_scenario(cfg, g.seed);
            if (gen_slot) sc = resample_fading(sc, gen_slot);
            emit(g.out, [&](std::ostream& os) { write_scenario(os, sc); });
        } else if (*place) {
            Scenario sc;
            if (place_in.empty()) {
                SimConfig cfg = load_sim_config(g);
                if (place_n > 0) cfg.num_ue = place_n;
                sc = generate_scenario(cfg, g.seed);
            } else {
                sc = read_scenario_file(place_in);
            }
            fcm.tau = sc.config.tau;
            Scenario placed = place_nodes(sc, fcm);
            emit(g.out, [&](std::ostream& os) { write_scenario(os, placed); });
        } else if (*solve_cmd) {
            Scenario sc = scenario_input(g, solve_in, solve_n);
            Policy p = parse_policy(policy);
            BenchSettings s;
            s.pso = pso_params(swarm, iters, decoder);
            Solution sol;
            if (p == Policy::Pso) {
                auto res = solve(sc, s.pso, g.seed, sc.config.gamma, sc.config.tau);
                sol = res.solution;
                if (!trace_path.empty()) {
                    emit(trace_path, [&](std::ostream& os) {
                        os << "iteration,best_fitness\n";
                        for (std::size_t t = 0; t < res.trace.size(); ++t) os << t << ',' << text::fmt(res.trace[t]) << '\n';
                    });
                }
            } else if (p == Policy::Dnn) {
                Model m = read_model_file(solve_model);
                sol = run_policy(p, sc, s, &m, g.seed);
            } else {
                sol = run_policy(p, sc, s, nullptr, g.seed);
            }
            emit(g.out, [&](std::ostream& os) { write_solution(os, sc, sol, policy); });
        } else if (*collect) {
            BenchSettings s;
            s.sim = load_sim_config(g);
            s.fcm.tau = s.sim.tau;
            s.pso = pso_params(swarm, iters, "admission");
            s.collect_scenarios = n_scen;
            s.collect_ue_lo = ue_lo;
            s.collect_ue_hi = ue_hi;
            s.collect_seed = g.seed;
            s.headroom = headroom;
            s.log = [&](const std::string& m) { logger(g, m); };
            SampleDb db = collect_samples(s, parse_sample_source(source));
            if (g.out.empty()) {
                db.write(std::cout);
            } else {
                db.save(g.out);
                logger(g, "wrote " + std::to_string(db.size()) + " samples to " + g.out);
            }
        } else if (*train_cmd) {
            BenchSettings s;
            s.sim = load_sim_config(g);
            mf.apply(s);
            s.log = [&](const std::string& m) { logger(g, m); };
            SampleDb db = SampleDb::load(samples_path);
            if (db.width() != s.sim.num_nodes())
                throw ConfigError("samples have " + std::to_string(db.width()) + " nodes, configuration has " +
                                  std::to_string(s.sim.num_nodes()));
            TrainedModel tm = train_model(s, db);
            emit(g.out, [&](std::ostream& os) { write_model(os, tm.model); });
            if (!report_path.empty())
                emit(report_path, [&](std::ostream& os) { write_train_report_csv(os, tm.report); });
            logger(g, "test loss " + text::fmt(tm.report.epochs.back().test_loss) + ", |error| <= 0.05 for " +
                          text::fmt(tm.report.fraction_errors_within(0.05)) + " of test outputs");
        } else if (*decide) {
            Scenario sc = scenario_input(g, decide_in, decide_n);
            Model m = read_model_file(decide_model);
            ScheduleTrace trace;
            Solution sol = decide_all(sc, m, sc.config.gamma, sc.config.tau, parse_admission_order(order), &trace);
            emit(g.out, [&](std::ostream& os) { write_solution(os, sc, sol, "dnn"); });
            if (!db_path.empty()) {
                SampleDb db = std::filesystem::exists(db_path) ? SampleDb::load(db_path) : SampleDb(sc.num_nodes());
                std::size_t added = feedback_update(db, sc, PsoParams{}, g.seed, sc.config.gamma, sc.config.tau, delta,
                                                    0.02, sc.seed);
                db.save(db_path);
                logger(g, "feedback: " + std::to_string(added) + " novel samples appended to " + db_path);
            }
        } else if (*bench) {
            if (!is_experiment(exp_id)) {
                std::cerr << "error: unknown experiment '" << exp_id << "'; choose one of:";
                for (const char* e : kExperimentIds) std::cerr << ' ' << e;
                std::cerr << '\n';
                return 1;
            }
            BenchSettings s;
            s.sim = load_sim_config(g);
            s.fcm.tau = s.sim.tau;
            s.seeds = BenchSettings::default_seeds(n_seeds);
            s.pso = pso_params(swarm, iters, "admission");
            s.collect_scenarios = n_scen;
            s.headroom = headroom;
            s.samples_path = bench_samples;
            s.model_path = bench_model;
            bmf.apply(s);
            s.log = [&](const std::string& m) { logger(g, m); };
            ResultTable t = run_experiment(exp_id, s);
            std::string dir = g.out.empty() ? "results" : g.out;
            std::string csv = write_experiment(exp_id, s, t, dir);
            logger(g, "wrote " + std::to_string(t.rows.size()) + " rows to " + csv);
        } else if (*oracle) {
            Scenario sc;
            if (oracle_in.empty()) {
                SimConfig cfg = oracle_instance_config(load_sim_config(g), oracle_n);
                sc = prepare_scenario(cfg, g.seed, LsfcmParams{cfg.tau, 1e-4, 100});
            } else {
                sc = read_scenario_file(oracle_in);
            }
            OracleResult r = brute_force_oracle(sc);
            emit(g.out, [&](std::ostream& os) { write_solution(os, sc, r.solution, "oracle"); });
        }
    } catch (const RefusalError& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
