#include "h2o/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "h2o/admission.hpp"
#include "h2o/error.hpp"
#include "h2o/textio.hpp"

namespace h2o {

namespace {

constexpr std::string_view kSampleMagic = "h2o-samples";
constexpr int kSampleVersion = 1;

bool offload_deadline_ok(const Task& task, double rate, double f) {
    if (!(rate > 0.0) || !(f > 0.0)) return false;
    return task.bits / rate + task.cycles / f <= task.deadline * (1.0 + kFeasibilityRelTol);
}

std::vector<std::size_t> co_channel_for(const Scenario& sc, std::size_t ue, std::size_t node,
                                        const ResidualState& state) {
    if (sc.config.interference == InterferenceMode::AllUes) {
        std::vector<std::size_t> all;
        for (std::size_t k = 0; k < sc.num_ues(); ++k)
            if (k != ue) all.push_back(k);
        return all;
    }
    return state.admitted(node);
}

} // namespace

ResidualState::ResidualState(const Scenario& sc)
    : remaining_(sc.num_nodes()), admitted_(sc.num_nodes()), alloc_(sc.num_ues(), 0.0) {
    for (const auto& n : sc.nodes) f_max_.push_back(n.f_max);
    remaining_ = f_max_;
}

double ResidualState::committed(std::size_t node) const {
    double s = 0.0;
    for (auto i : admitted_[node]) s += alloc_[i];
    return s;
}

void ResidualState::commit(std::size_t ue, std::size_t node, double f) {
    if (node >= admitted_.size() || ue >= alloc_.size()) throw ContractError("ResidualState: index out of range");
    if (f > remaining_[node]) throw ContractError("ResidualState: commit exceeds remaining capacity");
    admitted_[node].push_back(ue);
    alloc_[ue] = f;
    remaining_[node] = f_max_[node] - committed(node);
}

void ResidualState::release(std::size_t ue, std::size_t node) {
    auto& a = admitted_.at(node);
    auto it = std::find(a.begin(), a.end(), ue);
    if (it == a.end()) throw ContractError("ResidualState: UE not admitted at node");
    a.erase(it);
    alloc_[ue] = 0.0;
    remaining_[node] = f_max_[node] - committed(node);
}

bool all_pass(const ConstraintBits& bits) {
    return std::all_of(bits.begin(), bits.end(), [](bool b) { return b; });
}

std::string format_bits(const ConstraintBits& bits) {
    std::string s;
    for (bool b : bits) s += b ? '1' : '0';
    return s;
}

ConstraintBits constraint_layer(const Decision& c, std::size_t ue, const ResidualState& state, const Scenario& sc) {
    ConstraintBits bits{};
    const Ue& u = sc.ues.at(ue);
    if (c.a == 0) {
        bool ok = local_deadline_ok(u, local_frequency(u, sc.config.local_policy));
        bits.fill(true);
        bits[kBitLatency] = ok;
        return bits;
    }
    bool valid = c.a > 0 && static_cast<std::size_t>(c.a) <= sc.num_nodes() && std::isfinite(c.f) && c.f > 0.0;
    bits[kBitValidLabel] = valid;
    if (!valid) return bits;

    const std::size_t j = static_cast<std::size_t>(c.a - 1);
    const HmecNode& node = sc.nodes[j];
    auto co = co_channel_for(sc, ue, j, state);
    bits[kBitLatency] = offload_deadline_ok(u.task, achievable_rate(u, node, co, sc), c.f);
    bits[kBitNodeCap] = c.f <= state.remaining(j);
    bits[kBitCoverage] = within_coverage(u, node);
    return bits;
}

Decision decision_layer(const Decision& c, const ConstraintBits& bits, const Ue& ue, LocalPolicy policy) {
    if (c.a != 0 && all_pass(bits)) return c;
    return {0, local_frequency(ue, policy)};
}

const char* to_string(AdmissionOrder o) { return o == AdmissionOrder::Index ? "index" : "demand"; }

AdmissionOrder parse_admission_order(std::string_view s) {
    if (s == "index") return AdmissionOrder::Index;
    if (s == "demand") return AdmissionOrder::DescendingDemand;
    throw ConfigError("unknown admission order '" + std::string(s) + "'");
}

Solution decide_all(const Scenario& sc, const Model& model, double gamma, double tau, AdmissionOrder order,
                    ScheduleTrace* trace) {
    const std::size_t n = sc.num_ues();
    Solution sol = Solution::all_local(n);
    for (std::size_t i = 0; i < n; ++i) sol.f[i] = local_frequency(sc.ues[i], sc.config.local_policy);
    if (n == 0) return sol;
    if (model.net.input_dim() != sc.num_nodes())
        throw ContractError("decide_all: model expects " + std::to_string(model.net.input_dim()) + " nodes, scenario has " +
                            std::to_string(sc.num_nodes()));

    auto u = membership_matrix_u(sc, gamma, tau);
    std::vector<Decision> cand(n);
    for (std::size_t i = 0; i < n; ++i) cand[i] = predict(model, u.row(i));

    std::vector<std::size_t> seq(n);
    std::iota(seq.begin(), seq.end(), 0);
    if (order == AdmissionOrder::DescendingDemand)
        std::stable_sort(seq.begin(), seq.end(), [&](std::size_t x, std::size_t y) { return cand[x].f > cand[y].f; });

    ResidualState state(sc);
    std::vector<ConstraintBits> bits(n);
    for (std::size_t i : seq) {
        bits[i] = constraint_layer(cand[i], i, state, sc);
        Decision d = decision_layer(cand[i], bits[i], sc.ues[i], sc.config.local_policy);
        sol.a[i] = d.a;
        sol.f[i] = d.f;
        if (d.a != 0) state.commit(i, static_cast<std::size_t>(d.a - 1), d.f);
    }

    // Later co-channel admissions can break earlier deadlines; demote until
    // the whole assignment checks out.
    std::vector<std::size_t> demoted;
    for (;;) {
        auto rep = evaluate_solution(sc, sol);
        std::vector<std::size_t> broken;
        for (const auto& v : rep.violated)
            if (v.constraint == ConstraintId::Latency && sol.a[v.ue] != 0) broken.push_back(v.ue);
        if (broken.empty()) break;
        for (auto i : broken) {
            state.release(i, static_cast<std::size_t>(sol.a[i] - 1));
            sol.a[i] = 0;
            sol.f[i] = local_frequency(sc.ues[i], sc.config.local_policy);
            demoted.push_back(i);
        }
    }

    if (trace) {
        trace->candidates = std::move(cand);
        trace->bits = std::move(bits);
        trace->order = std::move(seq);
        trace->demoted = std::move(demoted);
    }
    return sol;
}

std::vector<Sample> label_samples(const Scenario& sc, const Solution& sol, const MembershipMatrix& u, double headroom,
                                  std::uint64_t scenario_index) {
    const std::size_t n = sc.num_ues();
    if (sol.size() != n || u.rows() != n) throw ContractError("label_samples: sizes do not match the scenario");
    if (headroom < 0.0) throw ContractError("label_samples: headroom must be >= 0");

    std::vector<std::vector<std::size_t>> members(sc.num_nodes());
    for (std::size_t i = 0; i < n; ++i)
        if (sol.a[i] > 0) members[static_cast<std::size_t>(sol.a[i] - 1)].push_back(i);

    std::vector<Sample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Sample& s = out[i];
        auto row = u.row(i);
        s.u.assign(row.begin(), row.end());
        s.meta = {scenario_index, sc.seed, sc.slot, static_cast<std::uint64_t>(sc.ues[i].id)};
        s.a = 0;
        s.f = local_frequency(sc.ues[i], sc.config.local_policy);
    }
    for (std::size_t j = 0; j < members.size(); ++j) {
        if (members[j].empty()) continue;
        auto rates = member_rates(sc, j, members[j]);
        for (std::size_t k = 0; k < members[j].size(); ++k) {
            std::size_t i = members[j][k];
            if (!within_coverage(sc.ues[i], sc.nodes[j])) continue;
            auto fmin = min_feasible_frequency(sc.ues[i].task, rates[k]);
            if (!fmin) continue;
            out[i].a = static_cast<int>(j) + 1;
            out[i].f = *fmin * (1.0 + headroom);
        }
    }
    return out;
}

void SampleDb::append(Sample s) {
    if (width_ == 0) width_ = s.u.size();
    if (s.u.size() != width_) throw ContractError("SampleDb: sample width does not match the database");
    samples_.push_back(std::move(s));
}

double SampleDb::nearest_distance(std::span<const double> u) const {
    if (!samples_.empty() && u.size() != width_) throw ContractError("SampleDb: query width does not match");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : samples_) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            double d = u[k] - s.u[k];
            d2 += d * d;
        }
        best = std::min(best, d2);
    }
    return std::sqrt(best);
}

void SampleDb::write(std::ostream& os) const {
    os << kSampleMagic << ' ' << kSampleVersion << ' ' << width_ << '\n';
    os << "# s scenario seed slot ue a f u\n";
    for (const auto& s : samples_) {
        os << "s " << s.meta.scenario << ' ' << s.meta.seed << ' ' << s.meta.slot << ' ' << s.meta.ue << ' ' << s.a << ' '
           << text::fmt(s.f) << ' ' << text::fmt(s.u, ',') << '\n';
    }
}

SampleDb SampleDb::read(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    SampleDb db;
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto tok = text::tokens(t);
        auto where = "sample file line " + std::to_string(lineno);
        if (!header) {
            if (tok.size() != 3 || tok[0] != kSampleMagic) throw ConfigError(where + ": missing header");
            if (text::parse_int(tok[1]) != kSampleVersion) throw ConfigError(where + ": unsupported version");
            db.width_ = static_cast<std::size_t>(text::parse_int(tok[2]));
            header = true;
            continue;
        }
        if (tok.size() != 8 || tok[0] != "s") throw ConfigError(where + ": expected 8 fields");
        Sample s;
        try {
            s.meta.scenario = static_cast<std::uint64_t>(text::parse_int(tok[1]));
            s.meta.seed = static_cast<std::uint64_t>(text::parse_int(tok[2]));
            s.meta.slot = static_cast<std::uint64_t>(text::parse_int(tok[3]));
            s.meta.ue = static_cast<std::uint64_t>(text::parse_int(tok[4]));
            s.a = static_cast<int>(text::parse_int(tok[5]));
            s.f = text::parse_double(tok[6]);
            s.u = text::parse_doubles(tok[7], ',');
        } catch (const std::exception& e) {
            throw ConfigError(where + ": " + e.what());
        }
        if (s.u.size() != db.width_) throw ConfigError(where + ": u has the wrong width");
        if (s.a < 0 || static_cast<std::size_t>(s.a) > db.width_) throw ConfigError(where + ": label out of range");
        db.samples_.push_back(std::move(s));
    }
    if (!header) throw ConfigError("sample file: empty");
    return db;
}

void SampleDb::save(const std::string& path) const {
    const std::string tmp = path + ".partial";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
        write(os);
        os.flush();
        if (!os) throw std::runtime_error("write failed, partial database left at " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

SampleDb SampleDb::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open sample database " + path);
    return read(is);
}

const char* to_string(Novelty n) { return n == Novelty::Known ? "KNOWN" : "NOVEL"; }

Novelty feedback_check(const SampleDb& db, std::span<const double> u, double delta) {
    if (!(delta > 0.0)) throw ContractError("feedback_check: delta must be positive");
    if (db.empty()) return Novelty::Novel;
    return db.nearest_distance(u) > delta ? Novelty::Novel : Novelty::Known;
}

std::size_t feedback_update(SampleDb& db, const Scenario& sc, const PsoParams& params, std::uint64_t seed,
                            double gamma, double tau, double delta, double headroom, std::uint64_t scenario_index) {
    if (sc.num_ues() == 0) return 0;
    auto u = membership_matrix_u(sc, gamma, tau);
    std::vector<std::size_t> novel;
    for (std::size_t i = 0; i < sc.num_ues(); ++i)
        if (feedback_check(db, u.row(i), delta) == Novelty::Novel) novel.push_back(i);
    if (novel.empty()) return 0;
    auto res = solve(sc, params, seed, gamma, tau);
    auto labelled = label_samples(sc, res.solution, u, headroom, scenario_index);
    for (auto i : novel) db.append(labelled[i]);
    return novel.size();
}

} // namespace h2o
