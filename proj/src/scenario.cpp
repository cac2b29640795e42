#include "h2o/scenario.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "h2o/error.hpp"
#include "h2o/rng.hpp"
#include "h2o/textio.hpp"

namespace h2o {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

double draw_fading(FadingModel model, std::uint64_t seed, std::uint64_t slot, std::size_t node) {
    if (model == FadingModel::Constant) return 1.0;
    Rng rng(seed, Stream::Fading, slot, node);
    return rng.exponential();
}

std::string format_points(const std::vector<Point>& pts) {
    std::string out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ';';
        out += text::fmt(pts[i].x) + "," + text::fmt(pts[i].y);
    }
    return out;
}

std::vector<Point> parse_points(std::string_view value) {
    std::vector<Point> pts;
    if (text::trim(value).empty()) return pts;
    for (auto item : text::split(value, ';')) {
        auto xy = text::parse_doubles(item);
        require(xy.size() == 2, "gs_positions: expected 'x,y' pairs separated by ';'");
        pts.push_back({xy[0], xy[1]});
    }
    return pts;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
    long long v = text::parse_int(value);
    require(v >= 0, std::string(key) + " must be non-negative");
    return static_cast<std::size_t>(v);
}

} // namespace

void SimConfig::validate() const {
    require(radius > 0.0, "radius must be positive");
    require(num_nodes() >= 1, "at least one H-MEC node is required");
    require(gs_positions.size() >= num_gs, "gs_positions lists fewer coordinates than num_gs");
    require(task_cycles > 0.0, "task_cycles must be positive");
    require(task_bits > 0.0, "task_bits must be positive");
    require(deadline > 0.0, "deadline must be positive");
    require(tx_power > 0.0, "tx_power must be positive");
    require(local_fmax > 0.0, "local_fmax must be positive");
    require(uav_fmax > 0.0 && gv_fmax > 0.0 && gs_fmax > 0.0, "node capacities must be positive");
    require(uav_altitude > 0.0, "uav_altitude must be positive");
    require(uav_half_angle_deg > 0.0 && uav_half_angle_deg < 90.0, "uav_half_angle_deg must lie in (0, 90)");
    require(bandwidth > 0.0, "bandwidth must be positive");
    require(noise_power > 0.0, "noise_power must be positive");
    require(kappa > 0.0, "kappa must be positive");
    require(gamma >= 0.0, "gamma must be non-negative");
    require(tau > 1.0, "tau must exceed 1");
}

Scenario generate_scenario(const SimConfig& config, std::uint64_t seed) {
    config.validate();
    Scenario sc;
    sc.config = config;
    sc.seed = seed;
    sc.slot = 0;

    Rng rng(seed, Stream::UePositions);
    sc.ues.reserve(config.num_ue);
    for (std::size_t i = 0; i < config.num_ue; ++i) {
        double r = config.radius * std::sqrt(rng.uniform());
        double theta = 2.0 * std::numbers::pi * rng.uniform();
        Ue ue;
        ue.id = i;
        ue.pos = {r * std::cos(theta), r * std::sin(theta)};
        ue.task = {config.task_cycles, config.task_bits, config.deadline};
        ue.p_tx = config.tx_power;
        ue.f_local_max = config.local_fmax;
        sc.ues.push_back(ue);
    }

    const double half_angle = config.uav_half_angle_deg * std::numbers::pi / 180.0;
    auto add_node = [&](NodeKind kind, Point pos, double fmax) {
        HmecNode n;
        n.id = sc.nodes.size();
        n.kind = kind;
        n.pos = pos;
        n.f_max = fmax;
        if (kind == NodeKind::UAV) {
            n.altitude = config.uav_altitude;
            n.antenna_angle = half_angle;
        }
        n.fading = draw_fading(config.fading, seed, 0, n.id);
        sc.nodes.push_back(n);
    };
    for (std::size_t j = 0; j < config.num_uav; ++j) add_node(NodeKind::UAV, {}, config.uav_fmax);
    for (std::size_t j = 0; j < config.num_gv; ++j) add_node(NodeKind::GV, {}, config.gv_fmax);
    for (std::size_t j = 0; j < config.num_gs; ++j) add_node(NodeKind::GS, config.gs_positions[j], config.gs_fmax);
    return sc;
}

Scenario resample_fading(const Scenario& scenario, std::uint64_t slot) {
    Scenario out = scenario;
    out.slot = slot;
    for (auto& n : out.nodes) n.fading = draw_fading(out.config.fading, out.seed, slot, n.id);
    return out;
}

const char* to_string(NodeKind kind) {
    switch (kind) {
    case NodeKind::UAV: return "uav";
    case NodeKind::GV: return "gv";
    case NodeKind::GS: return "gs";
    }
    return "?";
}

const char* to_string(FadingModel model) {
    return model == FadingModel::Constant ? "constant" : "exponential";
}

const char* to_string(LocalPolicy policy) {
    return policy == LocalPolicy::Fixed ? "fixed" : "energy_opt";
}

const char* to_string(InterferenceMode mode) {
    return mode == InterferenceMode::AllUes ? "all_ues" : "co_assigned";
}

void set_config_value(SimConfig& c, const std::string& key, const std::string& raw) {
    std::string_view value = text::trim(raw);
    try {
        if (key == "radius") c.radius = text::parse_double(value);
        else if (key == "num_uav") c.num_uav = parse_count(key, value);
        else if (key == "num_gv") c.num_gv = parse_count(key, value);
        else if (key == "num_gs") c.num_gs = parse_count(key, value);
        else if (key == "num_ue") c.num_ue = parse_count(key, value);
        else if (key == "gs_positions") c.gs_positions = parse_points(value);
        else if (key == "task_cycles") c.task_cycles = text::parse_double(value);
        else if (key == "task_bits") c.task_bits = text::parse_double(value);
        else if (key == "deadline") c.deadline = text::parse_double(value);
        else if (key == "tx_power") c.tx_power = text::parse_double(value);
        else if (key == "local_fmax") c.local_fmax = text::parse_double(value);
        else if (key == "uav_fmax") c.uav_fmax = text::parse_double(value);
        else if (key == "gv_fmax") c.gv_fmax = text::parse_double(value);
        else if (key == "gs_fmax") c.gs_fmax = text::parse_double(value);
        else if (key == "uav_altitude") c.uav_altitude = text::parse_double(value);
        else if (key == "uav_half_angle_deg") c.uav_half_angle_deg = text::parse_double(value);
        else if (key == "bandwidth") c.bandwidth = text::parse_double(value);
        else if (key == "noise_power") c.noise_power = text::parse_double(value);
        else if (key == "kappa") c.kappa = text::parse_double(value);
        else if (key == "gamma") c.gamma = text::parse_double(value);
        else if (key == "tau") c.tau = text::parse_double(value);
        else if (key == "fading") {
            if (value == "exponential") c.fading = FadingModel::Exponential;
            else if (value == "constant") c.fading = FadingModel::Constant;
            else throw ConfigError("fading must be 'exponential' or 'constant'");
        } else if (key == "local_policy") {
            if (value == "energy_opt") c.local_policy = LocalPolicy::EnergyOpt;
            else if (value == "fixed") c.local_policy = LocalPolicy::Fixed;
            else throw ConfigError("local_policy must be 'energy_opt' or 'fixed'");
        } else if (key == "interference") {
            if (value == "co_assigned") c.interference = InterferenceMode::CoAssigned;
            else if (value == "all_ues") c.interference = InterferenceMode::AllUes;
            else throw ConfigError("interference must be 'co_assigned' or 'all_ues'");
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const std::invalid_argument& e) {
        if (dynamic_cast<const ConfigError*>(&e)) throw;
        throw ConfigError(key + ": " + e.what());
    }
}

SimConfig parse_config(const std::string& body) {
    SimConfig c;
    std::istringstream in(body);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto view = text::trim(line);
        if (view.empty()) continue;
        auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key(text::trim(view.substr(0, eq)));
        set_config_value(c, key, std::string(view.substr(eq + 1)));
    }
    c.validate();
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_config(const SimConfig& c) {
    std::ostringstream out;
    out << "radius = " << text::fmt(c.radius) << '\n'
        << "num_uav = " << c.num_uav << '\n'
        << "num_gv = " << c.num_gv << '\n'
        << "num_gs = " << c.num_gs << '\n'
        << "num_ue = " << c.num_ue << '\n'
        << "gs_positions = " << format_points(c.gs_positions) << '\n'
        << "task_cycles = " << text::fmt(c.task_cycles) << '\n'
        << "task_bits = " << text::fmt(c.task_bits) << '\n'
        << "deadline = " << text::fmt(c.deadline) << '\n'
        << "tx_power = " << text::fmt(c.tx_power) << '\n'
        << "local_fmax = " << text::fmt(c.local_fmax) << '\n'
        << "uav_fmax = " << text::fmt(c.uav_fmax) << '\n'
        << "gv_fmax = " << text::fmt(c.gv_fmax) << '\n'
        << "gs_fmax = " << text::fmt(c.gs_fmax) << '\n'
        << "uav_altitude = " << text::fmt(c.uav_altitude) << '\n'
        << "uav_half_angle_deg = " << text::fmt(c.uav_half_angle_deg) << '\n'
        << "bandwidth = " << text::fmt(c.bandwidth) << '\n'
        << "noise_power = " << text::fmt(c.noise_power) << '\n'
        << "kappa = " << text::fmt(c.kappa) << '\n'
        << "gamma = " << text::fmt(c.gamma) << '\n'
        << "tau = " << text::fmt(c.tau) << '\n'
        << "fading = " << to_string(c.fading) << '\n'
        << "local_policy = " << to_string(c.local_policy) << '\n'
        << "interference = " << to_string(c.interference) << '\n';
    return out.str();
}

void write_scenario(std::ostream& out, const Scenario& sc) {
    // The config travels as a single line of `key=value` pairs joined by '|'.
    std::string cfg = format_config(sc.config);
    std::string packed;
    std::istringstream lines(cfg);
    std::string line;
    while (std::getline(lines, line)) {
        if (!packed.empty()) packed += '|';
        packed += line;
    }
    out << "config " << packed << '\n';
    out << "scenario seed=" << sc.seed << " slot=" << sc.slot << " ues=" << sc.ues.size()
        << " nodes=" << sc.nodes.size() << '\n';
    for (const auto& u : sc.ues) {
        out << "ue " << u.id << ' ' << text::fmt(u.pos.x) << ' ' << text::fmt(u.pos.y) << ' '
            << text::fmt(u.task.cycles) << ' ' << text::fmt(u.task.bits) << ' ' << text::fmt(u.task.deadline)
            << ' ' << text::fmt(u.p_tx) << ' ' << text::fmt(u.f_local_max) << '\n';
    }
    for (const auto& n : sc.nodes) {
        out << "node " << n.id << ' ' << to_string(n.kind) << ' ' << text::fmt(n.pos.x) << ' '
            << text::fmt(n.pos.y) << ' ' << text::fmt(n.altitude) << ' ' << text::fmt(n.f_max) << ' '
            << text::fmt(n.antenna_angle) << ' ' << text::fmt(n.fading) << '\n';
    }
    out << "end\n";
}

Scenario read_scenario(std::istream& in) {
    Scenario sc;
    std::string line;
    bool have_header = false;
    std::size_t want_ues = 0, want_nodes = 0;
    auto fail = [](const std::string& what) -> void { throw ConfigError("scenario record: " + what); };

    while (std::getline(in, line)) {
        auto view = text::trim(line);
        if (view.empty()) continue;
        if (view.starts_with("config ")) {
            std::string body(view.substr(7));
            for (auto& ch : body)
                if (ch == '|') ch = '\n';
            sc.config = parse_config(body);
            continue;
        }
        auto tok = text::tokens(view);
        if (tok[0] == "scenario") {
            for (std::size_t k = 1; k < tok.size(); ++k) {
                auto kv = text::split(tok[k], '=');
                if (kv.size() != 2) fail("bad header field");
                auto v = static_cast<std::uint64_t>(text::parse_int(kv[1]));
                if (kv[0] == "seed") sc.seed = v;
                else if (kv[0] == "slot") sc.slot = v;
                else if (kv[0] == "ues") want_ues = v;
                else if (kv[0] == "nodes") want_nodes = v;
            }
            have_header = true;
        } else if (tok[0] == "ue") {
            if (tok.size() != 9) fail("ue line needs 8 fields");
            Ue u;
            u.id = static_cast<std::size_t>(text::parse_int(tok[1]));
            u.pos = {text::parse_double(tok[2]), text::parse_double(tok[3])};
            u.task = {text::parse_double(tok[4]), text::parse_double(tok[5]), text::parse_double(tok[6])};
            u.p_tx = text::parse_double(tok[7]);
            u.f_local_max = text::parse_double(tok[8]);
            sc.ues.push_back(u);
        } else if (tok[0] == "node") {
            if (tok.size() != 9) fail("node line needs 8 fields");
            HmecNode n;
            n.id = static_cast<std::size_t>(text::parse_int(tok[1]));
            if (tok[2] == "uav") n.kind = NodeKind::UAV;
            else if (tok[2] == "gv") n.kind = NodeKind::GV;
            else if (tok[2] == "gs") n.kind = NodeKind::GS;
            else fail("unknown node kind");
            n.pos = {text::parse_double(tok[3]), text::parse_double(tok[4])};
            n.altitude = text::parse_double(tok[5]);
            n.f_max = text::parse_double(tok[6]);
            n.antenna_angle = text::parse_double(tok[7]);
            n.fading = text::parse_double(tok[8]);
            sc.nodes.push_back(n);
        } else if (tok[0] == "end") {
            break;
        } else {
            fail("unknown record '" + std::string(tok[0]) + "'");
        }
    }
    if (!have_header) fail("missing scenario header");
    if (sc.ues.size() != want_ues || sc.nodes.size() != want_nodes) fail("entity count mismatch");
    return sc;
}

} // namespace h2o
