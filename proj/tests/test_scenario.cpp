#include <doctest.h>

#include <sstream>

#include "h2o/error.hpp"
#include "h2o/rng.hpp"
#include "h2o/scenario.hpp"
#include "support.hpp"

using namespace h2o;
using namespace h2o::testing;

namespace {

std::string dump(const Scenario& sc) {
    std::ostringstream os;
    write_scenario(os, sc);
    return os.str();
}

} // namespace

TEST_CASE("default scenario has five nodes with the GS pinned") {
    SimConfig cfg;
    cfg.radius = 100.0;
    Scenario sc = generate_scenario(cfg, 1);
    REQUIRE(sc.num_nodes() == 5);
    CHECK(sc.nodes[0].kind == NodeKind::UAV);
    CHECK(sc.nodes[1].kind == NodeKind::UAV);
    CHECK(sc.nodes[2].kind == NodeKind::UAV);
    CHECK(sc.nodes[3].kind == NodeKind::GV);
    CHECK(sc.nodes[4].kind == NodeKind::GS);
    CHECK(sc.nodes[4].pos == Point{50.0, 50.0});
    for (std::size_t j = 0; j < 4; ++j) CHECK(sc.nodes[j].pos == Point{0.0, 0.0});
    CHECK(sc.nodes[0].altitude == 20.0);
    CHECK(sc.num_ues() == 10);
}

TEST_CASE("zero UEs is a valid scenario") {
    SimConfig cfg;
    cfg.num_ue = 0;
    Scenario sc = generate_scenario(cfg, 3);
    CHECK(sc.ues.empty());
    CHECK(sc.num_nodes() == 5);
}

TEST_CASE("generation is deterministic per seed") {
    SimConfig cfg;
    cfg.num_ue = 25;
    CHECK(dump(generate_scenario(cfg, 42)) == dump(generate_scenario(cfg, 42)));
    CHECK(generate_scenario(cfg, 42) == generate_scenario(cfg, 42));
    CHECK_FALSE(generate_scenario(cfg, 42) == generate_scenario(cfg, 43));
}

TEST_CASE("resampling fading keeps geometry") {
    SimConfig cfg;
    Scenario a = generate_scenario(cfg, 7);
    Scenario b = resample_fading(a, 1);
    CHECK(b.slot == 1);
    CHECK(a.ues == b.ues);
    bool differs = false;
    for (std::size_t j = 0; j < a.num_nodes(); ++j) {
        CHECK(a.nodes[j].pos == b.nodes[j].pos);
        differs |= a.nodes[j].fading != b.nodes[j].fading;
    }
    CHECK(differs);
    CHECK(resample_fading(a, 0) == a);
}

TEST_CASE("constant fading gives unit gains") {
    SimConfig cfg;
    cfg.fading = FadingModel::Constant;
    Scenario sc = resample_fading(generate_scenario(cfg, 9), 4);
    for (const auto& n : sc.nodes) CHECK(n.fading == 1.0);
}

TEST_CASE("exponential draws have unit mean") {
    Rng rng(2024, Stream::Fading);
    double sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) sum += rng.exponential();
    double mean = sum / n;
    CHECK(mean >= 0.99);
    CHECK(mean <= 1.01);
}

TEST_CASE("UE positions stay inside the disk and node order holds") {
    Rng gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        SimConfig cfg = random_config(gen, 0, 60);
        Scenario sc = generate_scenario(cfg, 100 + trial);
        REQUIRE(sc.num_ues() == cfg.num_ue);
        for (const auto& u : sc.ues) CHECK(u.pos.x * u.pos.x + u.pos.y * u.pos.y <= cfg.radius * cfg.radius);
        std::size_t j = 0;
        for (; j < cfg.num_uav; ++j) CHECK(sc.nodes[j].kind == NodeKind::UAV);
        for (; j < cfg.num_uav + cfg.num_gv; ++j) CHECK(sc.nodes[j].kind == NodeKind::GV);
        for (; j < cfg.num_nodes(); ++j) CHECK(sc.nodes[j].kind == NodeKind::GS);
    }
}

TEST_CASE("invalid configurations are rejected") {
    SimConfig cfg;
    cfg.radius = 0.0;
    CHECK_THROWS_AS(generate_scenario(cfg, 1), ConfigError);
    cfg = {};
    cfg.num_uav = cfg.num_gv = cfg.num_gs = 0;
    CHECK_THROWS_AS(generate_scenario(cfg, 1), ConfigError);
    cfg = {};
    cfg.noise_power = 0.0;
    CHECK_THROWS_AS(generate_scenario(cfg, 1), ConfigError);
    cfg = {};
    cfg.num_gs = 2;
    CHECK_THROWS_AS(generate_scenario(cfg, 1), ConfigError);
    cfg = {};
    cfg.tau = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config text round-trips") {
    SimConfig cfg;
    cfg.num_uav = 2;
    cfg.num_gs = 2;
    cfg.gs_positions = {{50.0, 50.0}, {-30.5, 12.25}};
    cfg.noise_power = 3.3e-10;
    cfg.fading = FadingModel::Constant;
    cfg.local_policy = LocalPolicy::Fixed;
    cfg.interference = InterferenceMode::AllUes;
    cfg.gamma = 0.1;
    CHECK(parse_config(format_config(cfg)) == cfg);
}

TEST_CASE("config parser handles comments and rejects unknown keys") {
    SimConfig cfg = parse_config("# comment\nnum_ue = 40\n\nradius = 80  # trailing\n");
    CHECK(cfg.num_ue == 40);
    CHECK(cfg.radius == 80.0);
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("radius 80\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("radius = abc\n"), ConfigError);
    SimConfig o;
    set_config_value(o, "deadline", "1.5");
    CHECK(o.deadline == 1.5);
    CHECK_THROWS_AS(set_config_value(o, "fading", "gaussian"), ConfigError);
}

TEST_CASE("scenario records round-trip exactly") {
    Rng gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        SimConfig cfg = random_config(gen, 0, 30);
        Scenario sc = resample_fading(generate_scenario(cfg, 900 + trial), 3);
        sc.nodes[0].pos = {gen.uniform(-50, 50), gen.uniform(-50, 50)};
        std::istringstream is(dump(sc));
        CHECK(read_scenario(is) == sc);
    }
}

TEST_CASE("malformed scenario records are rejected") {
    std::istringstream empty("");
    CHECK_THROWS(read_scenario(empty));
    Scenario sc = generate_scenario(SimConfig{}, 1);
    std::string text = dump(sc);
    std::istringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS(read_scenario(truncated));
}
