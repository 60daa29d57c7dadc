#include <doctest.h>

#include <filesystem>

#include "rmspt/config.hpp"

using namespace rmspt;

TEST_SUITE("config") {

TEST_CASE("sections, comments and lists") {
    const auto c = parse_config(R"(
; comment
# another
[hamiltonian]
N = 10
J_prime = 0.5
delta = 0.25
[protocol]
kind = T
invariants = R, T
N_U = 100
N_M = 50
[sweep]
study = grid
delta = 1, 0.5
J_prime_over_J = 0.2, 5
[run]
master_seed = 9
)");
    CHECK(c.hamiltonian.num_sites == 10);
    CHECK(c.hamiltonian.exchange_prime == 0.5);
    CHECK(c.protocol.kind == ProtocolKind::T);
    CHECK(c.protocol.invariants == std::vector<InvariantKind>{InvariantKind::R, InvariantKind::T});
    REQUIRE(c.sweep.axes.size() == 2);
    CHECK(c.sweep.axes[0].name == "delta");
    CHECK(c.sweep.axes[1].values == std::vector<double>{0.2, 5.0});
    CHECK(c.master_seed == 9u);
    CHECK(c.require_seed("x") == 9u);
}

TEST_CASE("inline comments are not stripped, so they fail number parsing") {
    CHECK_THROWS_AS(parse_config("[hamiltonian]\nJ = 0.5 ; half\n"), ConfigError);
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS_WITH_AS(parse_config("[hamiltonian]\nNN = 4\n"), doctest::Contains("NN"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[hamiltonain]\nN = 4\n"), doctest::Contains("hamiltonain"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[sweep]\nJprime = 1, 2\n"), doctest::Contains("Jprime"), ConfigError);
    CHECK_THROWS_AS(parse_config("N = 4\n"), ConfigError);
}

TEST_CASE("values are never clamped") {
    CHECK_THROWS_WITH_AS(parse_config("[hamiltonian]\nN = 7\n"), doctest::Contains("N"), ConfigError);
    CHECK_THROWS_AS(parse_config("[hamiltonian]\nN = 20\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[protocol]\nN_U = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[protocol]\nN_M = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[hamiltonian]\nneel_weight = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[hamiltonian]\nJ = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[hamiltonian]\nJ = 1.0x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[error_scan]\nrepetitions = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[ramp]\nt_F = 1\ndt = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nmaster_seed = -3\n"), ConfigError);
}

TEST_CASE("sampled modes require a seed") {
    const auto c = parse_config("[hamiltonian]\nN = 8\n");
    CHECK(!c.master_seed);
    CHECK_THROWS_WITH_AS(c.require_seed("sampled sweeps"), doctest::Contains("master_seed"), ConfigError);
}

TEST_CASE("partition layout follows the invariant kind") {
    const auto c = parse_config("[hamiltonian]\nN = 12\n[partition]\nn = 2\n");
    CHECK(c.partition_for(InvariantKind::R, 2).num_segments() == 2);
    CHECK(c.partition_for(InvariantKind::KB, 2).num_segments() == 3);
    const auto forced = parse_config("[hamiltonian]\nN = 12\n[partition]\nlayout = pair\n");
    CHECK_THROWS_AS(forced.partition_for(InvariantKind::D2, 2), ConfigError);
}

TEST_CASE("resolved config lists every section with defaults filled in") {
    const auto j = resolved_config(parse_config("[hamiltonian]\nN = 8\n"));
    for (const char* key : {"hamiltonian", "partition", "protocol", "solver", "ramp", "sweep", "error_scan", "twirl", "run"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["hamiltonian"]["delta_p"] == 0.05);
    CHECK(j["run"]["master_seed"].is_null());
    CHECK(!j["run"].contains("out"));
}

TEST_CASE("every shipped config loads") {
    const std::filesystem::path dir = std::filesystem::path(RMSPT_SOURCE_DIR) / "configs";
    int count = 0;
    for (const char* name : {"fig1c_desk", "fig1e_desk", "fig2c_desk", "fig2d_desk", "fig3_desk", "fig4_desk", "fig5_desk"}) {
        CHECK_NOTHROW(load_config((dir / (std::string(name) + ".ini")).string()));
        ++count;
    }
    CHECK(count == 7);
    CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
}

}
