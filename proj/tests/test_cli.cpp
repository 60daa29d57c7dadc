#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "rmspt/serialize.hpp"

namespace fs = std::filesystem;
using rmspt::Json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "rmspt");
    std::ostringstream out, err;
    const int code = rmspt::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "rmspt_cli_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_config(const fs::path& dir, const std::string& text) {
    const auto path = dir / "run.ini";
    std::ofstream(path) << text;
    return path.string();
}

Json load(const fs::path& p) { return Json::parse(rmspt::read_text_file(p.string())); }

Json without_timestamp(Json j) {
    j.erase("timestamp");
    return j;
}

const char* kSmall = "[hamiltonian]\nN = 8\nJ_prime = 0.3\ndelta = 0.25\n[partition]\nn = 2\n"
                     "[protocol]\nkind = R\ninvariants = R, T\nN_U = 40\nN_M = 40\n";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("ground-state writes energy and residual") {
    const auto dir = scratch("gs");
    const auto cfg = write_config(dir, "[hamiltonian]\nN = 8\n");
    const auto r = cli({"ground-state", "--config", cfg, "--out", dir.string()});
    REQUIRE(r.code == 0);
    const Json j = load(dir / "ground_state.json");
    CHECK(j["result"].contains("energy"));
    CHECK(j["result"]["residual_norm"].get<double>() <= 1e-10);
    CHECK(j["config"]["hamiltonian"]["N"] == 8);
    CHECK(j.contains("master_seed"));
}

TEST_CASE("odd N fails and names the field") {
    const auto dir = scratch("odd");
    const auto cfg = write_config(dir, "[hamiltonian]\nN = 9\n");
    const auto r = cli({"ground-state", "--config", cfg, "--out", dir.string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("N") != std::string::npos);
    CHECK(r.err.find("hamiltonian") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical apart from the timestamp") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const auto cfg = write_config(a, kSmall);
    REQUIRE(cli({"invariants", "--sampled", "--seed", "5", "--config", cfg, "--out", a.string()}).code == 0);
    REQUIRE(cli({"invariants", "--sampled", "--seed", "5", "--config", cfg, "--out", b.string(), "--jobs", "2"}).code == 0);
    const Json ja = load(a / "invariants.json");
    const Json jb = load(b / "invariants.json");
    CHECK(without_timestamp(ja).dump() == without_timestamp(jb).dump());
    CHECK(ja["payload_hash"] == jb["payload_hash"]);
}

TEST_CASE("exact invariants stay in the physical range") {
    const auto dir = scratch("exact");
    const auto cfg = write_config(dir, kSmall);
    REQUIRE(cli({"invariants", "--exact", "--config", cfg, "--out", dir.string()}).code == 0);
    const Json j = load(dir / "invariants.json");
    REQUIRE(j["results"].size() == 2);
    const double zr = j["results"][0]["exact"]["normalized"];
    CHECK(zr >= -1.05);
    CHECK(zr <= 1.05);
}

TEST_CASE("sampled invariants echo N_U, N_M, seed and the exact reference") {
    const auto dir = scratch("sampled");
    const auto cfg = write_config(dir, kSmall);
    REQUIRE(cli({"invariants", "--sampled", "--seed", "11", "--config", cfg, "--out", dir.string()}).code == 0);
    const Json e = load(dir / "invariants.json")["results"][0]["estimate"];
    CHECK(e["N_U"] == 40);
    CHECK(e["N_M"] == 40);
    CHECK(e["master_seed"] == 11);
    CHECK(e.contains("exact_reference"));
}

TEST_CASE("sampled modes without a seed are usage errors") {
    const auto dir = scratch("noseed");
    const auto cfg = write_config(dir, kSmall);
    const auto r = cli({"invariants", "--sampled", "--config", cfg, "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("master_seed") != std::string::npos);
    CHECK(cli({"invariants", "--config", cfg}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"ground-state"}).code == 2);
}

TEST_CASE("campaign export and re-analysis reproduce the in-memory estimate") {
    const auto dir = scratch("campaign");
    const auto cfg = write_config(dir, std::string(kSmall) + "[run]\nmaster_seed = 3\n");
    REQUIRE(cli({"campaign-export", "--config", cfg, "--out", dir.string()}).code == 0);
    REQUIRE(fs::exists(dir / "records.jsonl"));
    REQUIRE(cli({"campaign-analyze", "--in", dir.string(), "--out", dir.string()}).code == 0);
    const Json analysis = load(dir / "campaign_analysis.json");
    const Json campaign = load(dir / "campaign.json");
    CHECK(analysis["source_payload_hash"] == campaign["payload_hash"]);
    REQUIRE(cli({"invariants", "--sampled", "--config", cfg, "--out", dir.string()}).code == 0);
    const Json inv = load(dir / "invariants.json");
    CHECK(analysis["estimates"][0]["value"] == inv["results"][0]["estimate"]["value"]);
}

TEST_CASE("sweep writes CSV and a JSON sidecar") {
    const auto dir = scratch("sweep");
    const auto cfg = write_config(dir, "[hamiltonian]\nN = 8\n[sweep]\nJ_prime_over_J = 0.2, 5\n");
    REQUIRE(cli({"sweep", "--config", cfg, "--out", dir.string()}).code == 0);
    const std::string csv = rmspt::read_text_file((dir / "sweep.csv").string());
    CHECK(csv.rfind("J_prime_over_J,repetition,kind", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(load(dir / "sweep.json")["config"]["sweep"]["axes"][0]["name"] == "J_prime_over_J");
}

TEST_CASE("correlation-length study writes the lambda sidecar") {
    const auto dir = scratch("lambda");
    const auto cfg = write_config(
        dir, "[hamiltonian]\nN = 8\n[sweep]\nstudy = correlation_length\nkinds = T\nJ_prime_over_J = 0.3, 3\nn = 1, 2, 3\n");
    REQUIRE(cli({"sweep", "--config", cfg, "--out", dir.string()}).code == 0);
    const std::string csv = rmspt::read_text_file((dir / "lambda.csv").string());
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(load(dir / "sweep.json")["lambda_fits"].size() == 2);
}

TEST_CASE("twirl-check passes at the default sample count") {
    const auto dir = scratch("twirl");
    const auto r = cli({"twirl-check", "20000", "--out", dir.string()});
    CHECK(r.code == 0);
    const Json j = load(dir / "twirl_check.json");
    CHECK(j["reports"].size() == 2);
    CHECK(j["n_samples"] == 20000);
    CHECK(cli({"twirl-check", "10", "--out", dir.string()}).code == 2);
}

TEST_CASE("adiabatic and error-scan commands run on small inputs") {
    const auto dir = scratch("dyn");
    const auto cfg = write_config(dir, "[hamiltonian]\nN = 6\nJ_prime = 0.2\n[ramp]\nt_F = 1\ndt = 0.05\n"
                                       "sample_times = 0, 0.5\nn_values = 1\ninvariants = R\n"
                                       "[protocol]\nN_U = 10\nN_M = 10\n"
                                       "[error_scan]\nvalues = 8, 16\nrepetitions = 8\n[run]\nmaster_seed = 1\n");
    REQUIRE(cli({"adiabatic", "--config", cfg, "--out", dir.string()}).code == 0);
    const std::string csv = rmspt::read_text_file((dir / "adiabatic.csv").string());
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(load(dir / "adiabatic.json")["pinning_during_ramp"] == true);
    REQUIRE(cli({"error-scan", "--config", cfg, "--out", dir.string()}).code == 0);
    CHECK(load(dir / "error_scan.json")["table"]["rows"].size() == 2);
}

}
