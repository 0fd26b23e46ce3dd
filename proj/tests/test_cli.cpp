#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "csl/ground_states.hpp"
#include "csl/io.hpp"

#ifdef _WIN32
#error "the CLI tests assume a POSIX shell"
#endif
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("csl_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(CSL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return csl::read_text_file(p.string()); }

} // namespace

TEST_CASE("cli: successful run writes outputs and a manifest") {
    fs::path dir = fresh_dir("jellium");
    write_file(dir / "cfg.json", R"({"model": {"kind": "box", "eZ": 1.0}})");
    int rc = run_cli("jellium-check --config " + (dir / "cfg.json").string() +
                     " --out " + (dir / "out").string());
    CHECK(rc == 0);
    std::string csv = slurp(dir / "out" / "jellium.csv");
    CHECK(csv.rfind("max_abs,window,pass,", 0) == 0);
    std::string manifest = slurp(dir / "out" / "run.json");
    CHECK(manifest.find("config_hash") != std::string::npos);
    CHECK(manifest.find("seed") != std::string::npos);
    CHECK(manifest.find("version") != std::string::npos);
}

TEST_CASE("cli: identical config and seed give byte-identical outputs") {
    fs::path dir = fresh_dir("determinism");
    write_file(dir / "cfg.json",
               R"({"model": {"kind": "gaussian_sinc", "eZ": 1.0}, "P": 8,
                   "init": "random", "max_iters": 40})");
    for (const char* run : {"a", "b"}) {
        int rc = run_cli("minimize-cell --seed 7 --config " +
                         (dir / "cfg.json").string() + " --out " +
                         (dir / run).string());
        REQUIRE(rc == 0);
    }
    CHECK(slurp(dir / "a" / "minimize.csv") == slurp(dir / "b" / "minimize.csv"));
    CHECK(slurp(dir / "a" / "minimize_history.csv") ==
          slurp(dir / "b" / "minimize_history.csv"));

    write_file(dir / "scan.json",
               R"({"model": {"kind": "box", "eZ": 1.0}, "grid_n": 2, "M_max": 6})");
    for (const char* run : {"s1", "s2"}) {
        int rc = run_cli("wiener-scan --workers 3 --config " +
                         (dir / "scan.json").string() + " --out " +
                         (dir / run).string());
        REQUIRE(rc == 0);
    }
    CHECK(slurp(dir / "s1" / "wiener.csv") == slurp(dir / "s2" / "wiener.csv"));
}

TEST_CASE("cli: validation problems exit with code 2") {
    fs::path dir = fresh_dir("validation");
    write_file(dir / "broken.json", "{ not json");
    CHECK(run_cli("jellium-check --config " + (dir / "broken.json").string() +
                  " --out " + (dir / "o1").string()) == 2);

    write_file(dir / "missing.json", R"({"no_model_here": 1})");
    CHECK(run_cli("jellium-check --config " + (dir / "missing.json").string() +
                  " --out " + (dir / "o2").string()) == 2);

    write_file(dir / "cfg.json", R"({"model": {"kind": "box", "eZ": 1.0}})");
    CHECK(run_cli("no-such-command --config " + (dir / "cfg.json").string()) == 2);
    CHECK(run_cli("jellium-check") == 2); // --config is required

    // Domain validation surfaces as exit 2 as well.
    write_file(dir / "lattice.json",
               R"({"model": {"kind": "box", "eZ": 1.0}, "theta": [0, 0, 0]})");
    CHECK(run_cli("bloch-spectrum --config " + (dir / "lattice.json").string() +
                  " --out " + (dir / "o3").string()) == 2);
}

TEST_CASE("cli: a numerically exploding evolution exits with code 3") {
    fs::path dir = fresh_dir("abort");
    csl::TorusGrid g(1, 4);
    auto gs = csl::periodic_ground_state(csl::IonDensityModel::box(1.0), g, 0.0,
                                         csl::Vec3::Zero(), 1.0, 1.0);
    // An overflowing field reaches inf within one step and trips the guard.
    for (auto& z : gs.X.psi.v) z = csl::cd(1e200, 0.0);
    write_file(dir / "state.json", csl::crystal_state_to_json(gs.X));
    write_file(dir / "cfg.json",
               "{\"state_file\": \"" + (dir / "state.json").string() +
                   "\", \"dt\": 1e-3, \"T_end\": 0.01}");
    CHECK(run_cli("evolve --config " + (dir / "cfg.json").string() + " --out " +
                  (dir / "out").string()) == 3);
}

TEST_CASE("cli: fermion density run reports uniformity") {
    fs::path dir = fresh_dir("fermion");
    write_file(dir / "cfg.json", R"({
        "state": {
            "d": 1, "N": 4,
            "terms": [
                {"c": [1.0, 0.0], "k": [[0], [1]]},
                {"c": [0.4, 0.7], "k": [[2], [3]]}
            ]
        },
        "samples_per_axis": 9
    })");
    int rc = run_cli("fermion-density --config " + (dir / "cfg.json").string() +
                     " --out " + (dir / "out").string());
    CHECK(rc == 0);
    std::string summary = slurp(dir / "out" / "fermion.csv");
    // pair_distance_ok,constant_term,max_deviation
    CHECK(summary.find("\n1,0.5,") != std::string::npos);
}
