#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <chrono>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "herdlab/errors.hpp"
#include "herdlab/run.hpp"
#include "herdlab/scenario.hpp"

using namespace herdlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarioDir = HERDLAB_SCENARIO_DIR;
const std::string kCli = HERDLAB_CLI_PATH;

fs::path make_temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("herdlab_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out);
    out << text;
}

int run_cli(const std::string& args) {
    const int rc = std::system((kCli + " " + args).c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("scenario loading") {
    const fs::path dir = make_temp_dir("load");

    SUBCASE("minimal circular config gets defaults and kappa from the evaders") {
        spit(dir / "min.json",
             R"({"mode":"circular","k":1,"R":2,"omega":1,"evaders":[[0.5,0]]})");
        const ScenarioConfig cfg = load_scenario((dir / "min.json").string());
        CHECK(cfg.params.kappa == doctest::Approx(0.5));
        CHECK(cfg.params.mode == PursuitMode::Circular);
        CHECK(cfg.integrator.step == doctest::Approx(1e-3 * 2.0 * kPi));
        CHECK(cfg.conv_tol == doctest::Approx(1e-3));
        CHECK(cfg.notices.empty());
    }
    SUBCASE("evader 0 not farthest triggers a re-index notice") {
        spit(dir / "reindex.json",
             R"({"mode":"circular","k":1,"R":2,"omega":1,"evaders":[[0.2,0],[0,0.9]]})");
        const ScenarioConfig cfg = load_scenario((dir / "reindex.json").string());
        REQUIRE(cfg.notices.size() == 1);
        CHECK(cfg.evaders[0].y == doctest::Approx(0.9));
        CHECK(cfg.params.kappa == doctest::Approx(0.9));
    }
    SUBCASE("omega = 0 is a validation error") {
        spit(dir / "bad.json",
             R"({"mode":"circular","k":1,"R":2,"omega":0,"evaders":[[0.5,0]]})");
        CHECK_THROWS_AS(load_scenario((dir / "bad.json").string()), ValidationError);
    }
    SUBCASE("unknown keys are rejected") {
        spit(dir / "unknown.json",
             R"({"mode":"circular","k":1,"R":2,"omega":1,"evaders":[[0.5,0]],"typo":3})");
        CHECK_THROWS_AS(load_scenario((dir / "unknown.json").string()), ValidationError);
    }
    SUBCASE("malformed JSON is a parse error") {
        spit(dir / "broken.json", "{\"mode\": \"circular\",");
        CHECK_THROWS_AS(load_scenario((dir / "broken.json").string()), ParseError);
    }
    SUBCASE("inconsistent kappa is rejected") {
        spit(dir / "kappa.json",
             R"({"mode":"circular","k":1,"R":2,"omega":1,"kappa":0.7,"evaders":[[0.5,0]]})");
        CHECK_THROWS_AS(load_scenario((dir / "kappa.json").string()), ValidationError);
    }
}

TEST_CASE("simulate command writes the trajectory and report") {
    const fs::path dir = make_temp_dir("simulate");
    const ScenarioConfig cfg =
        load_scenario((kScenarioDir / "spiral_single_slow.json").string());
    const int rc = run_command("simulate", cfg, dir.string(), 1);
    CHECK(rc == 0);

    const std::string csv = slurp(dir / "spiral_single_slow_trajectory.csv");
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,x_p,y_p,x_e0,y_e0,r_e0,psi_e0");

    // Column count 3 + 4n, strictly increasing timestamps spaced
    // record_every +- one step.
    double prev_t = -1.0;
    std::string line;
    std::size_t rows = 0;
    double last_r = 0.0;
    const double every = cfg.integrator.record_every;
    const double step = cfg.integrator.step;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++rows;
        std::size_t cols = 1;
        for (char ch : line) cols += ch == ',';
        CHECK(cols == 7);
        std::istringstream fields(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(fields, cell, ',')) vals.push_back(std::stod(cell));
        CHECK(vals[0] > prev_t);
        if (prev_t >= 0.0 && vals[0] < cfg.integrator.t_end - every) {
            const double spacing = vals[0] - prev_t;
            CHECK(spacing > every - step - 1e-9);
            CHECK(spacing < every + step + 1e-9);
        }
        prev_t = vals[0];
        last_r = vals[5];
    }
    CHECK(rows > 10);
    CHECK(std::abs(last_r - 0.4458) < 1e-3);

    const json report = json::parse(slurp(dir / "spiral_single_slow_report.json"));
    CHECK(report["command"] == "simulate");
    CHECK(report["results"]["convergence"]["converged"].get<bool>());
    CHECK(report["results"]["termination"] == "Converged");
    CHECK(report.contains("config_hash"));
    CHECK(report["wall_time_s"].get<double>() >= 0.0);

    SUBCASE("the embedded config reproduces the CSV bit for bit") {
        spit(dir / "embedded.json", report["config"].dump(2));
        const ScenarioConfig cfg2 = load_scenario((dir / "embedded.json").string());
        const fs::path dir2 = make_temp_dir("simulate_rerun");
        REQUIRE(run_command("simulate", cfg2, dir2.string(), 1) == 0);
        CHECK(slurp(dir2 / "spiral_single_slow_trajectory.csv") == csv);
    }
}

TEST_CASE("coincident pursuer and evader exit with a model error") {
    const fs::path dir = make_temp_dir("singular");
    // Evader 0 at radius 2.2 sets kappa; the pursuer then starts at
    // R e^{k1 (2.2 - 2.2)} = R = 2 on the x-axis, right on top of evader 1.
    spit(dir / "collide.json", R"({
      "mode": "circular", "k": 1, "R": 2, "omega": 1,
      "evaders": [[0.0, 2.2], [2.0, 0.0]],
      "outputs": {"prefix": "collide"}
    })");
    const ScenarioConfig cfg = load_scenario((dir / "collide.json").string());
    const int rc = run_command("simulate", cfg, dir.string(), 1);
    CHECK(rc == 2);
    const json report = json::parse(slurp(dir / "collide_report.json"));
    CHECK(report["results"]["termination"] == "Singular");
    CHECK(report["error"]["type"] == "SingularityError");
    CHECK(report["error"]["evader_index"] == 1);
}

TEST_CASE("non-admissible spiral runs still write the trajectory") {
    const fs::path dir = make_temp_dir("nonadmissible");
    // kappa = 2 exceeds ln(8)/2, so no unique stable target exists; the
    // simulation must still complete and dump its CSV.
    spit(dir / "wide.json", R"({
      "mode": "spiral", "k": 0.01, "k1": 1.0, "R": 2, "omega": 2,
      "evaders": [[0.0, 2.0]],
      "integrator": {"t_end": 10.0},
      "outputs": {"prefix": "wide"}
    })");
    const ScenarioConfig cfg = load_scenario((dir / "wide.json").string());
    CHECK(run_command("simulate", cfg, dir.string(), 1) == 0);
    const json report = json::parse(slurp(dir / "wide_report.json"));
    CHECK(report["results"]["termination"] == "Completed");
    CHECK(report["results"].contains("convergence_unavailable"));
    CHECK(fs::exists(dir / "wide_trajectory.csv"));
}

TEST_CASE("equilibria command reports the circular golden pair") {
    const fs::path dir = make_temp_dir("equilibria");
    const ScenarioConfig cfg =
        load_scenario((kScenarioDir / "circular_three_evaders.json").string());
    REQUIRE(run_command("equilibria", cfg, dir.string(), 1) == 0);
    const json report = json::parse(slurp(dir / "circular_three_evaders_report.json"));
    CHECK(std::abs(report["results"]["r_s2"].get<double>() - 0.2541) < 5e-4);
    CHECK(std::abs(report["results"]["inner"]["psi_star"].get<double>() - 1.4434) < 5e-4);
}

TEST_CASE("stability command classifies both circular branches") {
    const fs::path dir = make_temp_dir("stability");
    const ScenarioConfig cfg =
        load_scenario((kScenarioDir / "circular_three_evaders.json").string());
    REQUIRE(run_command("stability", cfg, dir.string(), 1) == 0);
    const json report = json::parse(slurp(dir / "circular_three_evaders_report.json"));
    CHECK(report["results"]["inner"]["verdict"]["class"] == "AsymptoticallyStable");
    CHECK(report["results"]["outer"]["verdict"]["class"] == "Saddle");
}

TEST_CASE("sweep command writes a region map") {
    const fs::path dir = make_temp_dir("sweep");
    const ScenarioConfig cfg =
        load_scenario((kScenarioDir / "spiral_sweep_anchored.json").string());
    REQUIRE(run_command("sweep", cfg, dir.string(), 2) == 0);
    const json report = json::parse(slurp(dir / "spiral_sweep_anchored_report.json"));
    CHECK(report["results"]["cells"] == 48);
    const std::string csv = slurp(dir / "spiral_sweep_anchored_regionmap.csv");
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    CHECK(rows == 49);  // header + cells
}

TEST_CASE("pi-roa command emits the disk and region polylines") {
    const fs::path dir = make_temp_dir("piroa");
    const ScenarioConfig cfg = load_scenario((kScenarioDir / "circular_region.json").string());
    REQUIRE(run_command("pi-roa", cfg, dir.string(), 1) == 0);
    const json report = json::parse(slurp(dir / "circular_region_report.json"));
    CHECK(report["results"]["r_max"].get<double>() > 0.05);
    const std::string csv = slurp(dir / "circular_region_piroa.csv");
    CHECK(csv.find("region,") != std::string::npos);
    CHECK(csv.find("disk,") != std::string::npos);
}

TEST_CASE("the installed binary handles usage errors and scenarios") {
    if (kCli.empty()) return;
    const fs::path dir = make_temp_dir("binary");

    SUBCASE("unknown command is a usage error") {
        CHECK(run_cli("frobnicate --config /nonexistent 2>/dev/null") == 1);
    }
    SUBCASE("missing config file is a usage error") {
        CHECK(run_cli("simulate --config /nonexistent/x.json 2>/dev/null") == 1);
    }
    SUBCASE("every shipped scenario simulates cleanly in under a minute") {
        for (const char* name :
             {"spiral_single_slow", "spiral_single_fast", "spiral_two_evaders",
              "circular_three_evaders"}) {
            const auto start = std::chrono::steady_clock::now();
            const std::string cmd = "simulate --config " +
                                    (kScenarioDir / (std::string(name) + ".json")).string() +
                                    " --out-dir " + dir.string();
            CHECK(run_cli(cmd) == 0);
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            CHECK(elapsed < 60.0);
            CHECK(fs::exists(dir / (std::string(name) + "_trajectory.csv")));
        }
        // Two-evader trajectory carries 3 + 4n = 11 columns.
        std::istringstream csv(slurp(dir / "spiral_two_evaders_trajectory.csv"));
        std::string header;
        std::getline(csv, header);
        std::size_t cols = 1;
        for (char ch : header) cols += ch == ',';
        CHECK(cols == 11);
    }
    SUBCASE("HERDLAB_THREADS must be numeric") {
        const std::string cmd = "HERDLAB_THREADS=abc " + kCli + " equilibria --config " +
                                (kScenarioDir / "circular_region.json").string() +
                                " --out-dir " + dir.string() + " 2>/dev/null";
        CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 1);
    }
}
