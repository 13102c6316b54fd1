#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "ptzgs/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
    const std::string cmd = std::string("\"") + PTZGS_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ptzgs_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

const char* kLine = R"({
  "algorithm": "ss",
  "graph": {"agents": 3, "edges": [[1, 2], [2, 3]]},
  "objectives": [{"Q": [1], "center": [0]}, {"Q": [2], "center": [1]}, {"Q": [1], "center": [3]}],
  "schedule": {"t0": 0, "T1": 0.5, "h1": 2},
  "integrator": {"base_step": 1e-3},
  "initial_x": [[1], [-1], [2]],
  "output": {"plots": false}
})";

}  // namespace

TEST_CASE("check validates configs", "[cli]") {
    const auto dir = scratch("check");
    write(dir / "good.json", kLine);
    CHECK(cli("check --config " + quoted(dir / "good.json")) == 0);

    std::string bad = kLine;
    bad.replace(bad.find("\"h1\": 2"), 7, "\"h1\": 2, \"T2\": 1, \"h2\": 2");
    write(dir / "bad.json", bad);
    CHECK(cli("check --config " + quoted(dir / "bad.json")) == 2);

    write(dir / "broken.json", "{ \"algorithm\": ");
    CHECK(cli("check --config " + quoted(dir / "broken.json")) == 2);
    CHECK(cli("check") != 0);
}

TEST_CASE("preset writes a config that reruns identically", "[cli]") {
    const auto dir = scratch("preset");
    CHECK(cli("preset paper-sec4 --algorithm ss --no-plots --out-dir " + quoted(dir / "a")) == 0);
    CHECK(cli("preset paper-sec4 --algorithm ss --write-config " + quoted(dir / "ss.json")) == 0);
    REQUIRE(fs::exists(dir / "a" / "trajectory.csv"));
    REQUIRE(fs::exists(dir / "ss.json"));
    CHECK(cli("run --no-plots --config " + quoted(dir / "ss.json") + " --out-dir " + quoted(dir / "b")) == 0);
    CHECK(slurp(dir / "a" / "trajectory.csv") == slurp(dir / "b" / "trajectory.csv"));
    CHECK(cli("preset paper-sec4 --algorithm xx") != 0);
    CHECK(cli("preset unknown --algorithm ms") == 2);
}

TEST_CASE("run reports envelope violations", "[cli]") {
    const auto dir = scratch("violation");
    auto cfg = ptzgs::preset_config("paper-sec4", ptzgs::Variant::SingleStage);
    cfg.output.dir.clear();
    cfg.output.plots = false;
    cfg.integrator.method = ptzgs::Method::Euler;
    cfg.integrator.base_step = 0.02;
    cfg.integrator.gain_cap_theta = 0.99;
    write(dir / "coarse.json", ptzgs::config_to_json(cfg));
    CHECK(cli("run --config " + quoted(dir / "coarse.json") + " --out-dir " + quoted(dir / "out")) == 3);
}

TEST_CASE("sweep runs every config into its own directory", "[cli]") {
    const auto dir = scratch("sweep");
    fs::create_directories(dir / "cfg");
    write(dir / "cfg" / "one.json", kLine);
    std::string two = kLine;
    two.replace(two.find("[[1], [-1], [2]]"), 16, "[[4], [-4], [0]]");
    write(dir / "cfg" / "two.json", two);
    CHECK(cli("sweep --config-dir " + quoted(dir / "cfg") + " --out-dir " + quoted(dir / "out") +
              " --jobs 2") == 0);
    CHECK(fs::exists(dir / "out" / "one" / "trajectory.csv"));
    CHECK(fs::exists(dir / "out" / "two" / "trajectory.csv"));
    CHECK(slurp(dir / "out" / "one" / "trajectory.csv") != slurp(dir / "out" / "two" / "trajectory.csv"));

    write(dir / "cfg" / "three.json", "not json");
    CHECK(cli("sweep --config-dir " + quoted(dir / "cfg") + " --out-dir " + quoted(dir / "out2")) == 2);
}
