#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(TOPO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("synth then score") {
        const fs::path dir = fs::temp_directory_path() / "topo_cli_test";
        fs::remove_all(dir);
        const std::string d = dir.string();
        REQUIRE(run("synth --family cylinder --n-samples 96 --n-values 3 --seed 1 --out " + d + "/ds") == 0);
        CHECK(fs::exists(dir / "ds" / "manifest.json"));
        CHECK(fs::exists(dir / "ds" / "ground_truth.json"));

        REQUIRE(run("score --dataset " + d + "/ds/manifest.json --l0 16 --n 3 --imax 10 --seed 2 --heatmap --out " +
                    d + "/out") == 0);
        for (const char* f : {"report.json", "M.csv", "distances.csv", "M_prime.csv", "M.pgm"}) {
            CHECK(fs::exists(dir / "out" / f));
        }
        std::ifstream in(dir / "out" / "report.json");
        const auto j = nlohmann::json::parse(in);
        CHECK(j.contains("mu"));
        CHECK(j["assignments"]["rows"].size() == 2);

        CHECK(run("persistence --cloud " + d + "/ds/clouds/axis0_value0.tpc --l0 16") == 0);
        fs::remove_all(dir);
    }

    TEST_CASE("error exit codes") {
        CHECK(run("score --dataset /nonexistent/manifest.json") == 2);
        CHECK(run("frobnicate") == 2);
        CHECK(run("score") == 2);
        CHECK(run("synth --family torus --out /tmp/x") == 2);
        CHECK(run("--help") == 0);
    }
}
