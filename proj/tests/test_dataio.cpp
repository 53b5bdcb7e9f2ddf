#include "doctest.h"
#include "helpers.hpp"

#include "topo/dataio.hpp"
#include "topo/errors.hpp"
#include "topo/synth.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

using namespace topo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("topo_test_" + std::to_string(CounterRng(reinterpret_cast<std::uintptr_t>(this))()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

}  // namespace

TEST_SUITE("dataio") {
    TEST_CASE("cloud round trip at float precision") {
        TempDir dir;
        const auto c = testing::gaussian(17, 5, 3);
        write_cloud(c, dir.path / "a.tpc");
        const auto r = read_cloud(dir.path / "a.tpc");
        REQUIRE(r.n_points() == 17);
        REQUIRE(r.dim() == 5);
        CHECK((r.points() - c.points()).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(fs::file_size(dir.path / "a.tpc") == 4 + 2 + 4 + 4 + 17 * 5 * 4);
    }

    TEST_CASE("header layout is little-endian") {
        TempDir dir;
        write_cloud(testing::gaussian(3, 2, 1), dir.path / "a.tpc");
        const auto b = slurp(dir.path / "a.tpc");
        CHECK(b.substr(0, 4) == "TPC1");
        CHECK(static_cast<unsigned char>(b[4]) == 1);
        CHECK(static_cast<unsigned char>(b[5]) == 0);
        CHECK(static_cast<unsigned char>(b[6]) == 3);
        CHECK(static_cast<unsigned char>(b[10]) == 2);
    }

    TEST_CASE("corrupt cloud files are rejected") {
        TempDir dir;
        write_cloud(testing::gaussian(4, 3, 1), dir.path / "a.tpc");
        const auto good = slurp(dir.path / "a.tpc");

        spit(dir.path / "t.tpc", good.substr(0, good.size() - 3));
        CHECK_THROWS_AS(read_cloud(dir.path / "t.tpc"), FormatError);
        spit(dir.path / "h.tpc", good.substr(0, 7));
        CHECK_THROWS_AS(read_cloud(dir.path / "h.tpc"), FormatError);

        auto magic = good;
        magic[0] = 'X';
        spit(dir.path / "m.tpc", magic);
        CHECK_THROWS_AS(read_cloud(dir.path / "m.tpc"), FormatError);

        auto version = good;
        version[4] = 9;
        spit(dir.path / "v.tpc", version);
        CHECK_THROWS_AS(read_cloud(dir.path / "v.tpc"), FormatError);

        auto nan = good;
        const float q = std::numeric_limits<float>::quiet_NaN();
        std::memcpy(nan.data() + 14, &q, 4);
        spit(dir.path / "n.tpc", nan);
        CHECK_THROWS_AS(read_cloud(dir.path / "n.tpc"), FormatError);

        CHECK_THROWS_AS(read_cloud(dir.path / "missing.tpc"), FormatError);
    }

    TEST_CASE("csv import") {
        TempDir dir;
        spit(dir.path / "a.csv", "x,y,z\n# comment\n1,2,3\n\n4, 5, 6\n");
        const auto c = import_csv(dir.path / "a.csv");
        REQUIRE(c.n_points() == 2);
        CHECK(c.points()(1, 2) == 6.0);
        spit(dir.path / "b.txt", "1 2\n3 4\n5 6\n");
        CHECK(import_csv(dir.path / "b.txt").n_points() == 3);
        spit(dir.path / "ragged.csv", "1,2\n3\n");
        CHECK_THROWS_AS(import_csv(dir.path / "ragged.csv"), FormatError);
    }

    TEST_CASE("manifest round trip") {
        TempDir dir;
        SynthSpec s;
        s.n_samples = 20;
        s.n_values = 3;
        const auto d = generate(s);
        write_dataset(d, dir.path / "ds" / "manifest.json");
        const auto r = read_dataset(dir.path / "ds" / "manifest.json");
        REQUIRE(r.axes.size() == d.axes.size());
        CHECK(r.provenance == d.provenance);
        CHECK(r.embedding_kind == d.embedding_kind);
        for (std::size_t a = 0; a < d.axes.size(); ++a) {
            CHECK(r.axes[a].id == d.axes[a].id);
            CHECK(r.axes[a].name == d.axes[a].name);
            REQUIRE(r.axes[a].values.size() == 3);
            CHECK((r.axes[a].values[2].points() - d.axes[a].values[2].points()).cwiseAbs().maxCoeff() < 1e-6);
        }
    }

    TEST_CASE("bad manifests are rejected before loading clouds") {
        TempDir dir;
        SynthSpec s;
        s.n_samples = 10;
        s.n_values = 2;
        const auto m = dir.path / "manifest.json";
        write_dataset(generate(s), m);
        const auto good = nlohmann::json::parse(slurp(m));

        auto edit = [&](auto f) {
            auto j = good;
            f(j);
            spit(m, j.dump());
            return m;
        };
        CHECK_THROWS_AS(read_dataset(edit([](auto& j) { j["schema"] = "other/9"; })), FormatError);
        CHECK_THROWS_AS(read_dataset(edit([](auto& j) { j["provenance"] = "imagined"; })), FormatError);
        CHECK_THROWS_AS(read_dataset(edit([](auto& j) { j["axes"][0]["values"].erase(1); })), FormatError);
        CHECK_THROWS_AS(read_dataset(edit([](auto& j) { j["axes"][1]["id"] = 0; })), FormatError);
        CHECK_THROWS_AS(read_dataset(edit([](auto& j) { j.erase("axes"); })), FormatError);
        spit(m, "{not json");
        CHECK_THROWS_AS(read_dataset(m), FormatError);
    }

    TEST_CASE("atomic write replaces the file") {
        TempDir dir;
        write_file_atomic(dir.path / "x.txt", "one");
        write_file_atomic(dir.path / "x.txt", "two");
        CHECK(slurp(dir.path / "x.txt") == "two");
        std::size_t n = 0;
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++n;
        CHECK(n == 1);
    }

    TEST_CASE("heatmap and csv writers") {
        Matrix s(2, 3);
        s << 1.0, 0.0, 0.5, 0.25, 1.0, 0.0;
        const auto pgm = heatmap_pgm(s, 2);
        CHECK(pgm.rfind("P5\n6 4\n255\n", 0) == 0);
        CHECK(pgm.size() == std::string("P5\n6 4\n255\n").size() + 24);
        CHECK(static_cast<unsigned char>(pgm.back()) == 255);
        const auto csv = matrix_csv(s);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    }
}
