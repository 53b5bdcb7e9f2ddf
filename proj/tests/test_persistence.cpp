#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "topo/errors.hpp"
#include "topo/persistence.hpp"

#include <algorithm>
#include <tuple>

using namespace topo;

namespace {

Simplex vertex(std::uint32_t a, double alpha) {
    Simplex s;
    s.vertices = {a, 0, 0};
    s.alpha = alpha;
    return s;
}

Simplex edge(std::uint32_t a, std::uint32_t b, double alpha) {
    Simplex s;
    s.vertices = {a, b, 0};
    s.dim = 1;
    s.alpha = alpha;
    return s;
}

Simplex triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c, double alpha) {
    Simplex s;
    s.vertices = {a, b, c};
    s.dim = 2;
    s.alpha = alpha;
    return s;
}

std::vector<std::tuple<int, double, double>> triples(const Barcode& b) {
    std::vector<std::tuple<int, double, double>> out;
    for (const auto& i : b.intervals) out.emplace_back(i.dim, i.birth, i.death);
    std::sort(out.begin(), out.end());
    return out;
}

Filtration random_witness_filtration(std::uint64_t seed) {
    CounterRng rng(seed);
    const std::size_t nl = 4 + rng.below(9);  // 4..12 landmarks
    const std::size_t nw = 20 + rng.below(40);
    const auto kind = rng.below(3);
    PointCloud w = kind == 0 ? testing::circle(nw, 0.1, seed) : kind == 1 ? testing::circles(2, nw, 0.1, seed)
                                                                          : testing::gaussian(nw, 3, seed);
    const auto l = w.subset(select_landmarks(w, nl, seed + 1));
    const auto d = pairwise_distances(w, l);
    return build_witness_filtration(d, rng.uniform(0.05, 1.0) * d.max());
}

}  // namespace

TEST_SUITE("persistence") {
    TEST_CASE("filtration validation") {
        Filtration f;
        f.n_vertices = 2;
        f.alpha_max = 1.0;
        f.simplices = {vertex(0, 0), vertex(1, 0), edge(0, 1, 0.5)};
        CHECK_NOTHROW(f.validate());

        auto missing_face = f;
        missing_face.simplices = {vertex(0, 0), edge(0, 1, 0.5), vertex(1, 0.6)};
        CHECK_THROWS_AS(missing_face.validate(), InvalidFiltrationError);

        auto unsorted = f;
        unsorted.simplices = {vertex(0, 0.2), vertex(1, 0), edge(0, 1, 0.5)};
        CHECK_THROWS_AS(unsorted.validate(), InvalidFiltrationError);

        auto too_late = f;
        too_late.simplices.back().alpha = 2.0;
        CHECK_THROWS_AS(too_late.validate(), InvalidFiltrationError);
    }

    TEST_CASE("hollow triangle has one essential loop, filled triangle none") {
        Filtration f;
        f.n_vertices = 3;
        f.alpha_max = 3.0;
        f.simplices = {vertex(0, 0), vertex(1, 0), vertex(2, 0), edge(0, 1, 1), edge(1, 2, 1), edge(0, 2, 1)};
        auto b = compute_barcode(f);
        int loops = 0;
        for (const auto& i : b.intervals) {
            if (i.dim == 1) {
                ++loops;
                CHECK(i.birth == 1.0);
                CHECK(i.death == 3.0);
            }
        }
        CHECK(loops == 1);

        f.simplices.push_back(triangle(0, 1, 2, 2));
        b = compute_barcode(f);
        const auto t = triples(b);
        CHECK(std::count_if(t.begin(), t.end(), [](auto& x) { return std::get<0>(x) == 1; }) == 1);
        CHECK(std::find(t.begin(), t.end(), std::make_tuple(1, 1.0, 2.0)) != t.end());
        // One component survives; the other two die at 1.
        CHECK(std::find(t.begin(), t.end(), std::make_tuple(0, 0.0, 3.0)) != t.end());
        CHECK(std::count(t.begin(), t.end(), std::make_tuple(0, 0.0, 1.0)) == 2);
    }

    TEST_CASE("witness filtration matches a brute-force enumeration") {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            CAPTURE(seed);
            CounterRng rng(seed);
            const auto w = testing::gaussian(15 + rng.below(20), 2, seed);
            const auto l = w.subset(select_landmarks(w, 3 + rng.below(6), seed));
            const auto d = pairwise_distances(w, l);
            const double amax = rng.uniform(0.1, 1.0) * d.max();
            const auto got = build_witness_filtration(d, amax);
            const auto want = oracle::witness_filtration(d, amax);
            REQUIRE(got.simplices.size() == want.size());
            for (std::size_t i = 0; i < want.size(); ++i) {
                CHECK(got.simplices[i].dim == want[i].dim);
                CHECK(got.simplices[i].vertices == want[i].vertices);
                CHECK(got.simplices[i].alpha == want[i].alpha);
            }
        }
    }

    TEST_CASE("barcode matches the boundary-rank oracle") {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            CAPTURE(seed);
            const auto f = random_witness_filtration(seed);
            CHECK(triples(compute_barcode(f)) == oracle::barcode(f));
        }
    }

    TEST_CASE("betti curve counts live loops") {
        Barcode b;
        b.alpha_max = 4.0;
        b.intervals = {{0.0, 4.0, 0}, {1.0, 3.0, 1}, {2.0, 4.0, 1}, {2.5, 2.5, 1}};
        const auto steps = betti_curve(b, 1, 4.0);
        REQUIRE(steps.size() == 4);
        CHECK(steps[0].count == 0);
        CHECK(steps[1].from == 1.0);
        CHECK(steps[1].count == 1);
        CHECK(steps[2].from == 2.0);
        CHECK(steps[2].count == 2);
        CHECK(steps[3].from == 3.0);
        CHECK(steps[3].count == 1);
        CHECK(steps[3].to == 4.0);
    }

    TEST_CASE("witness filtration rejects a negative alpha_max") {
        const auto w = testing::gaussian(10, 2, 1);
        const auto d = pairwise_distances(w, w.subset(select_landmarks(w, 4, 1)));
        CHECK_THROWS(build_witness_filtration(d, -1.0));
    }
}
