#include "doctest.h"
#include "helpers.hpp"

#include "topo/bench.hpp"
#include "topo/errors.hpp"

#include <cmath>

using namespace topo;

namespace {

RltParams quick() {
    RltParams p;
    p.l0 = 24;
    p.n = 4;
    return p;
}

ConditionedDataset copies(const PointCloud& cloud, std::size_t axes, std::size_t values) {
    ConditionedDataset d;
    for (std::size_t a = 0; a < axes; ++a) {
        ConditionedAxis ax;
        ax.id = a;
        ax.name = "a" + std::to_string(a);
        ax.values.assign(values, cloud);
        d.axes.push_back(ax);
    }
    return d;
}

}  // namespace

TEST_SUITE("bench") {
    TEST_CASE("variant labels in table order") {
        const auto v = ablation_variants();
        REQUIRE(v.size() == 4);
        CHECK(v[0].label() == "geometry-score");
        CHECK(v[0].mean == MeanKind::euclidean);
        CHECK(v[0].distance == DistanceKind::euclidean);
        CHECK(v[3].label() == "ours");
        CHECK(v[3].mean == MeanKind::wasserstein);
        CHECK(v[3].distance == DistanceKind::wasserstein);
    }

    TEST_CASE("harness layout") {
        HarnessSpec s;
        s.n_samples = 64;
        const auto h = homeomorphism_harness(s);
        CHECK(h.dataset.axes.size() == 6);
        CHECK(h.classes == std::vector<std::size_t>{0, 0, 1, 1, 2, 2});
        CHECK_NOTHROW(h.dataset.validate());
    }

    TEST_CASE("same cloud on every axis gives equal intra and inter distances") {
        auto d = copies(testing::circle(150, 0.02, 1), 4, 2);
        const auto r = difference_ratios(d, {0, 0, 1, 1}, ablation_variants(), quick(), OtParams{}, 3);
        for (const auto& x : r) {
            CAPTURE(x.variant.label());
            if (x.intra > 0.0) {
                CHECK(x.ratio == doctest::Approx(1.0).epsilon(0.5));
            }
        }
    }

    TEST_CASE("different topology separates classes") {
        ConditionedDataset d;
        const std::vector<PointCloud> shapes{testing::segment(200, 0.02, 1), testing::circle(200, 0.02, 2)};
        for (std::size_t a = 0; a < 4; ++a) {
            ConditionedAxis ax;
            ax.id = a;
            ax.name = "a" + std::to_string(a);
            for (std::size_t k = 0; k < 2; ++k) {
                ax.values.push_back(a < 2 ? testing::segment(200, 0.02, 10 * a + k)
                                          : testing::circle(200, 0.02, 10 * a + k));
            }
            d.axes.push_back(ax);
        }
        for (const auto& v : ablation_variants()) {
            const auto r = difference_ratio(d, {0, 0, 1, 1}, v, quick(), OtParams{}, 4);
            CAPTURE(v.label());
            CHECK(r.ratio > 1.0);
        }
    }

    TEST_CASE("ratio does not depend on the cloud scale") {
        HarnessSpec s;
        s.n_samples = 128;
        s.n_values = 2;
        s.hole_counts = {0, 1};
        auto h = homeomorphism_harness(s);
        auto scaled = h.dataset;
        for (auto& a : scaled.axes) {
            for (auto& c : a.values) c = PointCloud(RowMatrix(c.points() * 3.0));
        }
        const auto v = ablation_variants()[3];
        const auto x = difference_ratio(h.dataset, h.classes, v, quick(), OtParams{}, 8);
        const auto y = difference_ratio(scaled, h.classes, v, quick(), OtParams{}, 8);
        CHECK(x.ratio == doctest::Approx(y.ratio).epsilon(1e-6));
    }

    TEST_CASE("class labels are checked") {
        auto d = copies(testing::circle(60, 0.02, 1), 2, 2);
        CHECK_THROWS_AS(difference_ratio(d, {0, 0}, ablation_variants()[0], quick(), OtParams{}, 1), ParameterError);
        CHECK_THROWS_AS(difference_ratio(d, {0}, ablation_variants()[0], quick(), OtParams{}, 1), ShapeError);
    }
}
