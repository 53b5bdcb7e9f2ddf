#include "doctest.h"
#include "helpers.hpp"

#include "topo/errors.hpp"
#include "topo/geometry.hpp"

#include <algorithm>
#include <set>

using namespace topo;

TEST_SUITE("geometry") {
    TEST_CASE("point cloud rejects bad shapes and values") {
        CHECK_THROWS_AS(PointCloud(RowMatrix(1, 3)), ShapeError);
        CHECK_THROWS_AS(PointCloud(RowMatrix(3, 0)), ShapeError);
        RowMatrix p = RowMatrix::Zero(3, 2);
        p(1, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS(PointCloud(p));
    }

    TEST_CASE("pairwise distances match a direct computation") {
        const auto w = testing::gaussian(20, 5, 1), l = testing::gaussian(7, 5, 2);
        const auto d = pairwise_distances(w, l);
        REQUIRE(d.rows() == 20);
        REQUIRE(d.cols() == 7);
        for (std::size_t i = 0; i < 20; ++i) {
            for (std::size_t j = 0; j < 7; ++j) {
                double s = 0.0;
                for (Eigen::Index k = 0; k < 5; ++k) {
                    const double t = w.points()(static_cast<Eigen::Index>(i), k) - l.points()(static_cast<Eigen::Index>(j), k);
                    s += t * t;
                }
                CHECK(d(i, j) == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("landmarks are distinct, in range and seed-determined") {
        const auto c = testing::gaussian(50, 2, 3);
        const auto a = select_landmarks(c, 12, 9), b = select_landmarks(c, 12, 9), other = select_landmarks(c, 12, 10);
        CHECK(a == b);
        CHECK(a != other);
        std::set<std::size_t> s(a.begin(), a.end());
        CHECK(s.size() == 12);
        CHECK(*s.rbegin() < 50);
        CHECK_THROWS_AS(select_landmarks(c, 51, 0), ParameterError);
        CHECK_THROWS_AS(select_landmarks(c, 1, 0), ParameterError);
    }

    TEST_CASE("scaling a cloud scales its distances") {
        const auto c = testing::gaussian(10, 3, 4);
        const auto d = pairwise_distances(c, c), d2 = pairwise_distances(c.scaled(2.5), c.scaled(2.5));
        CHECK(d2.max() == doctest::Approx(2.5 * d.max()));
    }
}
