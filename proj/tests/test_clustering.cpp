#include "doctest.h"
#include "oracles.hpp"

#include "topo/clustering.hpp"
#include "topo/errors.hpp"
#include "topo/rng.hpp"

#include <algorithm>
#include <map>

using namespace topo;

namespace {

// Block-diagonal similarity with `in` inside blocks and `out` elsewhere.
Matrix block_matrix(const std::vector<std::size_t>& labels, double in = 1.0, double out = 0.05) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = labels[i] == labels[j] ? in : out;
    }
    return a;
}

// Random labels using every block, renumbered by first appearance.
std::vector<std::size_t> random_labels(std::size_t n, std::size_t k, CounterRng& rng) {
    std::vector<std::size_t> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = i < k ? i : rng.below(k);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(l[i], l[rng.below(i + 1)]);
    std::map<std::size_t, std::size_t> seen;
    for (auto& x : l) x = seen.emplace(x, seen.size()).first->second;
    return l;
}

Matrix perturb(Matrix a, double level, CounterRng& rng) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i; j < a.cols(); ++j) {
            const double v = std::clamp(a(i, j) + level * rng.uniform(-1.0, 1.0), 0.0, 1.0);
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return a;
}

}  // namespace

TEST_SUITE("clustering") {
    TEST_CASE("perfect block matrices are recovered") {
        CounterRng rng(1);
        for (std::size_t k : {2u, 3u, 4u}) {
            for (int rep = 0; rep < 5; ++rep) {
                CAPTURE(k);
                const auto labels = random_labels(8 + rng.below(5), k, rng);
                const auto a = block_matrix(labels);
                const auto cl = cocluster(a, k, 3, true);
                CHECK(cl.c == k);
                CHECK(cl.row_labels == labels);
                CHECK(cl.col_labels == labels);

                const auto sel = select_c(a, a.rows(), 3, true);
                CHECK(sel.c == k);
                CHECK(sel.clustering.row_labels == labels);
                CHECK(sel.variance[k - 1] == doctest::Approx(0.0).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("fuzz with five percent noise") {
        CounterRng rng(2024);
        int recovered = 0;
        for (int inst = 0; inst < 100; ++inst) {
            const std::size_t k = 2 + rng.below(3);
            const auto labels = random_labels(6 + rng.below(7), k, rng);
            const auto a = perturb(block_matrix(labels, 0.9, 0.1), 0.05, rng);
            const auto sel = select_c(a, a.rows(), static_cast<std::uint64_t>(inst), true);
            if (sel.c == k && sel.clustering.row_labels == labels) ++recovered;
        }
        CHECK(recovered >= 95);
    }

    TEST_CASE("two-way split minimizes the normalized cut") {
        CounterRng rng(7);
        for (int inst = 0; inst < 20; ++inst) {
            const std::size_t n = 6 + rng.below(3);
            const auto labels = random_labels(n, 2, rng);
            const auto a = perturb(block_matrix(labels, 0.8, 0.2), 0.1, rng);
            double best = std::numeric_limits<double>::infinity();
            unsigned best_mask = 0;
            for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
                const double v = oracle::normalized_cut(a, mask);
                if (v < best) {
                    best = v;
                    best_mask = mask;
                }
            }
            const auto cl = cocluster(a, 2, 5, true);
            unsigned mask = 0;
            for (std::size_t i = 0; i < n; ++i) mask |= static_cast<unsigned>(cl.row_labels[i]) << i;
            const unsigned full = (1u << n) - 1;
            CHECK((mask == best_mask || mask == (full ^ best_mask)));
        }
    }

    TEST_CASE("variance of a perfect clustering is zero, of a wrong one positive") {
        const std::vector<std::size_t> labels{0, 0, 1, 1, 1};
        const auto a = block_matrix(labels);
        Coclustering good{labels, labels, 2};
        CHECK(cocluster_variance(a, good) == doctest::Approx(0.0));
        Coclustering bad{{0, 1, 0, 1, 1}, {0, 1, 0, 1, 1}, 2};
        CHECK(cocluster_variance(a, bad) > 0.01);
        Coclustering one{{0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}, 1};
        CHECK(cocluster_variance(a, one) > 0.0);
    }

    TEST_CASE("rectangular coclustering") {
        Matrix a(3, 4);
        a << 1.0, 1.0, 0.0, 0.0,  //
            0.0, 0.0, 1.0, 1.0,   //
            0.0, 0.0, 1.0, 1.0;
        const auto cl = cocluster(a, 2, 1, false);
        CHECK(cl.row_labels == std::vector<std::size_t>{0, 1, 1});
        CHECK(cl.col_labels == std::vector<std::size_t>{0, 0, 1, 1});
    }

    TEST_CASE("deterministic under thread count") {
        CounterRng rng(3);
        const auto labels = random_labels(10, 3, rng);
        const auto a = perturb(block_matrix(labels, 0.7, 0.3), 0.2, rng);
        const auto x = select_c(a, 10, 9, true, 1);
        const auto y = select_c(a, 10, 9, true, 4);
        CHECK(x.c == y.c);
        CHECK(x.variance == y.variance);
        CHECK(x.clustering.row_labels == y.clustering.row_labels);
    }

    TEST_CASE("argument checks") {
        Matrix a = Matrix::Ones(3, 3);
        CHECK_THROWS_AS(cocluster(a, 0, 1, true), ParameterError);
        CHECK_THROWS_AS(cocluster(a, 4, 1, true), ParameterError);
        Matrix neg = a;
        neg(0, 1) = -1.0;
        CHECK_THROWS_AS(cocluster(neg, 2, 1, true), ParameterError);
        CHECK_THROWS_AS(cocluster(Matrix::Ones(2, 3), 2, 1, true), ShapeError);
    }
}
