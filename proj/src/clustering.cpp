#include "topo/clustering.hpp"

#include "topo/errors.hpp"
#include "topo/parallel.hpp"
#include "topo/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace topo {

namespace {

constexpr std::size_t kRestarts = 10;
constexpr std::size_t kLloydIterations = 300;

struct KMeansResult {
    std::vector<std::size_t> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

double squared_distance(const Matrix& x, Eigen::Index i, const Matrix& centers, Eigen::Index k) {
    return (x.row(i) - centers.row(k)).squaredNorm();
}

Matrix plus_plus_init(const Matrix& x, std::size_t k, CounterRng& rng) {
    const Eigen::Index n = x.rows();
    Matrix centers(static_cast<Eigen::Index>(k), x.cols());
    centers.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = squared_distance(x, i, centers, 0);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : d2) total += v;
        Eigen::Index pick = n - 1;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= d2[static_cast<std::size_t>(i)];
                if (target < 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        }
        centers.row(static_cast<Eigen::Index>(c)) = x.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& v = d2[static_cast<std::size_t>(i)];
            v = std::min(v, squared_distance(x, i, centers, static_cast<Eigen::Index>(c)));
        }
    }
    return centers;
}

KMeansResult lloyd(const Matrix& x, Matrix centers) {
    const Eigen::Index n = x.rows(), k = centers.rows();
    KMeansResult out;
    out.labels.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t iter = 0; iter < kLloydIterations; ++iter) {
        bool changed = iter == 0;
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            double best_d = squared_distance(x, i, centers, 0);
            for (Eigen::Index c = 1; c < k; ++c) {
                const double d = squared_distance(x, i, centers, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            auto& label = out.labels[static_cast<std::size_t>(i)];
            if (label != static_cast<std::size_t>(best)) changed = true;
            label = static_cast<std::size_t>(best);
            inertia += best_d;
        }
        out.inertia = inertia;
        if (!changed) break;

        Matrix sums = Matrix::Zero(k, x.cols());
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(static_cast<Eigen::Index>(out.labels[static_cast<std::size_t>(i)])) += x.row(i);
            ++counts[out.labels[static_cast<std::size_t>(i)]];
        }
        for (Eigen::Index c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
                continue;
            }
            // Empty cluster: move its center onto the worst-served point.
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d =
                    squared_distance(x, i, centers, static_cast<Eigen::Index>(out.labels[static_cast<std::size_t>(i)]));
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centers.row(c) = x.row(far);
        }
    }
    return out;
}

KMeansResult kmeans(const Matrix& x, std::size_t k, std::uint64_t seed) {
    KMeansResult best;
    for (std::size_t r = 0; r < kRestarts; ++r) {
        CounterRng rng(derive_seed(seed, {r}));
        KMeansResult run = lloyd(x, plus_plus_init(x, k, rng));
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

// Renumbers labels 0, 1, ... in order of first appearance; returns the
// number of distinct labels.
std::size_t canonicalize(std::vector<std::size_t>& rows, std::vector<std::size_t>& cols) {
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> map;
    std::size_t next = 0;
    auto relabel = [&](std::size_t& l) {
        if (l >= map.size()) map.resize(l + 1, unset);
        if (map[l] == unset) map[l] = next++;
        l = map[l];
    };
    for (auto& l : rows) relabel(l);
    for (auto& l : cols) relabel(l);
    return next;
}

Eigen::VectorXd inv_sqrt(const Eigen::VectorXd& d) {
    Eigen::VectorXd out(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) out(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
    return out;
}

void check_similarity(const Matrix& a) {
    if (a.size() == 0) throw ShapeError("empty similarity matrix");
    if (!a.allFinite() || (a.array() < 0.0).any()) {
        throw ParameterError("similarities must be finite and nonnegative");
    }
}

}  // namespace

Coclustering cocluster(const Matrix& a, std::size_t c, std::uint64_t seed, bool square) {
    check_similarity(a);
    const auto r = static_cast<std::size_t>(a.rows()), k = static_cast<std::size_t>(a.cols());
    if (square && r != k) throw ShapeError("square coclustering needs a square matrix");
    if (c < 1 || c > std::min(r, k)) {
        throw ParameterError("cluster count " + std::to_string(c) + " outside [1, " + std::to_string(std::min(r, k)) +
                             "]");
    }
    if ((a.array() == 0.0).all()) throw DegenerateInputError("all-zero similarity matrix");

    Coclustering out;
    out.c = c;
    out.row_labels.assign(r, 0);
    out.col_labels.assign(k, 0);
    if (c == 1) return out;

    const Eigen::VectorXd d1 = inv_sqrt(a.rowwise().sum());
    const Eigen::VectorXd d2 = inv_sqrt(a.colwise().sum().transpose());
    const Matrix an = d1.asDiagonal() * a * d2.asDiagonal();
    Eigen::JacobiSVD<Matrix> svd(an, Eigen::ComputeThinU | Eigen::ComputeThinV);

    // c - 1 nontrivial singular vectors: with only log2(c) of them, tied
    // singular values (e.g. an identity matrix) can merge distinct axes.
    const auto n_sv = static_cast<Eigen::Index>(c);
    const Eigen::Index dims = std::max<Eigen::Index>(n_sv - 1, 1);
    const Eigen::Index first = n_sv > 1 ? 1 : 0;
    Matrix z(static_cast<Eigen::Index>(r + k), dims);
    z.topRows(static_cast<Eigen::Index>(r)) = d1.asDiagonal() * svd.matrixU().middleCols(first, dims);
    z.bottomRows(static_cast<Eigen::Index>(k)) = d2.asDiagonal() * svd.matrixV().middleCols(first, dims);

    const KMeansResult km = kmeans(z, c, seed);
    out.row_labels.assign(km.labels.begin(), km.labels.begin() + static_cast<std::ptrdiff_t>(r));
    if (square) {
        std::vector<std::size_t> none;
        out.c = canonicalize(out.row_labels, none);
        out.col_labels = out.row_labels;
    } else {
        out.col_labels.assign(km.labels.begin() + static_cast<std::ptrdiff_t>(r), km.labels.end());
        canonicalize(out.row_labels, out.col_labels);
    }
    return out;
}

double cocluster_variance(const Matrix& a, const Coclustering& cl) {
    if (cl.row_labels.size() != static_cast<std::size_t>(a.rows()) ||
        cl.col_labels.size() != static_cast<std::size_t>(a.cols())) {
        throw ShapeError("labels do not match the similarity matrix");
    }
    double sum[2] = {0.0, 0.0}, sq[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const int g = cl.row_labels[static_cast<std::size_t>(i)] == cl.col_labels[static_cast<std::size_t>(j)] ? 0 : 1;
            sum[g] += a(i, j);
            sq[g] += a(i, j) * a(i, j);
            ++count[g];
        }
    }
    double v = 0.0;
    for (int g = 0; g < 2; ++g) {
        if (count[g] == 0) continue;
        const double mean = sum[g] / static_cast<double>(count[g]);
        v += std::max(0.0, sq[g] / static_cast<double>(count[g]) - mean * mean);
    }
    return v;
}

SelectCResult select_c(const Matrix& a, std::size_t c_max, std::uint64_t seed, bool square, std::size_t threads) {
    check_similarity(a);
    const auto limit = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
    if (c_max < 1 || c_max > limit) {
        throw ParameterError("c_max " + std::to_string(c_max) + " outside [1, " + std::to_string(limit) + "]");
    }
    std::vector<Coclustering> candidates(c_max);
    std::vector<double> variance(c_max);
    parallel_for(c_max, threads, [&](std::size_t i) {
        candidates[i] = cocluster(a, i + 1, derive_seed(seed, {i + 1}), square);
        variance[i] = cocluster_variance(a, candidates[i]);
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < c_max; ++i) {
        if (variance[i] < variance[best] - 1e-12 * (1.0 + std::abs(variance[best]))) best = i;
    }
    SelectCResult out;
    out.c = candidates[best].c;
    out.variance = std::move(variance);
    out.clustering = std::move(candidates[best]);
    return out;
}

}  // namespace topo
