#include "topo/geometry.hpp"

#include "topo/errors.hpp"
#include "topo/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace topo {

PointCloud::PointCloud(RowMatrix points) : points_(std::move(points)) {
    if (points_.rows() < 2 || points_.cols() < 1) {
        throw ShapeError("point cloud needs at least 2 points and 1 dimension, got " +
                         std::to_string(points_.rows()) + "x" + std::to_string(points_.cols()));
    }
    if (!points_.allFinite()) throw ParameterError("point cloud contains NaN or Inf");
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
    RowMatrix out(static_cast<Eigen::Index>(indices.size()), points_.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= n_points()) throw ParameterError("subset index out of range");
        out.row(static_cast<Eigen::Index>(i)) = points_.row(static_cast<Eigen::Index>(indices[i]));
    }
    return PointCloud(std::move(out));
}

PointCloud PointCloud::scaled(double s) const { return PointCloud(points_ * s); }

DistanceMatrix::DistanceMatrix(RowMatrix values) : values_(std::move(values)) {
    if (values_.size() == 0) throw ShapeError("empty distance matrix");
    if (!values_.allFinite() || (values_.array() < 0.0).any()) {
        throw ParameterError("distance matrix entries must be finite and nonnegative");
    }
}

double DistanceMatrix::max() const { return values_.maxCoeff(); }

DistanceMatrix pairwise_distances(const PointCloud& witnesses, const PointCloud& landmarks) {
    if (witnesses.dim() != landmarks.dim()) {
        throw ShapeError("dimension mismatch: witnesses are " + std::to_string(witnesses.dim()) +
                         "-d, landmarks are " + std::to_string(landmarks.dim()) + "-d");
    }
    const auto& w = witnesses.points();
    const auto& l = landmarks.points();
    const Eigen::Index nw = w.rows(), nl = l.rows(), d = w.cols();
    RowMatrix out(nw, nl);
    // Direct differences rather than the |a|^2+|b|^2-2ab expansion: exact
    // zeros on coincident points and exact scaling under powers of two.
    for (Eigen::Index i = 0; i < nw; ++i) {
        const double* wi = w.data() + i * d;
        for (Eigen::Index j = 0; j < nl; ++j) {
            const double* lj = l.data() + j * d;
            double acc = 0.0;
            for (Eigen::Index k = 0; k < d; ++k) {
                const double diff = wi[k] - lj[k];
                acc += diff * diff;
            }
            out(i, j) = std::sqrt(acc);
        }
    }
    return DistanceMatrix(std::move(out));
}

std::vector<std::size_t> select_landmarks(const PointCloud& cloud, std::size_t l0, std::uint64_t seed) {
    const std::size_t n = cloud.n_points();
    if (l0 < 2 || l0 > n) {
        throw ParameterError("landmark count " + std::to_string(l0) + " must be in [2, " +
                             std::to_string(n) + "]");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    CounterRng rng(seed);
    for (std::size_t i = 0; i < l0; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(perm[i], perm[j]);
    }
    perm.resize(l0);
    return perm;
}

}  // namespace topo
