#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace topo {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;

// N x D samples from one conditioned submanifold. Invariant: N >= 2,
// D >= 1, every coordinate finite.
class PointCloud {
  public:
    explicit PointCloud(RowMatrix points);

    std::size_t n_points() const noexcept { return static_cast<std::size_t>(points_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
    const RowMatrix& points() const noexcept { return points_; }

    // Rows selected by `indices`, in that order. Must select >= 2 points.
    PointCloud subset(std::span<const std::size_t> indices) const;
    PointCloud scaled(double s) const;

  private:
    RowMatrix points_;
};

// R x C nonnegative finite distances.
class DistanceMatrix {
  public:
    explicit DistanceMatrix(RowMatrix values);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }
    const RowMatrix& values() const noexcept { return values_; }
    double max() const;

  private:
    RowMatrix values_;
};

// Euclidean distances between every witness (row) and landmark (column).
DistanceMatrix pairwise_distances(const PointCloud& witnesses, const PointCloud& landmarks);

// l0 distinct indices drawn uniformly without replacement (partial
// Fisher-Yates over a counter-based stream keyed by `seed`).
std::vector<std::size_t> select_landmarks(const PointCloud& cloud, std::size_t l0, std::uint64_t seed);

}  // namespace topo
