#pragma once

#include "topo/geometry.hpp"
#include "topo/rng.hpp"

#include <cmath>
#include <numbers>

namespace testing {

inline topo::PointCloud circle(std::size_t n, double noise, std::uint64_t seed, double radius = 1.0,
                               double cx = 0.0) {
    topo::CounterRng rng(seed);
    topo::RowMatrix p(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
        p(i, 0) = cx + radius * std::cos(t) + noise * rng.normal();
        p(i, 1) = radius * std::sin(t) + noise * rng.normal();
    }
    return topo::PointCloud(std::move(p));
}

// k unit circles centred 3 apart on the x axis.
inline topo::PointCloud circles(std::size_t k, std::size_t n, double noise, std::uint64_t seed) {
    topo::CounterRng rng(seed);
    topo::RowMatrix p(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
        p(i, 0) = 3.0 * static_cast<double>(static_cast<std::size_t>(i) % k) + std::cos(t) + noise * rng.normal();
        p(i, 1) = std::sin(t) + noise * rng.normal();
    }
    return topo::PointCloud(std::move(p));
}

inline topo::PointCloud segment(std::size_t n, double noise, std::uint64_t seed) {
    topo::CounterRng rng(seed);
    topo::RowMatrix p(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        p(i, 0) = rng.uniform(-1.0, 1.0) + noise * rng.normal();
        p(i, 1) = noise * rng.normal();
    }
    return topo::PointCloud(std::move(p));
}

inline topo::PointCloud gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
    topo::CounterRng rng(seed);
    topo::RowMatrix p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.normal();
    return topo::PointCloud(std::move(p));
}

inline std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

inline double tv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

}  // namespace testing
