#pragma once

#include "topo/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace topo {

struct Coclustering {
    std::vector<std::size_t> row_labels;
    std::vector<std::size_t> col_labels;
    std::size_t c = 1;
};

// Spectral coclustering of a nonnegative matrix into c biclusters. Labels
// are renumbered by first appearance (rows first, then columns). With
// `square` set the matrix is read as a symmetric axis-by-axis similarity:
// column labels are taken from the rows and empty row clusters removed, so
// the returned c can be smaller than requested.
Coclustering cocluster(const Matrix& similarity, std::size_t c, std::uint64_t seed, bool square = false);

// Variance of the entries inside biclusters plus variance of the entries
// outside them (0 for an empty set). Every entry counts, the diagonal included.
double cocluster_variance(const Matrix& similarity, const Coclustering& clustering);

struct SelectCResult {
    std::size_t c = 1;
    std::vector<double> variance;  // variance[k] is V(k + 1)
    Coclustering clustering;       // the clustering at the chosen c
};

// Evaluates c = 1..c_max and keeps the smallest c with minimal variance.
SelectCResult select_c(const Matrix& similarity, std::size_t c_max, std::uint64_t seed, bool square = false,
                       std::size_t threads = 1);

}  // namespace topo
