#pragma once

#include "topo/clustering.hpp"
#include "topo/dataset.hpp"
#include "topo/ot.hpp"
#include "topo/rlt.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace topo {

// Barycenter of every RLT computed for one axis (all values, all runs).
struct WassersteinRlt {
    Distribution mass;
    std::size_t axis_id = 0;
    std::string axis_name;
    std::size_t ensemble_size = 0;
    std::size_t degenerate_runs = 0;
    bool degenerate = false;  // every cloud was degenerate; mass is a delta at 0
    std::size_t iterations = 0;
    double last_delta = 0.0;
};

// RLTs of axis a, value k use derive_seed(seed, {a.id, k}); the result is
// ordered like dataset.axes.
std::vector<WassersteinRlt> conditioned_wrlts(const ConditionedDataset& dataset, const RltParams& rlt,
                                              const OtParams& ot, std::uint64_t seed, std::size_t threads = 1);

enum class SigmaMode { fixed, median };

// similarity = exp(-distance / sigma). In fixed mode sigma is in squared
// bins, the unit of the RLT ground cost; median takes the median positive
// off-diagonal distance.
struct SimilarityParams {
    SigmaMode mode = SigmaMode::fixed;
    double sigma = 0.5;

    void validate() const;
};

struct SimilarityMatrix {
    Matrix distances;
    Matrix similarities;
    std::vector<std::size_t> row_axes;
    std::vector<std::size_t> col_axes;
    double sigma = 0.0;
    bool square = true;
    bool degenerate = false;  // no positive distance; similarities are all 1
    std::size_t ot_iterations = 0;
    double ot_last_delta = 0.0;
};

// Debiased unbalanced W2^2 between every row and column signature.
// Negative values from debiasing are clamped to 0. Without cols the matrix
// is square, symmetric and has a zero diagonal.
SimilarityMatrix similarity_matrix(const std::vector<WassersteinRlt>& rows,
                                   const std::vector<WassersteinRlt>* cols, const OtParams& ot,
                                   const SimilarityParams& sim = {}, std::size_t threads = 1);

struct ClusterParams {
    std::size_t c_max = 0;  // 0: every feasible c
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

struct ScoreReport {
    SimilarityMatrix m;
    Coclustering assignments;
    std::vector<double> variance;  // V(c) for c = 1..c_max
    std::size_t c = 1;
    Matrix m_prime;
    double rho_in = 0.0;
    double rho_out = 0.0;
    double mu = 0.0;
    std::optional<double> mu_sup;
    std::vector<std::string> warnings;
};

// M'[a][b] is the mean similarity between axes of clusters a and b; self
// pairs are left out of diagonal blocks except for singleton clusters.
ScoreReport score_unsupervised(const SimilarityMatrix& m, const ClusterParams& params = {});

// Rows are generated axes, columns real factors. c <= min(rows, cols); the
// diagonal of M' pairs the row and column halves of each bicluster and an
// empty block contributes 0.
ScoreReport score_supervised(const SimilarityMatrix& m, const ClusterParams& params = {});

// Sum of the diagonal and of the off-diagonal entries of M'.
void aggregate_scores(const Matrix& m_prime, double& rho_in, double& rho_out);

}  // namespace topo

namespace topo {

struct ScoreConfig {
    RltParams rlt;
    OtParams ot;
    SimilarityParams similarity;
    std::size_t c_max = 0;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

// Algorithm-level entry points. Signatures use derive_seed(seed, {0}) and
// clustering derive_seed(seed, {1}), so a real dataset identical to the
// generated one yields identical signatures.
ScoreReport score_dataset(const ConditionedDataset& dataset, const ScoreConfig& config);
ScoreReport score_dataset_supervised(const ConditionedDataset& generated, const ConditionedDataset& real,
                                     const ScoreConfig& config);

std::vector<std::string> signature_warnings(const std::vector<WassersteinRlt>& signatures);

}  // namespace topo
