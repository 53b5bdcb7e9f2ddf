#pragma once

#include "topo/dataset.hpp"
#include "topo/ot.hpp"
#include "topo/rlt.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace topo {

enum class MeanKind { euclidean, wasserstein };
enum class DistanceKind { euclidean, wasserstein };

struct AblationVariant {
    MeanKind mean = MeanKind::wasserstein;
    DistanceKind distance = DistanceKind::wasserstein;

    std::string label() const;
};

// The four rows of the ablation table: Euclidean mean and distance (the
// geometry score), barycenter only, W distance only, both.
std::vector<AblationVariant> ablation_variants();

struct DifferenceRatio {
    AblationVariant variant;
    double intra = 0.0;  // mean distance between signatures of the same class
    double inter = 0.0;  // mean distance across classes
    double ratio = 0.0;  // inter / intra; +inf when every intra distance is 0
};

// One signature per (axis, value): the ensemble of params.n RLTs of that
// cloud (seeded derive_seed(seed, {axis.id, k})) averaged coordinatewise or
// by barycenter. classes[a] labels dataset.axes[a]; at least two classes
// and one intra-class pair are required. Ensembles are computed once for
// all variants.
std::vector<DifferenceRatio> difference_ratios(const ConditionedDataset& dataset,
                                               const std::vector<std::size_t>& classes,
                                               const std::vector<AblationVariant>& variants, const RltParams& rlt,
                                               const OtParams& ot, std::uint64_t seed, std::size_t threads = 1);

DifferenceRatio difference_ratio(const ConditionedDataset& dataset, const std::vector<std::size_t>& classes,
                                 const AblationVariant& variant, const RltParams& rlt, const OtParams& ot,
                                 std::uint64_t seed, std::size_t threads = 1);

// Planar loops with a varying number of holes. Class h (h in hole_counts)
// samples h disjoint circles of random radii and ellipticity, or an open
// arc when h is 0; every class gets axes_per_class axes of n_values clouds.
struct HarnessSpec {
    std::vector<std::size_t> hole_counts = {0, 1, 3};
    std::size_t axes_per_class = 2;
    std::size_t n_values = 4;
    std::size_t n_samples = 256;
    double noise_sigma = 0.01;
    std::uint64_t seed = 0;
};

struct Harness {
    ConditionedDataset dataset;
    std::vector<std::size_t> classes;
};

Harness homeomorphism_harness(const HarnessSpec& spec);

}  // namespace topo
