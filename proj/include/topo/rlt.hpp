#pragma once

#include "topo/geometry.hpp"
#include "topo/persistence.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace topo {

struct RltParams {
    double gamma = 1.0 / 128.0;
    std::size_t l0 = 64;
    std::size_t n = 100;
    std::size_t i_max = 100;

    void validate() const;
};

// Fraction of [0, alpha_max) during which exactly i one-dimensional holes
// are alive, for i in [0, i_max). Counts >= i_max land in the last bin.
struct RltDistribution {
    std::vector<double> mass;
    bool degenerate = false;  // alpha_max was 0; mass is a delta at bin 0
};

RltDistribution rlt_from_barcode(const Barcode& barcode, std::size_t i_max);

RltDistribution relative_living_times(const PointCloud& cloud, const RltParams& params, std::uint64_t seed);

// params.n runs; run r uses derive_seed(seed, {r}). The result is indexed by
// run and does not depend on `threads`.
std::vector<RltDistribution> rlt_ensemble(const PointCloud& cloud, const RltParams& params,
                                          std::uint64_t seed, std::size_t threads = 1);

}  // namespace topo
