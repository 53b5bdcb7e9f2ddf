#include "topo/rlt.hpp"

#include "topo/errors.hpp"
#include "topo/parallel.hpp"
#include "topo/rng.hpp"

#include <cmath>
#include <string>

namespace topo {

void RltParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("gamma must be positive");
    if (l0 < 2) throw ParameterError("l0 must be at least 2");
    if (n < 1) throw ParameterError("ensemble size n must be at least 1");
    if (i_max < 2) throw ParameterError("i_max must be at least 2");
}

RltDistribution rlt_from_barcode(const Barcode& barcode, std::size_t i_max) {
    if (i_max < 2) throw ParameterError("i_max must be at least 2");
    RltDistribution out;
    out.mass.assign(i_max, 0.0);
    const double alpha_max = barcode.alpha_max;
    if (!(alpha_max > 0.0)) {
        out.mass[0] = 1.0;
        out.degenerate = true;
        return out;
    }
    for (const auto& step : betti_curve(barcode, 1, alpha_max)) {
        const std::size_t bin = std::min(step.count, i_max - 1);
        out.mass[bin] += (step.to - step.from) / alpha_max;
    }
    return out;
}

RltDistribution relative_living_times(const PointCloud& cloud, const RltParams& params, std::uint64_t seed) {
    params.validate();
    if (cloud.n_points() < params.l0) {
        throw ParameterError("cloud has " + std::to_string(cloud.n_points()) + " points, fewer than l0 = " +
                             std::to_string(params.l0));
    }
    const auto idx = select_landmarks(cloud, params.l0, seed);
    const DistanceMatrix d_wl = pairwise_distances(cloud, cloud.subset(idx));
    const double alpha_max = params.gamma * d_wl.max();
    if (!(alpha_max > 0.0)) {
        Barcode empty;
        return rlt_from_barcode(empty, params.i_max);
    }
    return rlt_from_barcode(compute_barcode(build_witness_filtration(d_wl, alpha_max)), params.i_max);
}

std::vector<RltDistribution> rlt_ensemble(const PointCloud& cloud, const RltParams& params,
                                          std::uint64_t seed, std::size_t threads) {
    params.validate();
    std::vector<RltDistribution> out(params.n);
    parallel_for(params.n, threads, [&](std::size_t r) {
        out[r] = relative_living_times(cloud, params, derive_seed(seed, {r}));
    });
    return out;
}

}  // namespace topo
