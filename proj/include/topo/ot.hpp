#pragma once

#include "topo/geometry.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace topo {

using Distribution = std::vector<double>;

// Transport cost between bins. squared_index(n) gives (i - j)^2.
struct GroundCost {
    Matrix cost;

    static GroundCost squared_index(std::size_t n);
};

// epsilon and tau are relative to the cost normalized by its maximum.
// tau = +inf gives balanced transport. With epsilon_start > epsilon, solves
// start there and halve towards epsilon, warm-starting each stage.
struct OtParams {
    double epsilon = 1e-5;
    double tau = 1.0;
    std::size_t max_iter = 2000;   // per stage
    double tol = 1e-9;             // L1 change of the plan marginal
    double barycenter_tol = 1e-6;  // largest change of the barycenter relative to its peak
    std::size_t barycenter_max_iter = 20000;  // per stage; wide inputs mix slowly
    double epsilon_start = 0.0;    // no schedule by default
    double stage_tol = 1e-6;       // tolerance of the intermediate stages

    void validate() const;
    bool balanced() const noexcept { return tau == std::numeric_limits<double>::infinity(); }
};

struct OtResult {
    double cost = 0.0;
    double transport = 0.0;  // <C, P> alone, without the entropy and marginal terms
    std::size_t iterations = 0;
    double last_delta = 0.0;
};

// Exact balanced W2^2 under (i - j)^2 by monotone rearrangement.
double w2_exact_1d(const Distribution& p, const Distribution& q);

// Value of
//   <C, P> + eps * sum P (log P - 1) + tau * KL(P 1 | p) + tau * KL(P^T 1 | q)
// at the entropic optimum, in the units of the unnormalized cost. KL is the
// generalized divergence sum a log(a / b) - a + b; the marginal terms become
// hard constraints in the balanced case.
OtResult sinkhorn_unbalanced(const Distribution& p, const Distribution& q, const GroundCost& ground,
                             const OtParams& params);

// d(p, q) - (d(p, p) + d(q, q)) / 2 with d = sinkhorn_unbalanced. Iteration
// counts are summed and last_delta is the largest of the three solves.
OtResult sinkhorn_debiased(const Distribution& p, const Distribution& q, const GroundCost& ground,
                           const OtParams& params);

struct BarycenterResult {
    Distribution mass;
    std::size_t iterations = 0;
    double last_delta = 0.0;
};

// Debiased unbalanced Sinkhorn barycenter: the fixed point where the
// weighted marginal gradients of the transports to every input balance the
// gradient of the barycenter's self-transport. Identical inputs are merged
// and zero weights dropped before iterating.
BarycenterResult wasserstein_barycenter(const std::vector<Distribution>& ps, const std::vector<double>& weights,
                                        const GroundCost& ground, const OtParams& params);

}  // namespace topo
