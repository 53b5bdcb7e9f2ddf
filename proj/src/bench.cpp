#include "topo/bench.hpp"

#include "topo/errors.hpp"
#include "topo/parallel.hpp"
#include "topo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace topo {

std::string AblationVariant::label() const {
    if (mean == MeanKind::euclidean && distance == DistanceKind::euclidean) return "geometry-score";
    if (mean == MeanKind::wasserstein && distance == DistanceKind::euclidean) return "w-rlt";
    if (mean == MeanKind::euclidean && distance == DistanceKind::wasserstein) return "w-distance";
    return "ours";
}

std::vector<AblationVariant> ablation_variants() {
    return {{MeanKind::euclidean, DistanceKind::euclidean},
            {MeanKind::wasserstein, DistanceKind::euclidean},
            {MeanKind::euclidean, DistanceKind::wasserstein},
            {MeanKind::wasserstein, DistanceKind::wasserstein}};
}

std::vector<DifferenceRatio> difference_ratios(const ConditionedDataset& dataset,
                                               const std::vector<std::size_t>& classes,
                                               const std::vector<AblationVariant>& variants, const RltParams& rlt,
                                               const OtParams& ot, std::uint64_t seed, std::size_t threads) {
    dataset.validate();
    rlt.validate();
    ot.validate();
    if (classes.size() != dataset.axes.size()) throw ShapeError("one class label per axis required");
    std::vector<std::size_t> distinct(classes);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw ParameterError("difference ratio needs at least two classes");

    struct Slot {
        std::size_t axis, value;
    };
    std::vector<Slot> slots;
    for (std::size_t a = 0; a < dataset.axes.size(); ++a) {
        for (std::size_t k = 0; k < dataset.axes[a].values.size(); ++k) slots.push_back({a, k});
    }
    std::vector<std::vector<Distribution>> runs(slots.size());
    parallel_for(slots.size(), threads, [&](std::size_t s) {
        const auto& axis = dataset.axes[slots[s].axis];
        for (auto& r : rlt_ensemble(axis.values[slots[s].value], rlt, derive_seed(seed, {axis.id, slots[s].value}), 1)) {
            runs[s].push_back(std::move(r.mass));
        }
    });

    const GroundCost ground = GroundCost::squared_index(rlt.i_max);
    const bool want_w = std::any_of(variants.begin(), variants.end(), [](auto& v) { return v.mean == MeanKind::wasserstein; });
    const bool want_e = std::any_of(variants.begin(), variants.end(), [](auto& v) { return v.mean == MeanKind::euclidean; });
    std::vector<Distribution> mean_e(slots.size()), mean_w(slots.size());
    parallel_for(slots.size(), threads, [&](std::size_t s) {
        const auto& ens = runs[s];
        if (want_e) {
            mean_e[s].assign(rlt.i_max, 0.0);
            for (const auto& r : ens) {
                for (std::size_t i = 0; i < rlt.i_max; ++i) mean_e[s][i] += r[i] / static_cast<double>(ens.size());
            }
        }
        if (want_w) {
            const std::vector<double> w(ens.size(), 1.0 / static_cast<double>(ens.size()));
            mean_w[s] = wasserstein_barycenter(ens, w, ground, ot).mass;
        }
    });

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        for (std::size_t j = i + 1; j < slots.size(); ++j) pairs.emplace_back(i, j);
    }
    std::vector<DifferenceRatio> out;
    for (const auto& v : variants) {
        const auto& sig = v.mean == MeanKind::euclidean ? mean_e : mean_w;
        std::vector<double> d(pairs.size());
        parallel_for(pairs.size(), threads, [&](std::size_t t) {
            const auto& p = sig[pairs[t].first];
            const auto& q = sig[pairs[t].second];
            if (v.distance == DistanceKind::euclidean) {
                double acc = 0.0;
                for (std::size_t i = 0; i < p.size(); ++i) acc += (p[i] - q[i]) * (p[i] - q[i]);
                d[t] = std::sqrt(acc);
            } else {
                d[t] = std::max(0.0, sinkhorn_debiased(p, q, ground, ot).cost);
            }
        });
        double sum[2] = {0.0, 0.0};
        std::size_t count[2] = {0, 0};
        for (std::size_t t = 0; t < pairs.size(); ++t) {
            const int g = classes[slots[pairs[t].first].axis] == classes[slots[pairs[t].second].axis] ? 0 : 1;
            sum[g] += d[t];
            ++count[g];
        }
        if (count[0] == 0) throw ParameterError("difference ratio needs a class with two signatures");
        DifferenceRatio r;
        r.variant = v;
        r.intra = sum[0] / static_cast<double>(count[0]);
        r.inter = sum[1] / static_cast<double>(count[1]);
        r.ratio = r.intra > 0.0 ? r.inter / r.intra : std::numeric_limits<double>::infinity();
        out.push_back(r);
    }
    return out;
}

DifferenceRatio difference_ratio(const ConditionedDataset& dataset, const std::vector<std::size_t>& classes,
                                 const AblationVariant& variant, const RltParams& rlt, const OtParams& ot,
                                 std::uint64_t seed, std::size_t threads) {
    return difference_ratios(dataset, classes, {variant}, rlt, ot, seed, threads).front();
}

Harness homeomorphism_harness(const HarnessSpec& spec) {
    if (spec.hole_counts.size() < 2) throw ParameterError("harness needs at least two hole counts");
    if (spec.axes_per_class < 1 || spec.n_values < 2 || spec.n_samples < 2) {
        throw ParameterError("harness needs >= 1 axis per class, >= 2 values and >= 2 samples");
    }
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) throw ParameterError("noise_sigma must be finite and >= 0");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Harness h;
    for (std::size_t c = 0; c < spec.hole_counts.size(); ++c) {
        const std::size_t holes = spec.hole_counts[c];
        for (std::size_t r = 0; r < spec.axes_per_class; ++r) {
            ConditionedAxis axis;
            axis.id = h.dataset.axes.size();
            axis.name = std::to_string(holes) + "-holes/" + std::to_string(r);
            for (std::size_t k = 0; k < spec.n_values; ++k) {
                CounterRng rng(derive_seed(spec.seed, {axis.id, k}));
                const std::size_t loops = std::max<std::size_t>(holes, 1);
                std::vector<double> radius(loops), aspect(loops);
                for (std::size_t l = 0; l < loops; ++l) {
                    radius[l] = rng.uniform(0.7, 1.3);
                    aspect[l] = rng.uniform(0.6, 1.0);
                }
                const double arc = rng.uniform(0.5, 0.75) * two_pi;
                RowMatrix p(static_cast<Eigen::Index>(spec.n_samples), 3);
                for (std::size_t i = 0; i < spec.n_samples; ++i) {
                    const std::size_t l = i % loops;
                    const double t = holes == 0 ? rng.uniform(0.0, arc) : rng.uniform(0.0, two_pi);
                    // Loops sit side by side, 3 units apart.
                    p(static_cast<Eigen::Index>(i), 0) = 3.0 * static_cast<double>(l) + radius[l] * std::cos(t);
                    p(static_cast<Eigen::Index>(i), 1) = radius[l] * aspect[l] * std::sin(t);
                    p(static_cast<Eigen::Index>(i), 2) = 0.0;
                    for (Eigen::Index d = 0; d < 3; ++d) p(static_cast<Eigen::Index>(i), d) += spec.noise_sigma * rng.normal();
                }
                axis.values.emplace_back(std::move(p));
            }
            h.dataset.axes.push_back(std::move(axis));
            h.classes.push_back(c);
        }
    }
    return h;
}

}  // namespace topo
