#include "topo/scoring.hpp"

#include "topo/errors.hpp"
#include "topo/parallel.hpp"
#include "topo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace topo {

namespace {

Distribution delta_at_zero(std::size_t n) {
    Distribution d(n, 0.0);
    d[0] = 1.0;
    return d;
}

double block_mean(const Matrix& s, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                  bool skip_self) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i : rows) {
        for (std::size_t j : cols) {
            if (skip_self && i == j) continue;
            sum += s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::vector<std::vector<std::size_t>> members(const std::vector<std::size_t>& labels, std::size_t c) {
    std::vector<std::vector<std::size_t>> out(c);
    for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
    return out;
}

void check_similarity_matrix(const SimilarityMatrix& m) {
    if (m.similarities.rows() == 0 || m.similarities.cols() == 0) throw ShapeError("empty similarity matrix");
    if (m.distances.rows() != m.similarities.rows() || m.distances.cols() != m.similarities.cols()) {
        throw ShapeError("distance and similarity matrices differ in shape");
    }
}

ScoreReport finish(ScoreReport r) {
    aggregate_scores(r.m_prime, r.rho_in, r.rho_out);
    r.mu = r.rho_in - r.rho_out;
    if (r.m.degenerate) r.warnings.push_back("similarity matrix is degenerate: every distance is zero");
    return r;
}

}  // namespace

std::vector<WassersteinRlt> conditioned_wrlts(const ConditionedDataset& dataset, const RltParams& rlt,
                                              const OtParams& ot, std::uint64_t seed, std::size_t threads) {
    dataset.validate();
    rlt.validate();
    ot.validate();

    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t a = 0; a < dataset.axes.size(); ++a) {
        for (std::size_t k = 0; k < dataset.axes[a].values.size(); ++k) jobs.emplace_back(a, k);
    }
    std::vector<std::vector<RltDistribution>> runs(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        const auto& axis = dataset.axes[jobs[j].first];
        runs[j] = rlt_ensemble(axis.values[jobs[j].second], rlt, derive_seed(seed, {axis.id, jobs[j].second}), 1);
    });

    const GroundCost ground = GroundCost::squared_index(rlt.i_max);
    std::vector<WassersteinRlt> out(dataset.axes.size());
    parallel_for(dataset.axes.size(), threads, [&](std::size_t a) {
        WassersteinRlt& w = out[a];
        w.axis_id = dataset.axes[a].id;
        w.axis_name = dataset.axes[a].name;
        std::vector<Distribution> inputs;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].first != a) continue;
            for (auto& r : runs[j]) {
                if (r.degenerate) ++w.degenerate_runs;
                inputs.push_back(std::move(r.mass));
            }
        }
        w.ensemble_size = inputs.size();
        if (w.degenerate_runs == inputs.size()) {
            w.degenerate = true;
            w.mass = delta_at_zero(rlt.i_max);
            return;
        }
        const std::vector<double> weights(inputs.size(), 1.0 / static_cast<double>(inputs.size()));
        auto bary = wasserstein_barycenter(inputs, weights, ground, ot);
        w.mass = std::move(bary.mass);
        w.iterations = bary.iterations;
        w.last_delta = bary.last_delta;
    });
    return out;
}

void SimilarityParams::validate() const {
    if (mode == SigmaMode::fixed && !(sigma > 0.0 && std::isfinite(sigma))) {
        throw ParameterError("sigma must be positive and finite");
    }
}

SimilarityMatrix similarity_matrix(const std::vector<WassersteinRlt>& rows, const std::vector<WassersteinRlt>* cols,
                                   const OtParams& ot, const SimilarityParams& sim, std::size_t threads) {
    ot.validate();
    sim.validate();
    const bool square = cols == nullptr;
    const auto& cs = square ? rows : *cols;
    if (rows.empty() || cs.empty()) throw ShapeError("similarity matrix needs at least one row and one column");
    const std::size_t n = rows.front().mass.size();
    for (const auto* list : {&rows, &cs}) {
        for (const auto& w : *list) {
            if (w.mass.size() != n) throw ShapeError("signatures differ in length");
        }
    }
    const GroundCost ground = GroundCost::squared_index(n);
    const auto nr = rows.size(), nc = cs.size();

    // d(p, q) - (d(p, p) + d(q, q)) / 2, with the self terms solved once.
    std::vector<OtResult> self_r(nr), self_c(square ? 0 : nc);
    parallel_for(nr + self_c.size(), threads, [&](std::size_t i) {
        const auto& p = i < nr ? rows[i].mass : cs[i - nr].mass;
        (i < nr ? self_r[i] : self_c[i - nr]) = sinkhorn_unbalanced(p, p, ground, ot);
    });
    const auto& self_cols = square ? self_r : self_c;

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = square ? i + 1 : 0; j < nc; ++j) pairs.emplace_back(i, j);
    }
    std::vector<OtResult> cross(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t t) {
        cross[t] = sinkhorn_unbalanced(rows[pairs[t].first].mass, cs[pairs[t].second].mass, ground, ot);
    });

    SimilarityMatrix m;
    m.square = square;
    m.distances = Matrix::Zero(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const auto [i, j] = pairs[t];
        const double d = std::max(0.0, cross[t].cost - 0.5 * (self_r[i].cost + self_cols[j].cost));
        m.distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
        if (square) m.distances(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
    for (const auto* list : {&self_r, &self_c, &cross}) {
        for (const auto& r : *list) {
            m.ot_iterations += r.iterations;
            m.ot_last_delta = std::max(m.ot_last_delta, r.last_delta);
        }
    }
    for (const auto& w : rows) m.row_axes.push_back(w.axis_id);
    for (const auto& w : cs) m.col_axes.push_back(w.axis_id);

    std::vector<double> positive;
    for (Eigen::Index i = 0; i < m.distances.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.distances.cols(); ++j) {
            if ((!square || i != j) && m.distances(i, j) > 0.0) positive.push_back(m.distances(i, j));
        }
    }
    m.degenerate = positive.empty();
    if (sim.mode == SigmaMode::fixed) {
        m.sigma = sim.sigma;
    } else if (!positive.empty()) {
        std::sort(positive.begin(), positive.end());
        const std::size_t h = positive.size() / 2;
        m.sigma = positive.size() % 2 ? positive[h] : 0.5 * (positive[h - 1] + positive[h]);
    }
    if (m.degenerate || m.sigma <= 0.0) {
        m.similarities = Matrix::Ones(m.distances.rows(), m.distances.cols());
    } else {
        m.similarities = (-m.distances.array() / m.sigma).exp().matrix();
    }
    return m;
}

void aggregate_scores(const Matrix& m_prime, double& rho_in, double& rho_out) {
    rho_in = m_prime.trace();
    rho_out = m_prime.sum() - rho_in;
}

ScoreReport score_unsupervised(const SimilarityMatrix& m, const ClusterParams& params) {
    check_similarity_matrix(m);
    const auto j = static_cast<std::size_t>(m.similarities.rows());
    if (static_cast<std::size_t>(m.similarities.cols()) != j) throw ShapeError("unsupervised scoring needs a square matrix");
    const std::size_t c_max = params.c_max == 0 ? j : std::min(params.c_max, j);

    ScoreReport r;
    r.m = m;
    auto sel = select_c(m.similarities, c_max, params.seed, true, params.threads);
    r.variance = std::move(sel.variance);
    r.assignments = std::move(sel.clustering);
    r.c = r.assignments.c;
    const auto groups = members(r.assignments.row_labels, r.c);
    r.m_prime = Matrix::Zero(static_cast<Eigen::Index>(r.c), static_cast<Eigen::Index>(r.c));
    for (std::size_t a = 0; a < r.c; ++a) {
        for (std::size_t b = 0; b < r.c; ++b) {
            const bool skip_self = a == b && groups[a].size() > 1;
            r.m_prime(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                block_mean(m.similarities, groups[a], groups[b], skip_self);
        }
    }
    return finish(std::move(r));
}

ScoreReport score_supervised(const SimilarityMatrix& m, const ClusterParams& params) {
    check_similarity_matrix(m);
    const auto j = static_cast<std::size_t>(m.similarities.rows());
    const auto i = static_cast<std::size_t>(m.similarities.cols());
    const std::size_t limit = std::min(j, i);
    const std::size_t c_max = params.c_max == 0 ? limit : std::min(params.c_max, limit);

    ScoreReport r;
    r.m = m;
    auto sel = select_c(m.similarities, c_max, params.seed, false, params.threads);
    r.variance = std::move(sel.variance);
    r.assignments = std::move(sel.clustering);
    r.c = std::min(r.assignments.c, i);
    const auto row_groups = members(r.assignments.row_labels, r.assignments.c);
    const auto col_groups = members(r.assignments.col_labels, r.assignments.c);
    r.m_prime = Matrix::Zero(static_cast<Eigen::Index>(r.c), static_cast<Eigen::Index>(r.c));
    for (std::size_t a = 0; a < r.c; ++a) {
        for (std::size_t b = 0; b < r.c; ++b) {
            r.m_prime(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                block_mean(m.similarities, row_groups[a], col_groups[b], false);
        }
    }
    r = finish(std::move(r));
    r.mu_sup = r.mu / static_cast<double>(i);
    return r;
}

std::vector<std::string> signature_warnings(const std::vector<WassersteinRlt>& signatures) {
    std::vector<std::string> out;
    for (const auto& w : signatures) {
        const std::string label = "axis " + std::to_string(w.axis_id) + (w.axis_name.empty() ? "" : " (" + w.axis_name + ")");
        if (w.degenerate) {
            out.push_back(label + ": every cloud is degenerate, signature set to a delta at 0");
        } else if (w.degenerate_runs > 0) {
            out.push_back(label + ": " + std::to_string(w.degenerate_runs) + " of " + std::to_string(w.ensemble_size) +
                          " runs degenerate");
        }
    }
    return out;
}

ScoreReport score_dataset(const ConditionedDataset& dataset, const ScoreConfig& config) {
    const auto sig = conditioned_wrlts(dataset, config.rlt, config.ot, derive_seed(config.seed, {0}), config.threads);
    const auto m = similarity_matrix(sig, nullptr, config.ot, config.similarity, config.threads);
    auto r = score_unsupervised(m, {config.c_max, derive_seed(config.seed, {1}), config.threads});
    auto w = signature_warnings(sig);
    r.warnings.insert(r.warnings.begin(), w.begin(), w.end());
    return r;
}

ScoreReport score_dataset_supervised(const ConditionedDataset& generated, const ConditionedDataset& real,
                                     const ScoreConfig& config) {
    const auto seed = derive_seed(config.seed, {0});
    const auto rows = conditioned_wrlts(generated, config.rlt, config.ot, seed, config.threads);
    const auto cols = conditioned_wrlts(real, config.rlt, config.ot, seed, config.threads);
    const auto m = similarity_matrix(rows, &cols, config.ot, config.similarity, config.threads);
    auto r = score_supervised(m, {config.c_max, derive_seed(config.seed, {1}), config.threads});
    auto w = signature_warnings(rows);
    auto wc = signature_warnings(cols);
    for (auto& s : wc) s = "real " + s;
    w.insert(w.end(), wc.begin(), wc.end());
    r.warnings.insert(r.warnings.begin(), w.begin(), w.end());
    return r;
}

}  // namespace topo
