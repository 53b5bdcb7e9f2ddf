#include "topo/ot.hpp"

#include "topo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace topo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kAndersonMemory = 5;
constexpr double kTailFloor = 1e-200;  // relative to the barycenter peak

// log(sum_j exp(a_j - C_ij / eps)) for every row i, through a precomputed
// kernel. Rows whose kernel sum underflows are redone term by term.
class LogKernel {
  public:
    // Kernel entries and shifted exponentials below kTiny are zeroed so no
    // product is subnormal; a row is trusted only when its sum clears
    // kTrusted, far above anything the zeroing can drop.
    static constexpr double kTiny = 1e-150;
    static constexpr double kTrusted = 1e-130;

    LogKernel(const Matrix& cn, double eps)
        : scaled_(cn / eps), scaled_t_(scaled_.transpose()), k_((-scaled_).array().exp().matrix()) {
        k_ = (k_.array() < kTiny).select(0.0, k_);
    }

    Eigen::VectorXd rows(const Eigen::VectorXd& a) const { return apply(k_, a, false, nullptr); }
    Eigen::VectorXd cols(const Eigen::VectorXd& a) const { return apply(k_, a, true, nullptr); }

    // Only the listed rows; the rest are left at 0.
    Eigen::VectorXd rows(const Eigen::VectorXd& a, const std::vector<Eigen::Index>& only) const {
        return apply(k_, a, false, &only);
    }

  private:
    Eigen::VectorXd apply(const Matrix& k, const Eigen::VectorXd& a, bool transpose,
                          const std::vector<Eigen::Index>* only) const {
        const Eigen::Index n = transpose ? k.cols() : k.rows();
        Eigen::VectorXd out(n);
        const double amax = a.maxCoeff();
        if (amax == kNegInf) {
            out.setConstant(kNegInf);
            return out;
        }
        Eigen::VectorXd e = (a.array() - amax).exp().matrix();
        e = (e.array() < kTiny).select(0.0, e);
        const Eigen::VectorXd s = transpose ? Eigen::VectorXd(k.transpose() * e) : Eigen::VectorXd(k * e);
        support_.clear();
        for (Eigen::Index j = 0; j < a.size(); ++j) {
            if (a(j) != kNegInf) support_.push_back(j);
        }
        if (only) out.setZero();
        const auto count = only ? static_cast<Eigen::Index>(only->size()) : n;
        for (Eigen::Index r = 0; r < count; ++r) {
            const Eigen::Index i = only ? (*only)[static_cast<std::size_t>(r)] : r;
            if (s(i) > kTrusted) {
                out(i) = amax + std::log(s(i));
                continue;
            }
            // Exact log-sum-exp over the finite entries; terms more than 40
            // below the maximum are below double resolution of the sum.
            terms_.resize(static_cast<Eigen::Index>(support_.size()));
            double best = kNegInf;
            for (std::size_t t = 0; t < support_.size(); ++t) {
                const Eigen::Index j = support_[t];
                terms_(static_cast<Eigen::Index>(t)) = a(j) - (transpose ? scaled_(j, i) : scaled_t_(j, i));
                best = std::max(best, terms_(static_cast<Eigen::Index>(t)));
            }
            double acc = 0.0;
            for (Eigen::Index t = 0; t < terms_.size(); ++t) {
                if (terms_(t) > best - 40.0) acc += std::exp(terms_(t) - best);
            }
            out(i) = best + std::log(acc);
        }
        return out;
    }

    Matrix scaled_;  // C / eps
    Matrix scaled_t_;
    Matrix k_;
    mutable Eigen::VectorXd terms_;
    mutable std::vector<Eigen::Index> support_;
};

Eigen::VectorXd safe_log(const Distribution& p) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) out(static_cast<Eigen::Index>(i)) = p[i] > 0.0 ? std::log(p[i]) : kNegInf;
    return out;
}

double total(const Distribution& p) { return std::accumulate(p.begin(), p.end(), 0.0); }

void check_distribution(const Distribution& p, std::size_t n, const char* name) {
    if (p.size() != n) {
        throw ShapeError(std::string(name) + " has " + std::to_string(p.size()) + " bins, cost expects " +
                         std::to_string(n));
    }
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ParameterError(std::string(name) + " must be finite and nonnegative");
    }
}

double kl_tilde(const Eigen::VectorXd& a, const Distribution& b) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double bi = b[static_cast<std::size_t>(i)];
        if (a(i) > 0.0) acc += a(i) * std::log(a(i) / bi) - a(i);
        acc += bi;
    }
    return acc;
}

// Type-II Anderson mixing for a fixed-point map on a vector. The caller
// decides when an extrapolated point is rejected and calls reset().
class Anderson {
  public:
    explicit Anderson(std::size_t memory) : memory_(memory) {}

    Eigen::VectorXd next(const Eigen::VectorXd& x, const Eigen::VectorXd& tx) {
        const Eigen::VectorXd r = tx - x;
        if (!r.allFinite()) {
            reset();
            return tx;
        }
        if (has_prev_) {
            dr_.push_back(r - prev_r_);
            dt_.push_back(tx - prev_t_);
            if (dr_.size() > memory_) {
                dr_.erase(dr_.begin());
                dt_.erase(dt_.begin());
            }
        }
        prev_r_ = r;
        prev_t_ = tx;
        has_prev_ = true;
        if (dr_.empty()) return tx;
        const auto k = static_cast<Eigen::Index>(dr_.size());
        Matrix a(x.size(), k), b(x.size(), k);
        for (Eigen::Index j = 0; j < k; ++j) {
            a.col(j) = dr_[static_cast<std::size_t>(j)];
            b.col(j) = dt_[static_cast<std::size_t>(j)];
        }
        const Eigen::VectorXd gamma = a.colPivHouseholderQr().solve(r);
        if (!gamma.allFinite()) {
            reset();
            return tx;
        }
        return tx - b * gamma;
    }

    void reset() {
        dr_.clear();
        dt_.clear();
        has_prev_ = false;
    }

  private:
    std::size_t memory_;
    std::vector<Eigen::VectorXd> dr_, dt_;
    Eigen::VectorXd prev_r_, prev_t_;
    bool has_prev_ = false;
};

// Sequence of regularizations ending exactly at params.epsilon.
std::vector<double> schedule(const OtParams& params) {
    std::vector<double> eps;
    for (double e = params.epsilon_start; e > params.epsilon; e *= 0.5) eps.push_back(e);
    eps.push_back(params.epsilon);
    return eps;
}

}  // namespace

GroundCost GroundCost::squared_index(std::size_t n) {
    if (n == 0) throw ParameterError("ground cost needs at least one bin");
    GroundCost g;
    g.cost.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < g.cost.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cost.cols(); ++j) g.cost(i, j) = static_cast<double>((i - j) * (i - j));
    }
    return g;
}

void OtParams::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon must be positive and finite");
    if (!(tau > 0.0)) throw ParameterError("tau must be positive");
    if (max_iter == 0) throw ParameterError("max_iter must be positive");
    if (!(tol > 0.0)) throw ParameterError("tol must be positive");
    if (std::isnan(epsilon_start)) throw ParameterError("epsilon_start must be a number");
    if (!(stage_tol > 0.0)) throw ParameterError("stage_tol must be positive");
    if (!(barycenter_tol > 0.0)) throw ParameterError("barycenter_tol must be positive");
    if (barycenter_max_iter == 0) throw ParameterError("barycenter_max_iter must be positive");
}

double w2_exact_1d(const Distribution& p, const Distribution& q) {
    for (const Distribution* d : {&p, &q}) {
        for (double x : *d) {
            if (!(x >= 0.0) || !std::isfinite(x)) throw ParameterError("distribution must be finite and nonnegative");
        }
    }
    const double mp = total(p), mq = total(q);
    if (std::abs(mp - mq) > 1e-9 * std::max(1.0, std::max(mp, mq))) {
        throw DomainError("exact 1-D transport needs equal masses, got " + std::to_string(mp) + " and " +
                          std::to_string(mq));
    }
    double cost = 0.0;
    std::size_t i = 0, j = 0;
    double ra = p.empty() ? 0.0 : p[0];
    double rb = q.empty() ? 0.0 : q[0];
    while (i < p.size() && j < q.size()) {
        const double m = std::min(ra, rb);
        const double d = static_cast<double>(i) - static_cast<double>(j);
        cost += m * d * d;
        ra -= m;
        rb -= m;
        if (ra <= 0.0 && ++i < p.size()) ra = p[i];
        if (rb <= 0.0 && ++j < q.size()) rb = q[j];
    }
    return cost;
}

OtResult sinkhorn_unbalanced(const Distribution& p, const Distribution& q, const GroundCost& ground,
                             const OtParams& params) {
    params.validate();
    const Matrix& c = ground.cost;
    check_distribution(p, static_cast<std::size_t>(c.rows()), "p");
    check_distribution(q, static_cast<std::size_t>(c.cols()), "q");
    const double mp = total(p), mq = total(q);
    if (mp == 0.0 && mq == 0.0) throw ParameterError("both distributions are empty");
    if (params.balanced() && std::abs(mp - mq) > 1e-9 * std::max(mp, mq)) {
        throw DomainError("balanced transport needs equal masses");
    }
    const double cmax = c.maxCoeff();
    const double scale = cmax > 0.0 ? cmax : 1.0;
    const Matrix cn = c / scale;

    OtResult result;
    if (mp == 0.0 || mq == 0.0) {
        result.cost = params.tau * (mp + mq) * scale;
        return result;
    }

    const Eigen::VectorXd lp = safe_log(p), lq = safe_log(q);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(lp.size());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(lq.size());
    const bool symmetric = p == q && cn == cn.transpose();
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < lq.size(); ++j) {
        if (lq(j) != kNegInf) support.push_back(j);
    }
    // Dual objective at (f, g), given log sum_j exp((g_j - C_ij) / eps).
    auto dual = [&](const Eigen::VectorXd& fv, const Eigen::VectorXd& lse_f, const Eigen::VectorXd& gv, double e) {
        double d = 0.0;
        for (Eigen::Index i = 0; i < fv.size(); ++i) {
            const double pi = p[static_cast<std::size_t>(i)];
            if (pi == 0.0) continue;
            d += params.balanced() ? pi * fv(i) : -params.tau * pi * std::expm1(-fv(i) / params.tau);
            d -= e * std::exp(fv(i) / e + lse_f(i));
        }
        for (Eigen::Index j = 0; j < gv.size(); ++j) {
            const double qj = q[static_cast<std::size_t>(j)];
            if (qj == 0.0) continue;
            d += params.balanced() ? qj * gv(j) : -params.tau * qj * std::expm1(-gv(j) / params.tau);
        }
        return d;
    };
    const auto eps_list = schedule(params);
    double eps = params.epsilon;
    for (std::size_t stage = 0; stage < eps_list.size(); ++stage) {
        eps = eps_list[stage];
        const bool last = stage + 1 == eps_list.size();
        const double fi = params.balanced() ? 1.0 : params.tau / (params.tau + eps);
        const double stage_tol = last ? params.tol : std::max(params.tol, params.stage_tol);
        const LogKernel kernel(cn, eps);
        bool converged = false;
        std::size_t it = 0;
        double delta = 0.0;
        Anderson accel(kAndersonMemory);
        Eigen::VectorXd plain = g;
        bool extrapolated = false;
        double accepted = 0.0;
        for (; it < params.max_iter; ++it) {
            if (symmetric) {
                // Averaged fixed-point step for a self-transport; plain
                // alternation converges very slowly on this problem.
                const Eigen::VectorXd lse = kernel.rows(f / eps);
                const Eigen::VectorXd f_new = (fi * eps) * (lp - lse);
                delta = 0.0;
                for (Eigen::Index i = 0; i < f.size(); ++i) {
                    if (f_new(i) == kNegInf) continue;
                    delta += std::abs(std::exp(f(i) / eps + lse(i)) - std::exp(f_new(i) / eps + lse(i)));
                }
                if (std::isnan(delta)) delta = std::numeric_limits<double>::infinity();
                f = 0.5 * (f + f_new);
                g = f;
                if (delta < stage_tol) {
                    converged = true;
                    ++it;
                    break;
                }
                continue;
            }
            Eigen::VectorXd lse_f = kernel.rows(g / eps);
            f = (fi * eps) * (lp - lse_f);
            if (extrapolated) {
                // Plain sweeps never lower the dual objective; an
                // extrapolated point that does is dropped for the plain one.
                const double d = dual(f, lse_f, g, eps);
                if (!(d >= accepted - 1e-13 * (std::abs(accepted) + 1.0))) {
                    accel.reset();
                    g = plain;
                    lse_f = kernel.rows(g / eps);
                    f = (fi * eps) * (lp - lse_f);
                    accepted = dual(f, lse_f, g, eps);
                } else {
                    accepted = d;
                }
            } else {
                accepted = dual(f, lse_f, g, eps);
            }
            const Eigen::VectorXd lse = kernel.cols(f / eps);
            const Eigen::VectorXd g_new = (fi * eps) * (lq - lse);
            // L1 change of the column marginal of the plan; in the balanced
            // case this is exactly the marginal violation before the update.
            delta = 0.0;
            for (Eigen::Index j = 0; j < g.size(); ++j) {
                if (g_new(j) == kNegInf) continue;
                delta += std::abs(std::exp(g(j) / eps + lse(j)) - std::exp(g_new(j) / eps + lse(j)));
            }
            if (std::isnan(delta)) delta = std::numeric_limits<double>::infinity();
            const Eigen::VectorXd g_old = g;
            g = g_new;
            if (!params.balanced()) {
                // Best constant shift (f + s, g - s): the transport term does
                // not see it and plain alternation only drifts there at a
                // rate of about eps / tau per sweep.
                const double tau = params.tau;
                double a = 0.0, b = 0.0;
                for (Eigen::Index i = 0; i < f.size(); ++i) {
                    if (p[static_cast<std::size_t>(i)] > 0.0) a += p[static_cast<std::size_t>(i)] * std::exp(-f(i) / tau);
                }
                for (Eigen::Index j = 0; j < g.size(); ++j) {
                    if (q[static_cast<std::size_t>(j)] > 0.0) b += q[static_cast<std::size_t>(j)] * std::exp(-g(j) / tau);
                }
                if (a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b)) {
                    const double shift = 0.5 * tau * std::log(a / b);
                    f.array() += shift;
                    g.array() -= shift;
                }
            }
            if (delta < stage_tol) {
                converged = true;
                ++it;
                break;
            }
            plain = g;
            extrapolated = false;
            if (!support.empty()) {
                extrapolated = true;
                Eigen::VectorXd x(static_cast<Eigen::Index>(support.size())), tx(x.size());
                for (std::size_t k = 0; k < support.size(); ++k) {
                    x(static_cast<Eigen::Index>(k)) = g_old(support[k]);
                    tx(static_cast<Eigen::Index>(k)) = g(support[k]);
                }
                const Eigen::VectorXd y = accel.next(x, tx);
                for (std::size_t k = 0; k < support.size(); ++k) g(support[k]) = y(static_cast<Eigen::Index>(k));
            }
        }
        result.iterations += it;
        result.last_delta = delta;
        if (last && !converged) {
            throw ConvergenceError("sinkhorn did not converge", result.iterations, delta);
        }
    }

    double transport = 0.0, entropy = 0.0;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(lp.size()), col = Eigen::VectorXd::Zero(lq.size());
    for (Eigen::Index i = 0; i < cn.rows(); ++i) {
        if (f(i) == kNegInf) continue;
        for (Eigen::Index j = 0; j < cn.cols(); ++j) {
            if (g(j) == kNegInf) continue;
            const double lpij = (f(i) + g(j) - cn(i, j)) / eps;
            const double pij = std::exp(lpij);
            if (pij == 0.0) continue;
            transport += pij * cn(i, j);
            entropy += pij * (lpij - 1.0);
            row(i) += pij;
            col(j) += pij;
        }
    }
    double value = transport + eps * entropy;
    if (!params.balanced()) value += params.tau * (kl_tilde(row, p) + kl_tilde(col, q));
    result.cost = value * scale;
    result.transport = transport * scale;
    return result;
}

OtResult sinkhorn_debiased(const Distribution& p, const Distribution& q, const GroundCost& ground,
                           const OtParams& params) {
    const OtResult pq = sinkhorn_unbalanced(p, q, ground, params);
    const OtResult pp = sinkhorn_unbalanced(p, p, ground, params);
    const OtResult qq = sinkhorn_unbalanced(q, q, ground, params);
    OtResult out;
    out.cost = pq.cost - 0.5 * (pp.cost + qq.cost);
    out.iterations = pq.iterations + pp.iterations + qq.iterations;
    out.last_delta = std::max({pq.last_delta, pp.last_delta, qq.last_delta});
    return out;
}

BarycenterResult wasserstein_barycenter(const std::vector<Distribution>& ps, const std::vector<double>& weights,
                                        const GroundCost& ground, const OtParams& params) {
    params.validate();
    const Matrix& c = ground.cost;
    if (c.rows() != c.cols()) throw ShapeError("barycenter needs a square ground cost");
    if (ps.empty()) throw ParameterError("barycenter of an empty list");
    if (ps.size() != weights.size()) throw ShapeError("one weight per distribution required");
    const auto n = static_cast<std::size_t>(c.rows());
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("weights must be finite and nonnegative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw ParameterError("weights must sum to 1");

    std::vector<const Distribution*> inputs;
    std::vector<double> lambda;
    for (std::size_t k = 0; k < ps.size(); ++k) {
        check_distribution(ps[k], n, "barycenter input");
        if (weights[k] == 0.0) continue;
        if (total(ps[k]) == 0.0) throw ParameterError("barycenter input with zero mass");
        auto same = std::find_if(inputs.begin(), inputs.end(), [&](const Distribution* d) { return *d == ps[k]; });
        if (same != inputs.end()) {
            lambda[static_cast<std::size_t>(same - inputs.begin())] += weights[k];
        } else {
            inputs.push_back(&ps[k]);
            lambda.push_back(weights[k]);
        }
    }
    if (params.balanced()) {
        const double m0 = total(*inputs[0]);
        for (const Distribution* d : inputs) {
            if (std::abs(total(*d) - m0) > 1e-9 * m0) throw DomainError("balanced barycenter needs equal masses");
        }
    }

    const double cmax = c.maxCoeff();
    const Matrix cn = c / (cmax > 0.0 ? cmax : 1.0);
    const std::size_t k_count = inputs.size();
    std::vector<Eigen::VectorXd> lp(k_count);
    std::vector<std::vector<Eigen::Index>> support(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        lp[k] = safe_log(*inputs[k]);
        for (Eigen::Index i = 0; i < lp[k].size(); ++i) {
            if (lp[k](i) != kNegInf) support[k].push_back(i);
        }
    }

    const auto ni = static_cast<Eigen::Index>(n);
    // Dual potentials (eps * log scaling) carried across the schedule.
    std::vector<Eigen::VectorXd> pot_v(k_count, Eigen::VectorXd::Zero(ni));
    Eigen::VectorXd pot_a = Eigen::VectorXd::Zero(ni);
    Eigen::VectorXd lq = Eigen::VectorXd::Zero(ni);
    Eigen::VectorXd lq_prev = Eigen::VectorXd::Constant(ni, kNegInf);

    BarycenterResult result;
    const auto eps_list = schedule(params);
    for (std::size_t stage = 0; stage < eps_list.size(); ++stage) {
        const double eps = eps_list[stage];
        const bool last = stage + 1 == eps_list.size();
        const double fi = params.balanced() ? 1.0 : params.tau / (params.tau + eps);
        const double stage_tol = last ? params.barycenter_tol : std::max(params.barycenter_tol, params.stage_tol);
        const LogKernel kernel(cn, eps);

        std::vector<Eigen::VectorXd> lv(k_count), ktu(k_count);
        for (std::size_t k = 0; k < k_count; ++k) lv[k] = pot_v[k] / eps;
        Eigen::VectorXd la = pot_a / eps;

        bool converged = false;
        std::size_t it = 0;
        double delta = 0.0;
        for (; it < params.barycenter_max_iter; ++it) {
            for (std::size_t k = 0; k < k_count; ++k) {
                const Eigen::VectorXd lu = fi * (lp[k] - kernel.rows(lv[k], support[k]));
                ktu[k] = kernel.cols(lu);
            }
            Eigen::VectorXd ls(ni);
            if (fi == 1.0) {
                ls.setZero();
                for (std::size_t k = 0; k < k_count; ++k) ls += lambda[k] * ktu[k];
            } else {
                const double r = 1.0 - fi;
                for (Eigen::Index i = 0; i < ni; ++i) {
                    double best = kNegInf;
                    for (std::size_t k = 0; k < k_count; ++k) best = std::max(best, r * ktu[k](i));
                    double acc = 0.0;
                    if (best != kNegInf) {
                        for (std::size_t k = 0; k < k_count; ++k) acc += lambda[k] * std::exp(r * ktu[k](i) - best);
                    }
                    ls(i) = best == kNegInf ? kNegInf : (best + std::log(acc)) / r;
                }
            }
            lq = la / fi + ls;
            for (std::size_t k = 0; k < k_count; ++k) lv[k] = fi * (lq - ktu[k]);
            la = 0.5 * (la + fi * (lq - kernel.rows(la)));

            // Change relative to the current peak, in log space: far-apart
            // inputs start from a barycenter that underflows everywhere.
            const double peak = std::max(lq.maxCoeff(), lq_prev.maxCoeff());
            delta = peak == kNegInf ? std::numeric_limits<double>::infinity()
                                    : ((lq.array() - peak).exp() - (lq_prev.array() - peak).exp()).abs().maxCoeff();
            lq_prev = lq;
            if (!std::isfinite(delta)) break;
            if (delta < stage_tol) {
                converged = true;
                ++it;
                break;
            }
        }
        result.iterations += it;
        result.last_delta = delta;
        if (!std::isfinite(delta) || (last && !converged)) {
            throw ConvergenceError("barycenter did not converge", result.iterations, delta);
        }
        for (std::size_t k = 0; k < k_count; ++k) pot_v[k] = eps * lv[k];
        pot_a = eps * la;
    }

    // Tails far below the peak are underflow residue, often subnormal; left
    // in, they slow every later transport from the barycenter.
    const double floor = lq.maxCoeff() + std::log(kTailFloor);
    const Eigen::VectorXd q_mass = (lq.array() < floor).select(0.0, lq.array().exp()).matrix();
    if (!(q_mass.sum() > 0.0)) throw ConvergenceError("barycenter mass underflowed", result.iterations, result.last_delta);
    result.mass.assign(q_mass.data(), q_mass.data() + q_mass.size());
    return result;
}

}  // namespace topo
