#include "ris/qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ris/errors.hpp"

namespace ris {

namespace {

double re_trace_quad(const CMatrix& x, const CMatrix& q) {
    // Re Tr(x^H q x)
    const CMatrix qx = matmul(q, x);
    double acc = 0.0;
    for (index_t i = 0; i < x.rows(); ++i)
        for (index_t j = 0; j < x.cols(); ++j)
            acc += std::real(std::conj(x(i, j)) * qx(i, j));
    return acc;
}

double re_trace_lin(const CMatrix& l, const CMatrix& x) {
    // Re Tr(l^H x)
    double acc = 0.0;
    for (index_t i = 0; i < x.rows(); ++i)
        for (index_t j = 0; j < x.cols(); ++j)
            acc += std::real(std::conj(l(i, j)) * x(i, j));
    return acc;
}

double constraint_value(const CMatrix& x, const QuadConstraint& c) {
    double v = re_trace_quad(x, c.q);
    if (c.lin.rows() > 0) v += 2.0 * re_trace_lin(c.lin, x);
    return v;
}

double objective_value(const QcqpProblem& p, const CMatrix& x) {
    return re_trace_quad(x, p.a) - 2.0 * re_trace_lin(p.b, x);
}

CMatrix x_of_lambda(const QcqpProblem& p, const std::vector<double>& lambda) {
    CMatrix m = p.a;
    CMatrix rhs = p.b;
    for (std::size_t j = 0; j < p.cons.size(); ++j) {
        const double l = lambda[j];
        if (l == 0.0) continue;
        CMatrix t = p.cons[j].q;
        t *= cplx(l, 0.0);
        m += t;
        if (p.cons[j].lin.rows() > 0) {
            CMatrix tl = p.cons[j].lin;
            tl *= cplx(l, 0.0);
            rhs -= tl;
        }
    }
    double ridge = 0.0;
    for (index_t i = 0; i < m.rows(); ++i) ridge += std::abs(m(i, i));
    ridge = 1e-12 * (1.0 + ridge / static_cast<double>(m.rows()));
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            return solve(m, rhs);
        } catch (const SingularMatrix&) {
            for (index_t i = 0; i < m.rows(); ++i) m(i, i) += ridge;
            ridge *= 1e3;
        }
    }
    throw SolverFailure("qcqp: stationarity system stayed singular",
                        std::numeric_limits<double>::infinity());
}

bool is_feasible(const QcqpProblem& p, const CMatrix& x, double tol) {
    for (const auto& c : p.cons) {
        const double scale = std::max({std::abs(c.cap), c.slack_scale, 1e-30});
        if (constraint_value(x, c) > c.cap + tol * scale) return false;
    }
    return true;
}

double worst_violation(const QcqpProblem& p, const CMatrix& x) {
    double worst = 0.0;
    for (const auto& c : p.cons) {
        const double scale = std::max({std::abs(c.cap), c.slack_scale, 1e-30});
        worst = std::max(worst, (constraint_value(x, c) - c.cap) / scale);
    }
    return worst;
}

// largest t in (0, 1] with t*x feasible; valid since caps are nonnegative
CMatrix shrink_to_feasible(const QcqpProblem& p, const CMatrix& x,
                           double tol) {
    if (is_feasible(p, x, tol)) return x;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        CMatrix xt = x;
        xt *= cplx(mid, 0.0);
        if (is_feasible(p, xt, tol))
            lo = mid;
        else
            hi = mid;
    }
    CMatrix out = x;
    out *= cplx(lo, 0.0);
    return out;
}

double sym_det(std::vector<double> a, std::size_t n) {
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (a[piv * n + c] == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a[c * n + j], a[piv * n + j]);
            det = -det;
        }
        det *= a[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
        }
    }
    return det;
}

QcqpResult solve_bisection(const QcqpProblem& p, const QcqpOptions& opts) {
    const QuadConstraint& c = p.cons[0];
    const double scale = std::max({std::abs(c.cap), c.slack_scale, 1e-30});
    auto viol = [&](double l) {
        return constraint_value(x_of_lambda(p, {l}), c) - c.cap;
    };

    QcqpResult res;
    if (viol(0.0) <= opts.feasibility_tol * scale) {
        res.x = x_of_lambda(p, {0.0});
        res.lambda = {0.0};
        res.objective = objective_value(p, res.x);
        return res;
    }
    double hi = 1.0;
    int doublings = 0;
    while (viol(hi) > 0.0) {
        hi *= 2.0;
        if (++doublings > 200) {
            if (p.x0.rows() > 0 && is_feasible(p, p.x0, opts.feasibility_tol)) {
                res.x = p.x0;
                res.lambda = {0.0};
                res.objective = objective_value(p, res.x);
                return res;
            }
            throw SolverFailure("qcqp: bisection bracket expansion failed",
                                viol(hi) / scale);
        }
    }
    double lo = hi * 0.5;
    if (doublings == 0) lo = 0.0;
    int iters = doublings;
    while (hi - lo > opts.bisection_tol * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (viol(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        ++iters;
    }
    res.x = x_of_lambda(p, {hi});
    res.lambda = {hi};
    res.objective = objective_value(p, res.x);
    res.iters = iters;
    return res;
}

QcqpResult solve_ellipsoid(const QcqpProblem& p, const QcqpOptions& opts) {
    const std::size_t n = p.cons.size();
    const double nn = static_cast<double>(n);
    std::vector<double> lambda(n, 0.0);
    std::vector<double> pi(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        pi[i * n + i] = opts.radius * opts.radius;

    QcqpResult res;
    bool have_best = false;
    double best_obj = std::numeric_limits<double>::infinity();
    double best_viol = std::numeric_limits<double>::infinity();

    for (int tau = 0; tau < opts.max_iters; ++tau) {
        res.iters = tau + 1;
        std::vector<double> g(n, 0.0);
        const bool lambda_ok =
            std::all_of(lambda.begin(), lambda.end(),
                        [](double l) { return l >= 0.0; });
        if (lambda_ok) {
            const CMatrix x = x_of_lambda(p, lambda);
            bool x_ok = true;
            for (std::size_t j = 0; j < n; ++j) {
                g[j] = p.cons[j].cap - constraint_value(x, p.cons[j]);
                const double scale = std::max({std::abs(p.cons[j].cap), p.cons[j].slack_scale, 1e-30});
                if (g[j] < -opts.feasibility_tol * scale) x_ok = false;
            }
            if (x_ok) {
                const double obj = objective_value(p, x);
                if (!have_best || obj < best_obj) {
                    have_best = true;
                    best_obj = obj;
                    res.x = x;
                    res.lambda = lambda;
                }
            } else {
                best_viol = std::min(best_viol, worst_violation(p, x));
                for (std::size_t j = 0; j < n; ++j)
                    g[j] = std::min(g[j] > 0.0 ? 1.0 : (g[j] < 0.0 ? -1.0 : 0.0),
                                    0.0);
            }
        } else {
            for (std::size_t j = 0; j < n; ++j)
                g[j] = std::min(
                    lambda[j] > 0.0 ? 1.0 : (lambda[j] < 0.0 ? -1.0 : 0.0), 0.0);
        }

        double gpg = 0.0;
        std::vector<double> pig(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) pig[i] += pi[i * n + j] * g[j];
        }
        for (std::size_t i = 0; i < n; ++i) gpg += g[i] * pig[i];
        if (!(gpg > 0.0)) break;  // zero subgradient or collapsed ellipsoid

        const double inv = 1.0 / std::sqrt(gpg);
        // lambda <- lambda - Pi ghat / (n+1); Pi ghat = pig * inv
        for (std::size_t i = 0; i < n; ++i)
            lambda[i] -= pig[i] * inv / (nn + 1.0);
        // Pi <- n^2/(n^2-1) (Pi - 2/(n+1) (Pi ghat)(Pi ghat)^T)
        const double shrink = nn * nn / (nn * nn - 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                pi[i * n + j] =
                    shrink * (pi[i * n + j] - 2.0 / (nn + 1.0) * pig[i] * inv *
                                                  pig[j] * inv);
        // symmetrize against drift
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double s = 0.5 * (pi[i * n + j] + pi[j * n + i]);
                pi[i * n + j] = s;
                pi[j * n + i] = s;
            }
        res.ellipsoid_det_trace.push_back(sym_det(pi, n));
    }

    if (!have_best)
        throw SolverFailure("qcqp: ellipsoid found no feasible iterate",
                            best_viol);
    res.objective = best_obj;
    return res;
}

}  // namespace

QcqpResult qcqp_solve(const QcqpProblem& prob, const QcqpOptions& opts) {
    const bool have_anchor = prob.x0.rows() > 0;
    for (const auto& c : prob.cons) {
        const double scale = std::max({std::abs(c.cap), c.slack_scale, 1e-30});
        // without an anchor, a negative cap on a centered constraint means
        // even x = 0 is infeasible
        if (!have_anchor && c.cap < -opts.feasibility_tol * scale)
            throw InfeasibleSubproblem("qcqp: negative constraint cap");
    }

    // normalized copy: unit-scale objective and constraints so the dual
    // multipliers live at O(1) inside the initial ellipsoid
    QcqpProblem p = prob;
    const double s_obj =
        std::max(frobenius_norm(p.a), frobenius_norm(p.b));
    if (s_obj > 0.0) {
        p.a *= cplx(1.0 / s_obj, 0.0);
        p.b *= cplx(1.0 / s_obj, 0.0);
    }
    std::vector<double> con_scale;
    for (auto& c : p.cons) {
        const double s = frobenius_norm(c.q);
        con_scale.push_back(s);
        if (s > 0.0) {
            c.q *= cplx(1.0 / s, 0.0);
            if (c.lin.rows() > 0) c.lin *= cplx(1.0 / s, 0.0);
            c.cap /= s;
            c.slack_scale /= s;
        }
    }

    QcqpResult res;
    if (p.cons.empty()) {
        res.x = x_of_lambda(p, {});
        res.objective = objective_value(p, res.x);
    } else if (p.cons.size() == 1) {
        res = solve_bisection(p, opts);
    } else {
        res = QcqpResult{};
        res.objective = std::numeric_limits<double>::infinity();
        bool have_res = false;
        auto consider = [&](const CMatrix& x) {
            if (!is_feasible(p, x, opts.feasibility_tol)) return;
            const double obj = objective_value(p, x);
            if (!have_res || obj < res.objective) {
                have_res = true;
                res.x = x;
                res.objective = obj;
                res.lambda.assign(p.cons.size(), 0.0);
            }
        };
        double best_viol = std::numeric_limits<double>::infinity();
        try {
            const QcqpResult er = solve_ellipsoid(p, opts);
            res = er;
            have_res = true;
        } catch (const SolverFailure& f) {
            best_viol = f.best_violation;
        }
        // fallback candidates: shrunk unconstrained solution, caller anchor
        consider(shrink_to_feasible(
            p, x_of_lambda(p, std::vector<double>(p.cons.size(), 0.0)),
            opts.feasibility_tol));
        if (have_anchor) consider(p.x0);
        if (!have_res)
            throw SolverFailure("qcqp: no feasible point found", best_viol);
    }
    res.objective = objective_value(prob, res.x);
    // multipliers were found on the normalized problem; map them back
    for (std::size_t j = 0; j < res.lambda.size(); ++j)
        if (con_scale[j] > 0.0 && s_obj > 0.0)
            res.lambda[j] *= s_obj / con_scale[j];
    return res;
}

}  // namespace ris
