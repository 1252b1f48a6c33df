#pragma once

#include <vector>

#include "ris/numerics.hpp"

namespace ris {

// min_x  Re Tr(x^H A x) - 2 Re Tr(B^H x)
// s.t.   Re Tr(x^H Q_j x) + 2 Re Tr(L_j^H x) <= cap_j
// where x has the shape of B (a matrix variable; vectors are single-column).
// A and every Q_j are Hermitian PSD.
struct QuadConstraint {
    CMatrix q;
    CMatrix lin;  // 0x0 when the constraint has no linear part
    double cap = 0.0;
    // natural magnitude of the constraint (e.g. the full power budget);
    // feasibility slack is relative to max(|cap|, slack_scale)
    double slack_scale = 0.0;
};

struct QcqpProblem {
    CMatrix a;
    CMatrix b;
    std::vector<QuadConstraint> cons;
    // optional known-feasible anchor (0x0 = none); required for problems
    // whose caps are negative but whose linear terms keep them feasible
    CMatrix x0;
};

struct QcqpOptions {
    int max_iters = 300;        // tau_max for the ellipsoid path
    double radius = 10.0;       // R, initial ellipsoid radius
    double bisection_tol = 1e-8;
    double feasibility_tol = 1e-6;  // relative slack accepted on constraints
};

struct QcqpResult {
    CMatrix x;
    std::vector<double> lambda;
    double objective = 0.0;
    int iters = 0;
    // det(Pi) after every ellipsoid update (empty for the other paths);
    // consecutive ratios are a fixed function of the dual dimension.
    std::vector<double> ellipsoid_det_trace;
};

// Dispatches on constraint count: unconstrained direct solve, dual bisection
// for one constraint, dual ellipsoid (Algorithm-1 semantics with
// best-feasible-iterate tracking) otherwise. Throws InfeasibleSubproblem when
// x = 0 is infeasible (some cap < 0) and SolverFailure when no feasible
// iterate is found.
QcqpResult qcqp_solve(const QcqpProblem& prob, const QcqpOptions& opts = {});

}  // namespace ris
