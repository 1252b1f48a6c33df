// Acceptance suite: one pass/fail line per criterion.
// Run with no arguments for the full suite, or pass criterion numbers to run
// a subset (e.g. "acceptance 1 4 9").
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ris/bench.hpp"
#include "ris/channel.hpp"
#include "ris/config.hpp"
#include "ris/excitation.hpp"
#include "ris/numerics.hpp"
#include "ris/objective.hpp"
#include "ris/pdd.hpp"
#include "ris/qcqp.hpp"
#include "ris/rng.hpp"

using namespace ris;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

CMatrix random_matrix(Rng& rng, index_t rows, index_t cols) {
    CMatrix m(rows, cols);
    for (index_t i = 0; i < rows; ++i)
        for (index_t j = 0; j < cols; ++j) m(i, j) = rng.cgaussian();
    return m;
}

CVector random_vector(Rng& rng, index_t n) {
    CVector v(n);
    for (index_t i = 0; i < n; ++i) v[i] = rng.cgaussian();
    return v;
}

// -------------------------------------------------------------------------
// 1. matrix-identity suite
// -------------------------------------------------------------------------
bool criterion_1() {
    Rng rng(101);
    double worst_had = 0.0, worst_kron = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const index_t m = 2 + static_cast<index_t>(rng.next_u64() % 15);
        const CVector psi = random_vector(rng, m);
        const CMatrix a = random_matrix(rng, m, m);
        const CMatrix b = random_matrix(rng, m, m);
        const CMatrix psi_d = diag_from_h(psi);
        const CMatrix prod =
            matmul(matmul(psi_d, a), matmul(psi_d.adjoint(), b));
        cplx tr(0.0, 0.0);
        for (index_t i = 0; i < m; ++i) tr += prod(i, i);
        const cplx quad = dotc(psi, hadamard(a, b.transpose()) * psi);
        worst_had = std::max(worst_had,
                             std::abs(tr - quad) / (1.0 + std::abs(tr)));
    }
    for (int rep = 0; rep < 1000; ++rep) {
        const index_t p = 2 + static_cast<index_t>(rng.next_u64() % 7);
        const index_t q = 2 + static_cast<index_t>(rng.next_u64() % 7);
        const index_t r = 2 + static_cast<index_t>(rng.next_u64() % 7);
        const CMatrix a = random_matrix(rng, p, q);
        const CMatrix x = random_matrix(rng, q, r);
        const CMatrix b = random_matrix(rng, r, p);
        const CMatrix lhs = matmul(matmul(a, x), b);
        const CMatrix rhs_m = kron(b.transpose(), a);
        const CVector rhs = rhs_m * vec(x);
        const CVector lv = vec(lhs);
        worst_kron = std::max(worst_kron, norm2(lv - rhs) / (1.0 + norm2(lv)));
    }
    std::printf("  hadamard-trace worst %.3e, kron-vec worst %.3e\n",
                worst_had, worst_kron);
    return worst_had <= 1e-11 && worst_kron <= 1e-11;
}

// -------------------------------------------------------------------------
// 2. inter-excitation oracle
// -------------------------------------------------------------------------
ChannelSet small_channel(std::uint64_t seed, index_t m1, index_t m2) {
    Geometry g;
    g.n_bs_antennas = 3;
    g.m1_elements = m1;
    g.m2_elements = m2;
    g.n_users = 2;
    return synthesize(g, {}, {}, seed);
}

// rescale G so the loop spectral radius matches `target`
void set_radius(ChannelSet& ch, const ReflectionState& refl, double target) {
    const double r = spectral_radius(loop_matrix_1(ch, refl));
    ch.g *= cplx(std::sqrt(target / r), 0.0);
}

bool criterion_2() {
    Rng rng(202);
    double worst = 0.0;
    for (int rep = 0; rep < 500; ++rep) {
        const index_t m1 = 2 + static_cast<index_t>(rng.next_u64() % 5);
        const index_t m2 = 2 + static_cast<index_t>(rng.next_u64() % 5);
        ChannelSet ch = small_channel(300 + rep, m1, m2);
        ReflectionState refl;
        refl.a_max = 100.0;
        refl.psi1 = random_vector(rng, m1);
        refl.psi2 = random_vector(rng, m2);
        const double target = 0.1 + 0.8 * rng.uniform();
        set_radius(ch, refl, target);
        ExcitationOptions opts;
        opts.stability_margin = 1e-6;
        const ExcitationMatrices exc = excitation_matrices(ch, refl, opts);
        const CMatrix loop = loop_matrix_1(ch, refl);
        CMatrix series = CMatrix::identity(m1);
        CMatrix term = CMatrix::identity(m1);
        for (int i = 0; i < 600; ++i) {
            term = matmul(term, loop);
            series += term;
            if (frobenius_norm(term) < 1e-15 * frobenius_norm(series)) break;
        }
        worst = std::max(worst, frobenius_norm(exc.xi1 - series) /
                                    frobenius_norm(exc.xi1));
    }
    // bounce fixed point vs closed form
    int fixed_ok = 0;
    const int n_bounce = 50;
    for (int rep = 0; rep < n_bounce; ++rep) {
        const index_t m1 = 3, m2 = 3;
        ChannelSet ch = small_channel(900 + rep, m1, m2);
        ReflectionState refl;
        refl.a_max = 100.0;
        refl.psi1 = random_vector(rng, m1);
        refl.psi2 = random_vector(rng, m2);
        set_radius(ch, refl, 0.3 + 0.3 * rng.uniform());
        const CMatrix w = 0.1 * random_matrix(rng, 3, 2);
        BounceOptions bo;
        bo.max_bounces = 400;
        bo.relative_threshold = 1e-8;
        const SteadyStateReport rep_b =
            bounce_simulate(ch, refl, w, 900 + rep, bo);
        if (rep_b.converged) ++fixed_ok;
    }
    std::printf("  neumann worst %.3e, bounce fixed points %d/%d at 1e-8\n",
                worst, fixed_ok, n_bounce);
    return worst <= 1e-10 && fixed_ok == n_bounce;
}

// -------------------------------------------------------------------------
// 3. steady-state bounce claim at defaults
// -------------------------------------------------------------------------
bool criterion_3() {
    const ScenarioConfig cfg = default_config(false);
    SynthesisOptions syn;
    syn.noise_power_w = cfg.noise_power_w;
    const PowerBudget bud = resolve_budget(
        cfg.budget, Variant::DAR_IE,
        cfg.geometry.m1_elements + cfg.geometry.m2_elements);
    const double a_max = std::sqrt(db_to_linear(cfg.a_max2_db));
    int ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const ChannelSet ch = synthesize(cfg.geometry, cfg.path_loss,
                                         cfg.rician, 1 + seed, syn);
        const BeamformingState st = init_feasible(
            ch, bud.p_bs, bud.p_ris1, bud.p_ris2, a_max, 1 + seed, {});
        BounceOptions bo;
        bo.max_bounces = 20;
        bo.relative_threshold = 1e-6;
        const SteadyStateReport rep =
            bounce_simulate(ch, st.refl, st.w, 1 + seed, bo);
        if (rep.converged && rep.bounces_to_converge <= 20) ++ok;
    }
    std::printf("  converged within 20 bounces on %d/100 seeds\n", ok);
    return ok >= 95;
}

// -------------------------------------------------------------------------
// 4. fractional-programming tightness
// -------------------------------------------------------------------------
struct RandomState {
    ChannelSet ch;
    BeamformingState st;
    AuxiliaryState aux;
};

RandomState random_state(std::uint64_t seed, index_t n, index_t m,
                         index_t k) {
    Geometry g;
    g.n_bs_antennas = n;
    g.m1_elements = m;
    g.m2_elements = m;
    g.n_users = k;
    RandomState out{synthesize(g, {}, {}, seed), {}, {}};
    out.st = init_feasible(out.ch, 1.0, dbm_to_watts(14.0),
                           dbm_to_watts(14.0), 100.0, seed, {});
    const ExcitationMatrices exc = excitation_matrices(out.ch, out.st.refl);
    out.aux.x_mat = exc.xi1;
    out.aux.y_mat = exc.xi2;
    out.aux.phi1 = out.st.refl.psi1.conjugate();
    out.aux.phi2 = out.st.refl.psi2.conjugate();
    out.aux.gamma.assign(static_cast<std::size_t>(k), 0.0);
    out.aux.xi.assign(static_cast<std::size_t>(k), cplx(0.0, 0.0));
    return out;
}

bool criterion_4() {
    double worst = 0.0;
    const std::vector<double> weights{1.0, 1.0};
    for (int rep = 0; rep < 200; ++rep) {
        RandomState rs = random_state(1000 + rep, 3, 4, 2);
        const EquivalentChannels eq =
            equivalent_channels_aux(rs.ch, rs.st.refl, rs.aux);
        rs.aux.gamma = update_gamma(eq, rs.st.w, weights, rs.ch);
        rs.aux.xi = update_xi(eq, rs.st.w, rs.aux.gamma, weights, rs.ch);
        const double fr =
            fr_objective(rs.aux, eq, rs.st.w, weights, rs.ch);
        const double wsr = sinr_and_wsr(eq, rs.st.w, rs.ch, weights).wsr;
        worst = std::max(worst, std::abs(fr - wsr) / (1.0 + std::abs(wsr)));
    }
    std::printf("  fp tightness worst relative error %.3e\n", worst);
    return worst <= 1e-8;
}

// -------------------------------------------------------------------------
// 5. block stationarity against projected-gradient oracles
// -------------------------------------------------------------------------
double quad_form(const CMatrix& x, const CMatrix& q) {
    const CMatrix qx = matmul(q, x);
    double acc = 0.0;
    for (index_t i = 0; i < x.rows(); ++i)
        for (index_t j = 0; j < x.cols(); ++j)
            acc += std::real(std::conj(x(i, j)) * qx(i, j));
    return acc;
}

double lin_form(const CMatrix& l, const CMatrix& x) {
    double acc = 0.0;
    for (index_t i = 0; i < x.rows(); ++i)
        for (index_t j = 0; j < x.cols(); ++j)
            acc += std::real(std::conj(l(i, j)) * x(i, j));
    return acc;
}

double qcqp_objective(const QcqpProblem& p, const CMatrix& x) {
    return quad_form(x, p.a) - 2.0 * lin_form(p.b, x);
}

double con_value(const QuadConstraint& c, const CMatrix& x) {
    double v = quad_form(x, c.q);
    if (c.lin.rows() > 0) v += 2.0 * lin_form(c.lin, x);
    return v;
}

// projected-gradient ascent on the concave dual; lower bound on the optimum
double dual_pg_oracle(const QcqpProblem& p, int iters) {
    std::vector<double> lam(p.cons.size(), 1e-3);
    double best = -std::numeric_limits<double>::infinity();
    for (int t = 1; t <= iters; ++t) {
        CMatrix m = p.a;
        CMatrix rhs = p.b;
        for (std::size_t j = 0; j < p.cons.size(); ++j) {
            CMatrix q = p.cons[j].q;
            q *= cplx(lam[j], 0.0);
            m += q;
            if (p.cons[j].lin.rows() > 0) {
                CMatrix l = p.cons[j].lin;
                l *= cplx(lam[j], 0.0);
                rhs -= l;
            }
        }
        CMatrix x;
        try {
            x = solve(m, rhs);
        } catch (const SingularMatrix&) {
            for (double& l : lam) l = std::max(l, 1e-6) * 2.0;
            continue;
        }
        double d = qcqp_objective(p, x);
        bool finite = true;
        for (std::size_t j = 0; j < p.cons.size(); ++j) {
            const double cv = con_value(p.cons[j], x);
            d += lam[j] * (cv - p.cons[j].cap);
            if (!std::isfinite(cv)) finite = false;
        }
        if (finite && std::isfinite(d)) best = std::max(best, d);
        const double step = 0.5 / std::sqrt(static_cast<double>(t));
        for (std::size_t j = 0; j < p.cons.size(); ++j)
            lam[j] = std::max(0.0, lam[j] + step * (con_value(p.cons[j], x) -
                                                    p.cons[j].cap));
    }
    return best;
}

DualState random_duals(Rng& rng, index_t m1, index_t m2, double rho) {
    DualState d;
    d.rho = rho;
    d.c = 0.8;
    d.gamma1_dual = 0.05 * random_matrix(rng, m1, m1);
    d.gamma2_dual = 0.05 * random_matrix(rng, m2, m2);
    d.eta1 = CVector(m1);
    d.eta2 = CVector(m2);
    for (index_t i = 0; i < m1; ++i) d.eta1[i] = 0.05 * rng.cgaussian();
    for (index_t i = 0; i < m2; ++i) d.eta2[i] = 0.05 * rng.cgaussian();
    return d;
}

bool criterion_5() {
    const std::vector<double> weights{1.0, 1.0};
    // (a) finite-difference stationarity of the closed-form gamma, xi updates
    double worst_grad = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        RandomState rs = random_state(2000 + rep, 4, 8, 2);
        const EquivalentChannels eq =
            equivalent_channels_aux(rs.ch, rs.st.refl, rs.aux);
        rs.aux.gamma = update_gamma(eq, rs.st.w, weights, rs.ch);
        rs.aux.xi = update_xi(eq, rs.st.w, rs.aux.gamma, weights, rs.ch);
        auto fr_at = [&](const AuxiliaryState& a) {
            return fr_objective(a, eq, rs.st.w, weights, rs.ch);
        };
        const double h = 1e-5;
        for (std::size_t k = 0; k < 2; ++k) {
            AuxiliaryState ap = rs.aux, am = rs.aux;
            ap.gamma[k] += h * (1.0 + rs.aux.gamma[k]);
            am.gamma[k] -= h * (1.0 + rs.aux.gamma[k]);
            const double g =
                (fr_at(ap) - fr_at(am)) / (2.0 * h * (1.0 + rs.aux.gamma[k]));
            worst_grad = std::max(worst_grad, std::abs(g));
            const double xs = 1.0 + std::abs(rs.aux.xi[k]);
            for (int dir = 0; dir < 2; ++dir) {
                AuxiliaryState xp = rs.aux, xm = rs.aux;
                const cplx dz = dir == 0 ? cplx(h * xs, 0.0)
                                         : cplx(0.0, h * xs);
                xp.xi[k] += dz;
                xm.xi[k] -= dz;
                const double gx = (fr_at(xp) - fr_at(xm)) / (2.0 * h * xs);
                worst_grad = std::max(worst_grad, std::abs(gx));
            }
        }
    }

    // (b) block QCQP solutions vs projected-gradient dual oracles
    Rng rng(505);
    int solved = 0;
    double worst_gap = 0.0;
    for (int rep = 0; solved < 50; ++rep) {
        RandomState rs = random_state(2100 + rep, 4, 8, 2);
        const DualState dual = random_duals(rng, 8, 8, 0.8);
        QcqpProblem prob;
        const int kind = rep % 3;
        if (kind == 0) {  // W block, full constraint set
            const SubproblemW sub =
                build_w_subproblem(rs.ch, rs.st.refl, rs.aux, weights, rs.st,
                                   {});
            prob.a = sub.a_w;
            prob.b = sub.b_w;
            prob.cons.push_back({CMatrix::identity(4), {}, sub.p_bs,
                                 sub.p_bs});
            if (sub.con_ris1)
                prob.cons.push_back({sub.c_w, {}, sub.p1_hat, sub.p1_budget});
            if (sub.con_ris2)
                prob.cons.push_back({sub.d_w, {}, sub.p2_hat, sub.p2_budget});
            prob.x0 = sub.w0;
        } else {  // psi blocks (which = 1 or 2)
            const SubproblemPsi sub = build_psi_subproblem(
                rs.ch, rs.st.refl, rs.aux, dual, rs.st.w, weights, rs.st,
                kind, true);
            prob.a = sub.a_psi;
            prob.b = CMatrix(sub.b_psi.len(), 1);
            for (index_t i = 0; i < sub.b_psi.len(); ++i)
                prob.b(i, 0) = sub.b_psi[i];
            if (sub.con_self)
                prob.cons.push_back({sub.c_psi, {}, sub.p1_cap, sub.p1_cap});
            if (sub.con_other) {
                CMatrix lin(sub.d_vec.len(), 1);
                for (index_t i = 0; i < sub.d_vec.len(); ++i)
                    lin(i, 0) = sub.d_vec[i];
                prob.cons.push_back(
                    {sub.d_psi, lin, sub.p2_cap, sub.p2_budget});
            }
            prob.x0 = CMatrix(sub.psi0.len(), 1);
            for (index_t i = 0; i < sub.psi0.len(); ++i)
                prob.x0(i, 0) = sub.psi0[i];
        }
        QcqpResult res;
        try {
            res = qcqp_solve(prob);
        } catch (const Error&) {
            continue;  // skip pathological draws; we need 50 solved instances
        }
        const double bound = dual_pg_oracle(prob, 20000);
        const double scale = std::max(1.0, std::abs(bound));
        worst_gap = std::max(worst_gap, (res.objective - bound) / scale);
        ++solved;
    }
    std::printf("  fd gradient worst %.3e, oracle gap worst %.3e on %d "
                "subproblems\n",
                worst_grad, worst_gap, solved);
    return worst_grad < 1e-5 && worst_gap <= 1e-3;
}

// -------------------------------------------------------------------------
// shared full-solver machinery for criteria 6-9
// -------------------------------------------------------------------------
struct SolveOutcome {
    PddResult res;
    ChannelSet ch;
    BeamformingState budgets;
};

SolveOutcome full_solve(const ScenarioConfig& cfg, Variant v,
                        std::uint64_t seed) {
    SynthesisOptions syn;
    syn.noise_power_w = cfg.noise_power_w;
    SolveOutcome out{{}, synthesize(cfg.geometry, cfg.path_loss, cfg.rician,
                                    seed, syn),
                     {}};
    const index_t m_total =
        cfg.geometry.m1_elements + cfg.geometry.m2_elements;
    const PowerBudget bud = resolve_budget(cfg.budget, v, m_total);
    double a_max = std::sqrt(db_to_linear(cfg.a_max2_db));
    double p1 = bud.p_ris1, p2 = bud.p_ris2;
    PddStructure st;
    if (v == Variant::DPR) {
        a_max = 1.0;
        p1 = p2 = 0.0;
        st.optimize_xy = false;
        st.ris1_power_constraint = false;
        st.ris2_power_constraint = false;
    } else if (v == Variant::DAR_IDEAL || v == Variant::DAR_NON_IE) {
        st.optimize_xy = false;
    }
    BeamformingState init =
        init_feasible(out.ch, bud.p_bs, p1, p2, a_max, seed, st);
    PddConfig pc = cfg.pdd;
    pc.structure = st;
    pc.seed = seed;
    out.res = pdd_solve(out.ch, init, std::vector<double>(
                                          static_cast<std::size_t>(
                                              cfg.geometry.n_users),
                                          1.0),
                        pc);
    out.budgets = init;
    return out;
}

bool inner_monotone(const PddResult& res, double slack) {
    int prev_outer = -1;
    double prev_al = -std::numeric_limits<double>::infinity();
    for (const auto& row : res.rows) {
        if (row.outer_iter != prev_outer) {
            prev_outer = row.outer_iter;
            prev_al = row.al_value;
            continue;
        }
        if (row.al_value < prev_al - slack * std::max(1.0, std::abs(prev_al)))
            return false;
        prev_al = row.al_value;
    }
    return true;
}

// criterion 6 results are reused by criterion 9
std::vector<SolveOutcome> g_c6_solves;

bool criterion_6() {
    const ScenarioConfig cfg = default_config(false);
    int ok = 0;
    const int n_seeds = 20;
    for (int s = 0; s < n_seeds; ++s) {
        SolveOutcome so = full_solve(cfg, Variant::DAR_IE, 1 + s);
        const bool pass = so.res.final_violation <= 1e-8 &&
                          so.res.outer_iters <= 80 &&
                          inner_monotone(so.res, 1e-6);
        if (pass) ++ok;
        std::printf("  seed %d: viol %.2e outer %d monotone %d wsr %.4f\n",
                    1 + s, so.res.final_violation, so.res.outer_iters,
                    inner_monotone(so.res, 1e-6) ? 1 : 0, so.res.wsr_exact);
        g_c6_solves.push_back(std::move(so));
    }
    std::printf("  envelope satisfied on %d/%d seeds\n", ok, n_seeds);
    return ok * 10 >= n_seeds * 9;
}

double mean_wsr(const std::vector<RunResult>& rr, int* n_ok = nullptr) {
    double mean = 0.0;
    int n = 0;
    for (const auto& r : rr)
        if (r.ok) {
            mean += r.wsr_exact;
            ++n;
        }
    if (n_ok) *n_ok = n;
    return n > 0 ? mean / n : 0.0;
}

bool criterion_7() {
    ScenarioConfig cfg = default_config(false);
    cfg.trials = 20;
    std::map<Variant, double> means;
    for (Variant v : {Variant::DAR_IE, Variant::DAR_NON_IE, Variant::DPR,
                      Variant::SAR_NEAR_BS, Variant::SAR_NEAR_USERS}) {
        cfg.variant = v;
        int n_ok = 0;
        means[v] = mean_wsr(run_scenario(cfg), &n_ok);
        std::printf("  %s mean wsr %.4f over %d ok trials\n", variant_name(v),
                    means[v], n_ok);
    }
    const double ie = means[Variant::DAR_IE];
    const bool pass = ie >= means[Variant::DAR_NON_IE] &&
                      ie >= means[Variant::DPR] &&
                      ie >= means[Variant::SAR_NEAR_BS] &&
                      ie >= means[Variant::SAR_NEAR_USERS] &&
                      ie >= 1.10 * means[Variant::DAR_NON_IE];
    std::printf("  ie/non_ie ratio %.3f (need >= 1.10)\n",
                ie / means[Variant::DAR_NON_IE]);
    return pass;
}

bool criterion_8() {
    ScenarioConfig cfg = default_config(false);
    cfg.trials = 20;
    // (a) IE - IDEAL gap non-increasing in a_max^2
    std::vector<double> gaps_a;
    for (double am : {36.0, 44.0, 52.0}) {
        ScenarioConfig c = cfg;
        c.a_max2_db = am;
        c.variant = Variant::DAR_IE;
        const double ie = mean_wsr(run_scenario(c));
        c.variant = Variant::DAR_IDEAL;
        const double ideal = mean_wsr(run_scenario(c));
        gaps_a.push_back(std::abs(ie - ideal));
        std::printf("  a_max2 %.0f dB: ie %.4f ideal %.4f |gap| %.4f\n", am,
                    ie, ideal, gaps_a.back());
    }
    const double tol_a = 0.02 * std::max(1.0, gaps_a.front());
    const bool pass_a =
        gaps_a[1] <= gaps_a[0] + tol_a && gaps_a[2] <= gaps_a[1] + tol_a;
    // (b) IE - NON_IE gap collapses with inter-RIS distance
    std::vector<double> gaps_d;
    for (double dr : {10.0, 50.0}) {
        ScenarioConfig c = cfg;
        c.geometry.ris1_pos[0] = 30.0 - dr / 2.0;
        c.geometry.ris2_pos[0] = 30.0 + dr / 2.0;
        c.variant = Variant::DAR_IE;
        const double ie = mean_wsr(run_scenario(c));
        c.variant = Variant::DAR_NON_IE;
        const double non = mean_wsr(run_scenario(c));
        gaps_d.push_back(ie - non);
        std::printf("  d_r %.0f m: ie %.4f non_ie %.4f gap %.4f\n", dr, ie,
                    non, gaps_d.back());
    }
    const bool pass_b = gaps_d[1] <= 0.25 * gaps_d[0];
    std::printf("  gap(50)/gap(10) = %.3f (need <= 0.25)\n",
                gaps_d[1] / gaps_d[0]);
    return pass_a && pass_b;
}

bool check_feasible(const SolveOutcome& so, double tol) {
    const ReflectionState& refl = so.res.state.refl;
    for (const CVector* psi : {&refl.psi1, &refl.psi2})
        for (index_t i = 0; i < psi->len(); ++i) {
            const double a = std::abs((*psi)[i]);
            if (a < 1.0 || a > refl.a_max) return false;
        }
    const double p_bs = frobenius_norm_sq(so.res.state.w);
    if (p_bs > so.budgets.p_bs_max * (1.0 + tol)) return false;
    if (so.budgets.p1_max > 0.0 || so.budgets.p2_max > 0.0) {
        const ExcitationMatrices exc = excitation_matrices(so.ch, refl);
        const auto p = ris_powers(so.ch, refl, exc, so.res.state.w);
        if (p.first > so.budgets.p1_max * (1.0 + tol)) return false;
        if (p.second > so.budgets.p2_max * (1.0 + tol)) return false;
    }
    return true;
}

bool criterion_9() {
    const ScenarioConfig cfg = default_config(false);
    int checked = 0, ok = 0;
    if (g_c6_solves.empty())
        for (int s = 0; s < 5; ++s)
            g_c6_solves.push_back(full_solve(cfg, Variant::DAR_IE, 1 + s));
    for (const auto& so : g_c6_solves) {
        ++checked;
        if (check_feasible(so, 1e-6)) ++ok;
    }
    for (Variant v :
         {Variant::DPR, Variant::SAR_NEAR_USERS, Variant::DAR_IDEAL})
        for (int s = 0; s < 3; ++s) {
            const SolveOutcome so = full_solve(cfg, v, 1 + s);
            ++checked;
            if (check_feasible(so, 1e-6)) ++ok;
        }
    std::printf("  feasible outputs %d/%d\n", ok, checked);
    return ok == checked;
}

}  // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
    auto selected = [&](int n) {
        return wanted.empty() ||
               std::find(wanted.begin(), wanted.end(), n) != wanted.end();
    };
    struct Entry {
        int id;
        const char* name;
        bool (*fn)();
    };
    const Entry entries[] = {
        {1, "matrix identities", criterion_1},
        {2, "inter-excitation oracle", criterion_2},
        {3, "steady-state bounces", criterion_3},
        {4, "fp tightness", criterion_4},
        {5, "block stationarity", criterion_5},
        {6, "pdd convergence envelope", criterion_6},
        {7, "scenario ordering", criterion_7},
        {8, "gap-shrink trends", criterion_8},
        {9, "output feasibility", criterion_9},
    };
    int failures = 0;
    for (const auto& e : entries) {
        if (!selected(e.id)) continue;
        const auto t0 = Clock::now();
        bool ok = false;
        try {
            ok = e.fn();
        } catch (const std::exception& ex) {
            std::printf("  exception: %s\n", ex.what());
        }
        std::printf("criterion %d (%s): %s [%.1f s]\n", e.id, e.name,
                    ok ? "PASS" : "FAIL", seconds_since(t0));
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
