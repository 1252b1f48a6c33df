#include "ris/excitation.hpp"

#include <cmath>
#include <utility>

#include "ris/errors.hpp"
#include "ris/rng.hpp"

namespace ris {

bool amplitudes_feasible(const ReflectionState& refl, double tol) {
    auto ok = [&](const CVector& psi) {
        for (index_t i = 0; i < psi.len(); ++i) {
            const double a = std::abs(psi[i]);
            if (a < 1.0 - tol || a > refl.a_max + tol) return false;
        }
        return true;
    };
    return ok(refl.psi1) && ok(refl.psi2);
}

CMatrix loop_matrix_1(const ChannelSet& ch, const ReflectionState& refl) {
    // Psi1 G^H Psi2 G, built with diagonal scalings instead of dense products
    CMatrix m = ch.g.adjoint();  // M1 x M2
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = 0; j < m.cols(); ++j)
            m(i, j) *= refl.psi1[i] * refl.psi2[j];
    return matmul(m, ch.g);
}

CMatrix loop_matrix_2(const ChannelSet& ch, const ReflectionState& refl) {
    CMatrix m = ch.g;  // M2 x M1
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = 0; j < m.cols(); ++j)
            m(i, j) *= refl.psi2[i] * refl.psi1[j];
    return matmul(m, ch.g.adjoint());
}

ExcitationMatrices excitation_matrices(const ChannelSet& ch,
                                       const ReflectionState& refl,
                                       const ExcitationOptions& opts) {
    const CMatrix l1 = loop_matrix_1(ch, refl);
    const CMatrix l2 = loop_matrix_2(ch, refl);
    const double r1 = spectral_radius(l1);
    const double r2 = spectral_radius(l2);
    const double limit = 1.0 - opts.stability_margin;
    if (r1 >= limit || r2 >= limit)
        throw UnstableLoop("excitation loop at or past stability margin",
                           std::max(r1, r2));
    CMatrix a1 = CMatrix::identity(l1.rows());
    a1 -= l1;
    CMatrix a2 = CMatrix::identity(l2.rows());
    a2 -= l2;
    return {inverse(a1), inverse(a2), r1, r2};
}

namespace {

CVector scale_by(const CVector& d, const CVector& v) {
    CVector out(v.len());
    for (index_t i = 0; i < v.len(); ++i) out[i] = d[i] * v[i];
    return out;
}

}  // namespace

SteadyStateReport bounce_simulate(const ChannelSet& ch,
                                  const ReflectionState& refl, const CMatrix& w,
                                  std::uint64_t noise_seed,
                                  const BounceOptions& opts) {
    const index_t m1 = ch.m1();
    const index_t m2 = ch.m2();
    const index_t k = w.cols();
    if (w.rows() != ch.n_bs())
        throw DimensionMismatch("bounce_simulate: W rows != BS antennas");

    Rng rng = Rng::stream(noise_seed, "bounce");
    CVector s(k);
    for (index_t i = 0; i < k; ++i) s[i] = rng.cgaussian();
    const CVector x = w * s;
    const double sd1 = std::sqrt(ch.noise_ris1);
    const double sd2 = std::sqrt(ch.noise_ris2);
    CVector n1(m1), n2(m2);
    for (index_t i = 0; i < m1; ++i) n1[i] = sd1 * rng.cgaussian();
    for (index_t i = 0; i < m2; ++i) n2[i] = sd2 * rng.cgaussian();

    // per-bounce drives: d1 = H1 x + n1, d2 = H2 x + n2
    CVector d1 = ch.h1 * x;
    d1 += n1;
    CVector d2 = ch.h2 * x;
    d2 += n2;

    // closed-form stabilized signals for the same realization; no stability
    // check here so that divergent configurations still produce a trace
    CMatrix a1 = CMatrix::identity(m1);
    a1 -= loop_matrix_1(ch, refl);
    CMatrix a2 = CMatrix::identity(m2);
    a2 -= loop_matrix_2(ch, refl);
    const CVector gy2_drive = ch.g.adjoint() * scale_by(refl.psi2, d2);
    CVector y1 = solve(a1, scale_by(refl.psi1, d1 + gy2_drive));
    const CVector gy1_drive = ch.g * scale_by(refl.psi1, d1);
    CVector y2 = solve(a2, scale_by(refl.psi2, d2 + gy1_drive));
    const double y1_norm = norm2(y1);
    const double y2_norm = norm2(y2);

    SteadyStateReport report;
    CVector yt1(m1);
    CVector yt2(m2);
    for (index_t b = 0; b < opts.max_bounces; ++b) {
        yt1 = scale_by(refl.psi1, d1 + ch.g.adjoint() * yt2);
        yt2 = scale_by(refl.psi2, d2 + ch.g * yt1);
        const double z1 = norm2(yt1 - y1);
        const double z2 = norm2(yt2 - y2);
        report.zeta_trace_1.push_back(z1);
        report.zeta_trace_2.push_back(z2);
        const bool ok1 = y1_norm == 0.0 ? z1 == 0.0
                                        : z1 / y1_norm < opts.relative_threshold;
        const bool ok2 = y2_norm == 0.0 ? z2 == 0.0
                                        : z2 / y2_norm < opts.relative_threshold;
        if (ok1 && ok2) {
            report.bounces_to_converge = b + 1;
            report.converged = true;
            return report;
        }
    }
    report.bounces_to_converge =
        static_cast<index_t>(report.zeta_trace_1.size());
    return report;
}

std::pair<double, double> ris_powers(const ChannelSet& ch,
                                     const ReflectionState& refl,
                                     const ExcitationMatrices& exc,
                                     const CMatrix& w) {
    const CMatrix psi1 = refl.psi1_matrix();
    const CMatrix psi2 = refl.psi2_matrix();
    const CMatrix gh_psi2 = matmul(ch.g.adjoint(), psi2);
    const CMatrix g_psi1 = matmul(ch.g, psi1);

    // P1 terms
    const CMatrix xi1_psi1 = matmul(exc.xi1, psi1);
    CMatrix eff1 = ch.h1 + matmul(gh_psi2, ch.h2);
    const double p1 =
        frobenius_norm_sq(matmul(matmul(xi1_psi1, eff1), w)) +
        ch.noise_ris1 * frobenius_norm_sq(xi1_psi1) +
        ch.noise_ris2 * frobenius_norm_sq(matmul(xi1_psi1, gh_psi2));

    // P2 terms
    const CMatrix xi2_psi2 = matmul(exc.xi2, psi2);
    CMatrix eff2 = ch.h2 + matmul(g_psi1, ch.h1);
    const double p2 =
        frobenius_norm_sq(matmul(matmul(xi2_psi2, eff2), w)) +
        ch.noise_ris2 * frobenius_norm_sq(xi2_psi2) +
        ch.noise_ris1 * frobenius_norm_sq(matmul(xi2_psi2, g_psi1));

    return {p1, p2};
}

}  // namespace ris
