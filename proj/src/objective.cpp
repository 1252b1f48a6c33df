#include "ris/objective.hpp"

#include <cmath>

namespace ris {

namespace {

CVector column(const CMatrix& m, index_t j) {
    CVector out(m.rows());
    for (index_t i = 0; i < m.rows(); ++i) out[i] = m(i, j);
    return out;
}

// Shared assembly: a1 = A1 (X Psi1 or Xi1 Psi1), a2 likewise for RIS 2.
EquivalentChannels build_equivalent(const ChannelSet& ch,
                                    const ReflectionState& refl,
                                    const CMatrix& a1, const CMatrix& a2) {
    const CMatrix psi1 = refl.psi1_matrix();
    const CMatrix psi2 = refl.psi2_matrix();
    const CMatrix r1 = ch.h1 + matmul(matmul(ch.g.adjoint(), psi2), ch.h2);
    const CMatrix r2 = ch.h2 + matmul(matmul(ch.g, psi1), ch.h1);
    const CMatrix a1h = a1.adjoint();
    const CMatrix a2h = a2.adjoint();
    const CMatrix r1h = r1.adjoint();
    const CMatrix r2h = r2.adjoint();
    // for gbar cross terms
    const CMatrix c12 = matmul(matmul(psi1.adjoint(), ch.g.adjoint()), a2h);
    const CMatrix c21 = matmul(matmul(psi2.adjoint(), ch.g), a1h);

    EquivalentChannels eq;
    for (index_t k = 0; k < ch.n_users(); ++k) {
        const CVector t1 = a1h * ch.h1k[static_cast<std::size_t>(k)];
        const CVector t2 = a2h * ch.h2k[static_cast<std::size_t>(k)];
        eq.hbar_k.push_back(r1h * t1 + r2h * t2);
        eq.gbar1_k.push_back(t1 + c12 * ch.h2k[static_cast<std::size_t>(k)]);
        eq.gbar2_k.push_back(t2 + c21 * ch.h1k[static_cast<std::size_t>(k)]);
    }
    return eq;
}

}  // namespace

EquivalentChannels equivalent_channels_exact(const ChannelSet& ch,
                                             const ReflectionState& refl,
                                             const ExcitationMatrices& exc) {
    const CMatrix a1 = matmul(exc.xi1, refl.psi1_matrix());
    const CMatrix a2 = matmul(exc.xi2, refl.psi2_matrix());
    return build_equivalent(ch, refl, a1, a2);
}

EquivalentChannels equivalent_channels_aux(const ChannelSet& ch,
                                           const ReflectionState& refl,
                                           const AuxiliaryState& aux) {
    const CMatrix a1 = matmul(aux.x_mat, refl.psi1_matrix());
    const CMatrix a2 = matmul(aux.y_mat, refl.psi2_matrix());
    return build_equivalent(ch, refl, a1, a2);
}

std::vector<double> effective_noise(const EquivalentChannels& eq,
                                    const ChannelSet& ch) {
    std::vector<double> out;
    for (std::size_t k = 0; k < eq.hbar_k.size(); ++k)
        out.push_back(ch.noise_ris1 * norm2_sq(eq.gbar1_k[k]) +
                      ch.noise_ris2 * norm2_sq(eq.gbar2_k[k]) +
                      ch.noise_users[k]);
    return out;
}

SinrResult sinr_and_wsr(const EquivalentChannels& eq, const CMatrix& w,
                        const ChannelSet& ch,
                        const std::vector<double>& weights) {
    const index_t n_users = static_cast<index_t>(eq.hbar_k.size());
    const std::vector<double> sigma = effective_noise(eq, ch);
    SinrResult res;
    for (index_t k = 0; k < n_users; ++k) {
        double signal = 0.0, interference = 0.0;
        for (index_t i = 0; i < w.cols(); ++i) {
            const double p = std::norm(
                dotc(eq.hbar_k[static_cast<std::size_t>(k)], column(w, i)));
            if (i == k)
                signal = p;
            else
                interference += p;
        }
        const double s =
            signal / (interference + sigma[static_cast<std::size_t>(k)]);
        res.sinr.push_back(s);
        res.wsr += weights[static_cast<std::size_t>(k)] * std::log2(1.0 + s);
    }
    return res;
}

double fr_objective(const AuxiliaryState& aux, const EquivalentChannels& eq,
                    const CMatrix& w, const std::vector<double>& weights,
                    const ChannelSet& ch) {
    const std::size_t n_users = eq.hbar_k.size();
    const std::vector<double> sigma = effective_noise(eq, ch);
    double value = 0.0;
    for (std::size_t k = 0; k < n_users; ++k) {
        const double alpha = weights[k];
        const double gamma = aux.gamma[k];
        const cplx xi = aux.xi[k];
        value += alpha * std::log2(1.0 + gamma) - alpha * gamma / M_LN2;

        double power_sum = 0.0;
        cplx own(0.0, 0.0);
        for (index_t i = 0; i < w.cols(); ++i) {
            const cplx hw = dotc(eq.hbar_k[k], column(w, i));
            power_sum += std::norm(hw);
            if (static_cast<std::size_t>(i) == k) own = hw;
        }
        value += 2.0 / M_LN2 * std::sqrt(alpha * (1.0 + gamma)) *
                 std::real(std::conj(xi) * own);
        value -= std::norm(xi) / M_LN2 * (power_sum + sigma[k]);
    }
    return value;
}

double penalty_h(const ReflectionState& refl, const AuxiliaryState& aux,
                 const DualState& dual, const ChannelSet& ch,
                 bool include_matrix) {
    const double rho = dual.rho;
    double matrix_part = 0.0;
    if (include_matrix) {
        CMatrix res1 = matmul(
            CMatrix::identity(ch.m1()) - loop_matrix_1(ch, refl), aux.x_mat);
        res1 -= CMatrix::identity(ch.m1());
        res1 += cplx(rho, 0.0) * dual.gamma1_dual;
        CMatrix res2 = matmul(
            CMatrix::identity(ch.m2()) - loop_matrix_2(ch, refl), aux.y_mat);
        res2 -= CMatrix::identity(ch.m2());
        res2 += cplx(rho, 0.0) * dual.gamma2_dual;
        matrix_part = frobenius_norm_sq(res1) + frobenius_norm_sq(res2);
    }
    const CVector d1 = refl.psi1.conjugate() - aux.phi1 +
                       cplx(rho, 0.0) * dual.eta1;
    const CVector d2 = refl.psi2.conjugate() - aux.phi2 +
                       cplx(rho, 0.0) * dual.eta2;
    return (matrix_part + norm2_sq(d1) + norm2_sq(d2)) / (2.0 * rho);
}

double violation(const ReflectionState& refl, const AuxiliaryState& aux,
                 const ChannelSet& ch, bool include_matrix) {
    const CVector d1 = refl.psi1.conjugate() - aux.phi1;
    const CVector d2 = refl.psi2.conjugate() - aux.phi2;
    double worst = std::max(max_abs(d1), max_abs(d2));
    if (include_matrix) {
        CMatrix res1 = matmul(
            CMatrix::identity(ch.m1()) - loop_matrix_1(ch, refl), aux.x_mat);
        res1 -= CMatrix::identity(ch.m1());
        CMatrix res2 = matmul(
            CMatrix::identity(ch.m2()) - loop_matrix_2(ch, refl), aux.y_mat);
        res2 -= CMatrix::identity(ch.m2());
        worst = std::max(worst, std::max(max_abs(res1), max_abs(res2)));
    }
    return worst;
}

}  // namespace ris
