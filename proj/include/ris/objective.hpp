#pragma once

#include <vector>

#include "ris/channel.hpp"
#include "ris/excitation.hpp"
#include "ris/numerics.hpp"

namespace ris {

struct BeamformingState {
    CMatrix w;  // N x K, columns w_k
    ReflectionState refl;
    double p_bs_max = 0.0;
    double p1_max = 0.0;
    double p2_max = 0.0;
};

// Auxiliary block of the AL problem. phi1/phi2 use the conjugated diagonal
// convention phi_l = diag(Phi_l^H), matching psi_l = diag(Psi_l^H) in the
// penalty; x_mat/y_mat relax the two inter-excitation matrices.
struct AuxiliaryState {
    std::vector<double> gamma;  // K, >= 0
    std::vector<cplx> xi;       // K
    CVector phi1;               // M1
    CVector phi2;               // M2
    CMatrix x_mat;              // M1 x M1
    CMatrix y_mat;              // M2 x M2
};

struct DualState {
    CMatrix gamma1_dual;  // M1 x M1
    CMatrix gamma2_dual;  // M2 x M2
    CVector eta1;         // M1
    CVector eta2;         // M2
    double rho = 1.0;
    double c = 0.8;
};

struct EquivalentChannels {
    std::vector<CVector> hbar_k;   // K vectors, length N
    std::vector<CVector> gbar1_k;  // K vectors, length M1
    std::vector<CVector> gbar2_k;  // K vectors, length M2
};

// Equivalent channels built with the true inter-excitation matrices.
EquivalentChannels equivalent_channels_exact(const ChannelSet& ch,
                                             const ReflectionState& refl,
                                             const ExcitationMatrices& exc);

// Same construction with the relaxed X, Y substituted for Xi_1, Xi_2.
EquivalentChannels equivalent_channels_aux(const ChannelSet& ch,
                                           const ReflectionState& refl,
                                           const AuxiliaryState& aux);

struct SinrResult {
    std::vector<double> sinr;  // per user
    double wsr = 0.0;          // sum alpha_k log2(1 + sinr_k)
};

SinrResult sinr_and_wsr(const EquivalentChannels& eq, const CMatrix& w,
                        const ChannelSet& ch,
                        const std::vector<double>& weights);

// sigma_tilde_k^2 = sigma_1^2 ||g1k||^2 + sigma_2^2 ||g2k||^2 + sigma_k^2
std::vector<double> effective_noise(const EquivalentChannels& eq,
                                    const ChannelSet& ch);

// FP surrogate value f_r for the given auxiliaries and tilde channels.
double fr_objective(const AuxiliaryState& aux, const EquivalentChannels& eq,
                    const CMatrix& w, const std::vector<double>& weights,
                    const ChannelSet& ch);

// Four-term AL penalty; the AL objective is f_r - h. Variants that pin
// X = Y = I drop the two matrix equalities (include_matrix = false).
double penalty_h(const ReflectionState& refl, const AuxiliaryState& aux,
                 const DualState& dual, const ChannelSet& ch,
                 bool include_matrix = true);

// Constraint-violation indicator: max elementwise infinity norm over the
// four relaxed equalities (or the two vector ones when the matrix
// equalities are dropped).
double violation(const ReflectionState& refl, const AuxiliaryState& aux,
                 const ChannelSet& ch, bool include_matrix = true);

}  // namespace ris
