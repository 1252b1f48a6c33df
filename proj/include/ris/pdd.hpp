#pragma once

#include <cstdint>
#include <vector>

#include "ris/channel.hpp"
#include "ris/excitation.hpp"
#include "ris/numerics.hpp"
#include "ris/objective.hpp"
#include "ris/qcqp.hpp"

namespace ris {

// Structural switches used by the scenario variants: pinned blocks are left
// at their initial values and their constraints dropped.
struct PddStructure {
    bool optimize_psi1 = true;
    bool optimize_psi2 = true;
    bool optimize_xy = true;         // false pins X = Y = I
    bool ris1_power_constraint = true;
    bool ris2_power_constraint = true;
};

struct PddConfig {
    int t_max = 100;              // outer iteration cap
    int inner_max = 100;          // inner AO sweep cap per outer iteration
    double inner_tol = 1e-4;      // delta, relative AL change
    double violation_tol = 1e-8;  // epsilon
    double rho0 = 1.0;
    double c = 0.8;
    int ellipsoid_iters = 300;    // tau_max
    double ellipsoid_radius = 10.0;
    double bisection_tol = 1e-8;
    std::uint64_t seed = 0;
    PddStructure structure;
};

struct SubproblemW {
    CMatrix a_w;  // N x N
    CMatrix b_w;  // N x K
    CMatrix c_w;  // N x N
    CMatrix d_w;  // N x N
    double p_bs = 0.0;
    double p1_hat = 0.0;
    double p2_hat = 0.0;
    double p1_budget = 0.0;  // full budgets, used as feasibility-slack scales
    double p2_budget = 0.0;
    bool con_ris1 = true;
    bool con_ris2 = true;
    CMatrix w0;  // current iterate, known feasible
};

struct SubproblemPsi {
    CMatrix a_psi;  // M x M
    CVector b_psi;  // M
    CMatrix c_psi;  // self-RIS power quadratic
    CMatrix d_psi;  // other-RIS power quadratic
    CVector d_vec;  // other-RIS power linear part
    double p1_cap = 0.0;  // self cap
    double p2_cap = 0.0;  // other cap (already offset by constants; may be
                          // negative when the dropped cross term is)
    double p2_budget = 0.0;  // full other-RIS budget (slack scale)
    bool con_self = true;
    bool con_other = true;
    CVector psi0;  // current iterate (psi convention), known feasible
};

struct SubproblemX {
    CMatrix m_gram;    // constraint Gram matrix (paper's M_1, renamed)
    CMatrix l1;
    CMatrix l2;
    CMatrix l3;
    CMatrix k_factor;  // Hermitian PSD square root of m_gram
    double p1_cap = 0.0;
    bool constrained = true;
};

SubproblemW build_w_subproblem(const ChannelSet& ch,
                               const ReflectionState& refl,
                               const AuxiliaryState& aux,
                               const std::vector<double>& weights,
                               const BeamformingState& budgets,
                               const PddStructure& structure);
CMatrix solve_w_ellipsoid(const SubproblemW& sub, const PddConfig& cfg);

// psi vectors here use the conjugated-diagonal convention; callers convert
// back to reflection coefficients by conjugating.
SubproblemPsi build_psi_subproblem(const ChannelSet& ch,
                                   const ReflectionState& refl,
                                   const AuxiliaryState& aux,
                                   const DualState& dual, const CMatrix& w,
                                   const std::vector<double>& weights,
                                   const BeamformingState& budgets, int which,
                                   bool matrix_penalty = true);
CVector solve_psi_ellipsoid(const SubproblemPsi& sub, const PddConfig& cfg);

std::vector<cplx> update_xi(const EquivalentChannels& eq_aux, const CMatrix& w,
                            const std::vector<double>& gamma,
                            const std::vector<double>& weights,
                            const ChannelSet& ch);
std::vector<double> update_gamma(const EquivalentChannels& eq_aux,
                                 const CMatrix& w,
                                 const std::vector<double>& weights,
                                 const ChannelSet& ch);
CVector update_phi(const ReflectionState& refl, const DualState& dual,
                   int which, double a_max);

SubproblemX build_x_subproblem(const ChannelSet& ch,
                               const ReflectionState& refl,
                               const AuxiliaryState& aux, const DualState& dual,
                               const CMatrix& w,
                               const std::vector<double>& weights,
                               const BeamformingState& budgets, int which);
CMatrix solve_x_bisection(const SubproblemX& sub, const PddConfig& cfg);

struct PddDiagRow {
    int outer_iter = 0;
    int inner_iter = 0;
    double wsr_exact = 0.0;  // NaN on inner rows (recomputed per outer)
    double al_value = 0.0;
    double violation = 0.0;
    double rho = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double spectral_radius_1 = 0.0;
};

std::string diagnostics_csv(const std::vector<PddDiagRow>& rows);

struct PddResult {
    BeamformingState state;
    AuxiliaryState aux;
    DualState dual;
    std::vector<PddDiagRow> rows;
    int outer_iters = 0;
    double final_violation = 0.0;
    double wsr_exact = 0.0;  // true-Xi WSR at the projected final state
    bool converged = false;
};

PddResult pdd_solve(const ChannelSet& ch, const BeamformingState& init,
                    const std::vector<double>& weights, const PddConfig& cfg);

// Random feasible starting point: Gaussian W at 90% BS power (rescaled if a
// RIS budget binds), unit-amplitude random-phase reflections.
BeamformingState init_feasible(const ChannelSet& ch, double p_bs_max,
                               double p1_max, double p2_max, double a_max,
                               std::uint64_t seed,
                               const PddStructure& structure = {});

}  // namespace ris
