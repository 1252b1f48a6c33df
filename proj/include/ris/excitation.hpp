#pragma once

#include <cstdint>
#include <vector>

#include "ris/channel.hpp"
#include "ris/numerics.hpp"

namespace ris {

struct ReflectionState {
    CVector psi1;  // diagonal of Psi1, entries a e^{j theta}
    CVector psi2;
    double a_max = 100.0;  // amplitude bound (40 dB power gain -> 100)

    CMatrix psi1_matrix() const { return diag_from(psi1); }
    CMatrix psi2_matrix() const { return diag_from(psi2); }
};

// true when 1 <= |psi| <= a_max (within tol) for every element of both RISs
bool amplitudes_feasible(const ReflectionState& refl, double tol = 1e-9);

struct ExcitationMatrices {
    CMatrix xi1;  // (I - Psi1 G^H Psi2 G)^{-1}
    CMatrix xi2;  // (I - Psi2 G Psi1 G^H)^{-1}
    double spectral_radius_1 = 0.0;
    double spectral_radius_2 = 0.0;
};

struct ExcitationOptions {
    double stability_margin = 1e-3;  // require radius < 1 - margin
};

// Loop matrices whose spectral radii govern stability of the feedback.
CMatrix loop_matrix_1(const ChannelSet& ch, const ReflectionState& refl);
CMatrix loop_matrix_2(const ChannelSet& ch, const ReflectionState& refl);

// Throws UnstableLoop when the feedback loop is at or past the stability
// margin; otherwise returns exact inverses with recorded spectral radii.
ExcitationMatrices excitation_matrices(const ChannelSet& ch,
                                       const ReflectionState& refl,
                                       const ExcitationOptions& opts = {});

struct SteadyStateReport {
    std::vector<double> zeta_trace_1;  // ||ytilde_1 - y_1|| per bounce
    std::vector<double> zeta_trace_2;
    index_t bounces_to_converge = 0;  // trace length when threshold never met
    bool converged = false;
};

struct BounceOptions {
    index_t max_bounces = 50;
    double relative_threshold = 1e-6;  // on zeta_l / ||y_l||
};

// Iterates the bouncing recursion (ytilde_1 then ytilde_2, in that order)
// for one realization of x = W s and the RIS noises, comparing against the
// closed-form stabilized signals. Divergence shows up in the traces; it is
// not an error.
SteadyStateReport bounce_simulate(const ChannelSet& ch,
                                  const ReflectionState& refl, const CMatrix& w,
                                  std::uint64_t noise_seed,
                                  const BounceOptions& opts = {});

// Transmit powers of the two active RISs (signal, own-noise, and relayed
// cross-noise terms), in watts.
std::pair<double, double> ris_powers(const ChannelSet& ch,
                                     const ReflectionState& refl,
                                     const ExcitationMatrices& exc,
                                     const CMatrix& w);

}  // namespace ris
