#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ris/channel.hpp"
#include "ris/pdd.hpp"

namespace ris {

enum class Variant {
    DAR_IE,       // double active RIS, full inter-excitation design
    DAR_IDEAL,    // inter-excitation ignored (X = Y = I throughout)
    DAR_NON_IE,   // ideal design, then tau-scaled to true-coupling feasibility
    SAR_NEAR_BS,  // single active RIS at the RIS-1 site, all M elements
    SAR_NEAR_USERS,
    DPR,          // double passive RIS
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);  // throws ConfigError

struct PowerBudget {
    double p_total = 0.0;  // watts
    double p_bs = 0.0;     // derived so the fair-budget identity holds
    double p_ris1 = 0.0;
    double p_ris2 = 0.0;
    double p_dc_per_element = 0.0;  // P_DC
    double p_c_per_element = 0.0;   // P_C
};

// Fills p_bs from p_total and the per-variant bookkeeping:
//   DAR/SAR: p_total = p_bs + p_ris1 + p_ris2 + M (P_C + P_DC)
//   DPR:     p_total = p_bs + M P_C
PowerBudget resolve_budget(PowerBudget b, Variant v, index_t m_total);

struct ScenarioConfig {
    Variant variant = Variant::DAR_IE;
    Geometry geometry;
    PathLossParams path_loss;
    RicianParams rician;
    PowerBudget budget;          // p_bs left 0 -> resolved per variant
    double a_max2_db = 40.0;
    std::vector<double> weights;  // empty -> all ones
    int trials = 20;
    std::uint64_t seed = 1;
    double noise_power_w = 1e-11;  // -80 dBm
    PddConfig pdd;
};

struct RunResult {
    Variant variant = Variant::DAR_IE;
    std::uint64_t seed = 0;
    int trial = 0;
    bool ok = false;
    std::string error;  // error class name when !ok
    double wsr_exact = 0.0;
    std::vector<double> per_user_rates;
    int outer_iters = 0;
    double final_violation = 0.0;
    double ris_power_1 = 0.0;
    double ris_power_2 = 0.0;
    double tau = 1.0;  // DAR_NON_IE scaling factor; 1 elsewhere
    double wall_time = 0.0;
};

// Per-trial: synthesize channels (paired streams across variants), apply the
// variant's structural rules, optimize, and evaluate WSR (exact coupling,
// except DAR_IDEAL which reports the idealized X = Y = I rate).
std::vector<RunResult> run_scenario(const ScenarioConfig& cfg);

// Largest tau in (0, 1] such that tau*Psi1, tau*Psi2 keep the loop stable and
// both true-coupling RIS powers within budget; bisection to 1e-6.
double find_tau(const ChannelSet& ch, const ReflectionState& refl,
                const CMatrix& w, double p1_max, double p2_max);

struct SweepRow {
    std::string axis_name;
    double axis_value = 0.0;
    Variant variant = Variant::DAR_IE;
    double mean_wsr = 0.0;
    double std_wsr = 0.0;
    int n_trials = 0;
    int n_failed = 0;
};

// Axes: a_max2_db, m_total (split evenly), d_r (RIS sites at 30 -/+ d_r/2),
// m1_split (M fixed), varpi (P1/(P1+P2) with the sum fixed).
std::vector<SweepRow> sweep(const ScenarioConfig& base,
                            const std::vector<Variant>& variants,
                            const std::string& axis,
                            const std::vector<double>& values);

std::string run_csv(const std::vector<RunResult>& results);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace ris
