#include "ris/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "ris/errors.hpp"
#include "ris/excitation.hpp"
#include "ris/objective.hpp"

namespace ris {

namespace {

constexpr double kStabilityMargin = 1e-3;

PddStructure structure_for(Variant v) {
    PddStructure s;
    switch (v) {
        case Variant::DAR_IE:
            break;
        case Variant::DAR_IDEAL:
        case Variant::DAR_NON_IE:
            s.optimize_xy = false;
            break;
        case Variant::SAR_NEAR_BS:
            s.optimize_xy = false;
            s.optimize_psi2 = false;
            s.ris2_power_constraint = false;
            break;
        case Variant::SAR_NEAR_USERS:
            s.optimize_xy = false;
            s.optimize_psi1 = false;
            s.ris1_power_constraint = false;
            break;
        case Variant::DPR:
            s.optimize_xy = false;
            s.ris1_power_constraint = false;
            s.ris2_power_constraint = false;
            break;
    }
    return s;
}

void zero_matrix(CMatrix& m) {
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = 0; j < m.cols(); ++j) m(i, j) = cplx(0.0, 0.0);
}

void zero_vector(CVector& v) {
    for (index_t i = 0; i < v.len(); ++i) v[i] = cplx(0.0, 0.0);
}

std::vector<double> resolve_weights(const ScenarioConfig& cfg, index_t k) {
    if (!cfg.weights.empty()) {
        if (cfg.weights.size() != static_cast<std::size_t>(k))
            throw ConfigError("weights: expected one entry per user");
        return cfg.weights;
    }
    return std::vector<double>(static_cast<std::size_t>(k), 1.0);
}

RunResult run_trial(const ScenarioConfig& cfg, int trial) {
    const auto t_start = std::chrono::steady_clock::now();
    const std::uint64_t trial_seed =
        cfg.seed + static_cast<std::uint64_t>(trial);
    RunResult out;
    out.variant = cfg.variant;
    out.seed = trial_seed;
    out.trial = trial;

    // variant geometry: SAR puts all M elements on the surviving RIS (the
    // other site keeps a one-element stub whose channels are zeroed)
    Geometry geom = cfg.geometry;
    const index_t m_total = geom.m1_elements + geom.m2_elements;
    if (cfg.variant == Variant::SAR_NEAR_BS) {
        geom.m1_elements = m_total;
        geom.m2_elements = 1;
    } else if (cfg.variant == Variant::SAR_NEAR_USERS) {
        geom.m1_elements = 1;
        geom.m2_elements = m_total;
    }

    SynthesisOptions syn;
    syn.noise_power_w = cfg.noise_power_w;
    ChannelSet ch = synthesize(geom, cfg.path_loss, cfg.rician, trial_seed, syn);

    if (cfg.variant == Variant::SAR_NEAR_BS) {
        zero_matrix(ch.h2);
        zero_matrix(ch.g);
        for (auto& h : ch.h2k) zero_vector(h);
        ch.noise_ris2 = 0.0;
    } else if (cfg.variant == Variant::SAR_NEAR_USERS) {
        zero_matrix(ch.h1);
        zero_matrix(ch.g);
        for (auto& h : ch.h1k) zero_vector(h);
        ch.noise_ris1 = 0.0;
    } else if (cfg.variant == Variant::DPR) {
        ch.noise_ris1 = 0.0;
        ch.noise_ris2 = 0.0;
    }

    const PowerBudget bud = resolve_budget(cfg.budget, cfg.variant, m_total);
    double a_max = std::sqrt(db_to_linear(cfg.a_max2_db));
    double p1_max = bud.p_ris1;
    double p2_max = bud.p_ris2;
    if (cfg.variant == Variant::DPR) {
        a_max = 1.0;
        p1_max = 0.0;
        p2_max = 0.0;
    } else if (cfg.variant == Variant::SAR_NEAR_BS) {
        p1_max = bud.p_ris1 + bud.p_ris2;  // P_A^max
        p2_max = 0.0;
    } else if (cfg.variant == Variant::SAR_NEAR_USERS) {
        p2_max = bud.p_ris1 + bud.p_ris2;
        p1_max = 0.0;
    }

    const PddStructure structure = structure_for(cfg.variant);
    const std::vector<double> weights = resolve_weights(cfg, ch.n_users());
    BeamformingState init = init_feasible(ch, bud.p_bs, p1_max, p2_max, a_max,
                                          trial_seed, structure);
    PddConfig pdd_cfg = cfg.pdd;
    pdd_cfg.structure = structure;
    pdd_cfg.seed = trial_seed;
    PddResult res = pdd_solve(ch, init, weights, pdd_cfg);

    out.outer_iters = res.outer_iters;
    out.final_violation = res.final_violation;
    out.tau = 1.0;

    ReflectionState refl = res.state.refl;
    const CMatrix& w = res.state.w;
    SinrResult sr;
    if (cfg.variant == Variant::DAR_IDEAL) {
        // report the idealized (uncoupled) rate the design believes in
        sr = sinr_and_wsr(equivalent_channels_aux(ch, refl, res.aux), w, ch,
                          weights);
        out.wsr_exact = sr.wsr;
    } else {
        if (cfg.variant == Variant::DAR_NON_IE) {
            out.tau = find_tau(ch, refl, w, p1_max, p2_max);
            refl.psi1 *= cplx(out.tau, 0.0);
            refl.psi2 *= cplx(out.tau, 0.0);
        }
        const ExcitationMatrices exc = excitation_matrices(ch, refl);
        sr = sinr_and_wsr(equivalent_channels_exact(ch, refl, exc), w, ch,
                          weights);
        out.wsr_exact = sr.wsr;
        const auto powers = ris_powers(ch, refl, exc, w);
        out.ris_power_1 = powers.first;
        out.ris_power_2 = powers.second;
    }
    for (std::size_t k = 0; k < sr.sinr.size(); ++k)
        out.per_user_rates.push_back(weights[k] * std::log2(1.0 + sr.sinr[k]));
    out.ok = std::isfinite(out.wsr_exact);
    if (!out.ok) out.error = "UnstableLoop";
    out.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
    return out;
}

}  // namespace

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::DAR_IE: return "DAR_IE";
        case Variant::DAR_IDEAL: return "DAR_IDEAL";
        case Variant::DAR_NON_IE: return "DAR_NON_IE";
        case Variant::SAR_NEAR_BS: return "SAR_NEAR_BS";
        case Variant::SAR_NEAR_USERS: return "SAR_NEAR_USERS";
        case Variant::DPR: return "DPR";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    for (Variant v :
         {Variant::DAR_IE, Variant::DAR_IDEAL, Variant::DAR_NON_IE,
          Variant::SAR_NEAR_BS, Variant::SAR_NEAR_USERS, Variant::DPR})
        if (name == variant_name(v)) return v;
    throw ConfigError("scenario: unknown variant '" + name + "'");
}

PowerBudget resolve_budget(PowerBudget b, Variant v, index_t m_total) {
    const double m = static_cast<double>(m_total);
    if (v == Variant::DPR) {
        b.p_bs = b.p_total - m * b.p_c_per_element;
        b.p_ris1 = 0.0;  // passive elements draw no amplifier/DC power
        b.p_ris2 = 0.0;
    } else {
        b.p_bs = b.p_total - b.p_ris1 - b.p_ris2 -
                 m * (b.p_c_per_element + b.p_dc_per_element);
    }
    if (b.p_bs <= 0.0)
        throw InfeasibleConfiguration(
            "budget: no BS power left after RIS/element bookkeeping");
    return b;
}

std::vector<RunResult> run_scenario(const ScenarioConfig& cfg) {
    std::vector<RunResult> results;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        try {
            results.push_back(run_trial(cfg, trial));
        } catch (const Error& e) {
            RunResult bad;
            bad.variant = cfg.variant;
            bad.seed = cfg.seed + static_cast<std::uint64_t>(trial);
            bad.trial = trial;
            bad.ok = false;
            if (dynamic_cast<const UnstableLoop*>(&e))
                bad.error = "UnstableLoop";
            else if (dynamic_cast<const InfeasibleConfiguration*>(&e))
                bad.error = "InfeasibleConfiguration";
            else if (dynamic_cast<const InfeasibleSubproblem*>(&e))
                bad.error = "InfeasibleSubproblem";
            else if (dynamic_cast<const SolverFailure*>(&e))
                bad.error = "SolverFailure";
            else if (dynamic_cast<const SingularMatrix*>(&e))
                bad.error = "SingularMatrix";
            else
                bad.error = "Error";
            results.push_back(bad);
        }
    }
    return results;
}

double find_tau(const ChannelSet& ch, const ReflectionState& refl,
                const CMatrix& w, double p1_max, double p2_max) {
    if (p1_max < 0.0 || p2_max < 0.0)
        throw InfeasibleConfiguration("find_tau: negative power budget");
    auto feasible = [&](double tau) {
        ReflectionState rt = refl;
        rt.psi1 *= cplx(tau, 0.0);
        rt.psi2 *= cplx(tau, 0.0);
        const double rad = std::max(spectral_radius(loop_matrix_1(ch, rt)),
                                    spectral_radius(loop_matrix_2(ch, rt)));
        if (rad >= 1.0 - kStabilityMargin) return false;
        const ExcitationMatrices exc = excitation_matrices(ch, rt);
        const auto p = ris_powers(ch, rt, exc, w);
        const double slack1 = 1e-9 * std::max(p1_max, 1.0);
        const double slack2 = 1e-9 * std::max(p2_max, 1.0);
        return p.first <= p1_max + slack1 && p.second <= p2_max + slack2;
    };
    if (feasible(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base,
                            const std::vector<Variant>& variants,
                            const std::string& axis,
                            const std::vector<double>& values) {
    std::vector<SweepRow> rows;
    const index_t m_total_base =
        base.geometry.m1_elements + base.geometry.m2_elements;
    const double p_ris_sum = base.budget.p_ris1 + base.budget.p_ris2;
    for (double v : values) {
        ScenarioConfig cfg = base;
        if (axis == "a_max2_db") {
            cfg.a_max2_db = v;
        } else if (axis == "m_total") {
            const index_t half = static_cast<index_t>(std::lround(v)) / 2;
            cfg.geometry.m1_elements = half;
            cfg.geometry.m2_elements = half;
        } else if (axis == "d_r") {
            cfg.geometry.ris1_pos[0] = 30.0 - v / 2.0;
            cfg.geometry.ris2_pos[0] = 30.0 + v / 2.0;
        } else if (axis == "m1_split") {
            cfg.geometry.m1_elements = static_cast<index_t>(std::lround(v));
            cfg.geometry.m2_elements =
                m_total_base - cfg.geometry.m1_elements;
        } else if (axis == "varpi") {
            cfg.budget.p_ris1 = v * p_ris_sum;
            cfg.budget.p_ris2 = (1.0 - v) * p_ris_sum;
        } else {
            throw ConfigError("sweep: unknown axis '" + axis + "'");
        }
        for (Variant var : variants) {
            cfg.variant = var;
            const std::vector<RunResult> results = run_scenario(cfg);
            SweepRow row;
            row.axis_name = axis;
            row.axis_value = v;
            row.variant = var;
            double sum = 0.0, sum_sq = 0.0;
            int n_ok = 0;
            for (const auto& r : results) {
                row.n_trials += 1;
                if (!r.ok) {
                    row.n_failed += 1;
                    continue;
                }
                sum += r.wsr_exact;
                sum_sq += r.wsr_exact * r.wsr_exact;
                n_ok += 1;
            }
            if (n_ok > 0) {
                row.mean_wsr = sum / n_ok;
                const double var_est =
                    std::max(0.0, sum_sq / n_ok - row.mean_wsr * row.mean_wsr);
                row.std_wsr = std::sqrt(var_est);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::string run_csv(const std::vector<RunResult>& results) {
    std::string out =
        "variant,seed,trial,ok,error,wsr_exact,outer_iters,final_violation,"
        "ris_power_1,ris_power_2,tau,wall_time\n";
    char buf[384];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf,
                      "%s,%llu,%d,%d,%s,%.12g,%d,%.12g,%.12g,%.12g,%.12g,"
                      "%.6g\n",
                      variant_name(r.variant),
                      static_cast<unsigned long long>(r.seed), r.trial,
                      r.ok ? 1 : 0, r.error.c_str(), r.wsr_exact,
                      r.outer_iters, r.final_violation, r.ris_power_1,
                      r.ris_power_2, r.tau, r.wall_time);
        out += buf;
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "axis_name,axis_value,variant,mean_wsr,std_wsr,n_trials,n_failed\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.12g,%s,%.12g,%.12g,%d,%d\n",
                      r.axis_name.c_str(), r.axis_value,
                      variant_name(r.variant), r.mean_wsr, r.std_wsr,
                      r.n_trials, r.n_failed);
        out += buf;
    }
    return out;
}

}  // namespace ris
