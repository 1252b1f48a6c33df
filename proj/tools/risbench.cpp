#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ris/bench.hpp"
#include "ris/config.hpp"
#include "ris/errors.hpp"
#include "ris/excitation.hpp"
#include "ris/rng.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct CommonArgs {
    std::string config_path;
    std::string scenario;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    std::string out_dir = ".";
    bool desk = false;
    bool paper = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "configuration file path");
    cmd->add_option("--scenario", a.scenario, "scenario variant name");
    cmd->add_option("--seed", a.seed, "master seed")
        ->each([&a](const std::string&) { a.seed_set = true; });
    cmd->add_option("--trials", a.trials, "number of Monte-Carlo trials");
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_flag("--desk", a.desk, "desk-scale preset (M1=M2=8)");
    cmd->add_flag("--paper", a.paper, "paper-scale preset (M1=M2=16)");
}

ris::ScenarioConfig resolve_config(const CommonArgs& a) {
    ris::ScenarioConfig cfg = ris::default_config(a.paper && !a.desk);
    if (!a.config_path.empty()) cfg = ris::load_config(a.config_path, cfg);
    if (!a.scenario.empty()) cfg.variant = ris::variant_from_name(a.scenario);
    if (a.seed_set) cfg.seed = a.seed;
    if (a.trials > 0) cfg.trials = a.trials;
    return cfg;
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

nlohmann::json config_json(const ris::ScenarioConfig& cfg) {
    nlohmann::json j;
    j["scenario"] = ris::variant_name(cfg.variant);
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    j["a_max2_db"] = cfg.a_max2_db;
    j["noise_power_w"] = cfg.noise_power_w;
    j["weights"] = cfg.weights;
    j["geometry"] = {{"n_bs_antennas", cfg.geometry.n_bs_antennas},
                     {"m1_elements", cfg.geometry.m1_elements},
                     {"m2_elements", cfg.geometry.m2_elements},
                     {"n_users", cfg.geometry.n_users},
                     {"x1", cfg.geometry.ris1_pos[0]},
                     {"x2", cfg.geometry.ris2_pos[0]},
                     {"x_user", cfg.geometry.user_center[0]},
                     {"carrier_freq", cfg.geometry.carrier_freq}};
    j["budget"] = {{"p_total", cfg.budget.p_total},
                   {"p_ris1", cfg.budget.p_ris1},
                   {"p_ris2", cfg.budget.p_ris2},
                   {"p_dc_per_element", cfg.budget.p_dc_per_element},
                   {"p_c_per_element", cfg.budget.p_c_per_element}};
    j["pdd"] = {{"t_max", cfg.pdd.t_max},
                {"inner_max", cfg.pdd.inner_max},
                {"inner_tol", cfg.pdd.inner_tol},
                {"violation_tol", cfg.pdd.violation_tol},
                {"rho0", cfg.pdd.rho0},
                {"c", cfg.pdd.c},
                {"ellipsoid_iters", cfg.pdd.ellipsoid_iters},
                {"ellipsoid_radius", cfg.pdd.ellipsoid_radius},
                {"bisection_tol", cfg.pdd.bisection_tol}};
    return j;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream f(p);
    if (!f) throw ris::Error("cannot write " + p.string());
    f << body;
}

void write_manifest(const CommonArgs& a, const ris::ScenarioConfig& cfg,
                    const nlohmann::json& extra) {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["timestamp"] = timestamp_utc();
    j["config_path"] = a.config_path;
    j["output_dir"] = a.out_dir;
    j["config"] = config_json(cfg);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = *it;
    write_file(std::filesystem::path(a.out_dir) / "manifest.json",
               j.dump(2) + "\n");
}

int cmd_run(const CommonArgs& a) {
    const ris::ScenarioConfig cfg = resolve_config(a);
    std::filesystem::create_directories(a.out_dir);
    const std::vector<ris::RunResult> results = ris::run_scenario(cfg);
    write_file(std::filesystem::path(a.out_dir) / "run.csv",
               ris::run_csv(results));
    write_manifest(a, cfg, {{"command", "run"}});
    int n_ok = 0;
    double mean = 0.0;
    for (const auto& r : results)
        if (r.ok) {
            mean += r.wsr_exact;
            ++n_ok;
        }
    if (n_ok > 0) mean /= n_ok;
    std::printf("run scenario=%s trials=%d ok=%d mean_wsr=%.6g\n",
                ris::variant_name(cfg.variant), cfg.trials, n_ok, mean);
    if (n_ok == 0)
        throw ris::SolverFailure("run: every trial failed", 0.0);
    return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& axis,
              const std::string& values_csv, const std::string& variants_csv) {
    const ris::ScenarioConfig cfg = resolve_config(a);
    std::vector<double> values;
    {
        std::istringstream in(values_csv);
        std::string tok;
        while (std::getline(in, tok, ',')) values.push_back(std::stod(tok));
    }
    if (values.empty())
        throw ris::ConfigError("axis-values: at least one value required");
    std::vector<ris::Variant> variants;
    {
        std::istringstream in(variants_csv);
        std::string tok;
        while (std::getline(in, tok, ','))
            variants.push_back(ris::variant_from_name(tok));
    }
    std::filesystem::create_directories(a.out_dir);
    const auto rows = ris::sweep(cfg, variants, axis, values);
    write_file(std::filesystem::path(a.out_dir) / "sweep.csv",
               ris::sweep_csv(rows));
    write_manifest(a, cfg,
                   {{"command", "sweep"},
                    {"axis", axis},
                    {"axis_values", values},
                    {"variants", variants_csv}});
    std::printf("sweep axis=%s points=%zu variants=%zu\n", axis.c_str(),
                values.size(), variants.size());
    return 0;
}

int cmd_bounce(const CommonArgs& a) {
    const ris::ScenarioConfig cfg = resolve_config(a);
    std::filesystem::create_directories(a.out_dir);
    ris::SynthesisOptions syn;
    syn.noise_power_w = cfg.noise_power_w;
    std::string csv = "seed,bounce,zeta_1,zeta_2\n";
    int converged_within_20 = 0;
    const int n = std::max(cfg.trials, 1);
    for (int trial = 0; trial < n; ++trial) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(trial);
        const ris::ChannelSet ch = ris::synthesize(cfg.geometry, cfg.path_loss,
                                                   cfg.rician, seed, syn);
        const double a_max = std::sqrt(ris::db_to_linear(cfg.a_max2_db));
        const ris::PowerBudget bud = ris::resolve_budget(
            cfg.budget, ris::Variant::DAR_IE,
            cfg.geometry.m1_elements + cfg.geometry.m2_elements);
        const ris::BeamformingState st = ris::init_feasible(
            ch, bud.p_bs, bud.p_ris1, bud.p_ris2, a_max, seed, {});
        const ris::SteadyStateReport rep =
            ris::bounce_simulate(ch, st.refl, st.w, seed);
        if (rep.converged && rep.bounces_to_converge <= 20)
            ++converged_within_20;
        char buf[160];
        for (std::size_t b = 0; b < rep.zeta_trace_1.size(); ++b) {
            std::snprintf(buf, sizeof buf, "%llu,%zu,%.12g,%.12g\n",
                          static_cast<unsigned long long>(seed), b + 1,
                          rep.zeta_trace_1[b], rep.zeta_trace_2[b]);
            csv += buf;
        }
    }
    write_file(std::filesystem::path(a.out_dir) / "bounce.csv", csv);
    write_manifest(a, cfg, {{"command", "bounce"}});
    std::printf("bounce trials=%d converged_within_20=%d\n", n,
                converged_within_20);
    return 0;
}

int cmd_selftest() {
    int failed = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("selftest %-32s %s\n", name, ok ? "ok" : "FAIL");
        if (!ok) ++failed;
    };
    ris::Rng rng(42);

    {  // Hadamard-trace identity on a random instance
        const ris::index_t m = 6;
        ris::CMatrix psi_d(m, m), am(m, m), bm(m, m);
        ris::CVector psi(m);
        for (ris::index_t i = 0; i < m; ++i) {
            psi[i] = rng.cgaussian();
            for (ris::index_t j = 0; j < m; ++j) {
                am(i, j) = rng.cgaussian();
                bm(i, j) = rng.cgaussian();
            }
        }
        psi_d = ris::diag_from_h(psi);
        ris::cplx tr(0.0, 0.0);
        const ris::CMatrix prod = ris::matmul(
            ris::matmul(psi_d, am), ris::matmul(psi_d.adjoint(), bm));
        for (ris::index_t i = 0; i < m; ++i) tr += prod(i, i);
        const ris::CMatrix had = ris::hadamard(am, bm.transpose());
        const ris::cplx quad = ris::dotc(psi, had * psi);
        check("hadamard-trace-identity",
              std::abs(tr - quad) <= 1e-10 * (1.0 + std::abs(tr)));
    }
    {  // closed-form excitation vs truncated Neumann series
        const ris::ScenarioConfig cfg = ris::default_config(false);
        ris::SynthesisOptions syn;
        const ris::ChannelSet ch = ris::synthesize(cfg.geometry, cfg.path_loss,
                                                   cfg.rician, 3, syn);
        const ris::BeamformingState st =
            ris::init_feasible(ch, 1.0, 0.025, 0.025, 100.0, 3, {});
        const ris::ExcitationMatrices exc =
            ris::excitation_matrices(ch, st.refl);
        const ris::CMatrix loop = ris::loop_matrix_1(ch, st.refl);
        ris::CMatrix series = ris::CMatrix::identity(ch.m1());
        ris::CMatrix term = ris::CMatrix::identity(ch.m1());
        for (int i = 0; i < 80; ++i) {
            term = ris::matmul(term, loop);
            series += term;
        }
        check("neumann-series-oracle",
              ris::frobenius_norm(exc.xi1 - series) <=
                  1e-9 * ris::frobenius_norm(exc.xi1));
    }
    {  // channel synthesis determinism
        const ris::ScenarioConfig cfg = ris::default_config(false);
        ris::SynthesisOptions syn;
        const ris::ChannelSet c1 = ris::synthesize(cfg.geometry, cfg.path_loss,
                                                   cfg.rician, 11, syn);
        const ris::ChannelSet c2 = ris::synthesize(cfg.geometry, cfg.path_loss,
                                                   cfg.rician, 11, syn);
        check("channel-determinism",
              ris::frobenius_norm(c1.h1 - c2.h1) == 0.0 &&
                  ris::frobenius_norm(c1.g - c2.g) == 0.0);
    }
    if (failed > 0)
        throw ris::SolverFailure("selftest: " + std::to_string(failed) +
                                     " checks failed",
                                 static_cast<double>(failed));
    std::printf("selftest all checks passed\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"active-RIS beamforming benchmark tool"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, bounce_args;
    std::string axis, axis_values;
    std::string variants = "DAR_IE,DAR_IDEAL,DAR_NON_IE";

    CLI::App* run = app.add_subcommand("run", "single scenario");
    add_common(run, run_args);
    CLI::App* sw = app.add_subcommand("sweep", "figure-family sweep");
    add_common(sw, sweep_args);
    sw->add_option("--axis", axis, "sweep axis name")->required();
    sw->add_option("--axis-values", axis_values, "comma-separated axis values")
        ->required();
    sw->add_option("--variants", variants, "comma-separated variant list");
    CLI::App* bounce = app.add_subcommand("bounce", "steady-state traces");
    add_common(bounce, bounce_args);
    CLI::App* selftest = app.add_subcommand("selftest", "built-in checks");
    (void)selftest;

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (sw->parsed()) return cmd_sweep(sweep_args, axis, axis_values,
                                           variants);
        if (bounce->parsed()) return cmd_bounce(bounce_args);
        return cmd_selftest();
    } catch (const ris::ConfigError& e) {
        std::fprintf(stderr, "error=ConfigError detail=%s\n", e.what());
        return 2;
    } catch (const ris::Error& e) {
        std::fprintf(stderr, "error=OptimizerFailure detail=%s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error=Internal detail=%s\n", e.what());
        return 3;
    }
}
