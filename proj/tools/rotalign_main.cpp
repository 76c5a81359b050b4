// rotalign: simulate and sweep laser-driven rigid-rotor alignment.
//
// Subcommands: simulate (single run), sweep (parameter grid),
// compare-oracle (split-operator vs reference integrator), fig1..fig4
// (canned sweeps).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rotalign/config.hpp"
#include "rotalign/io.hpp"
#include "rotalign/oracle.hpp"
#include "rotalign/sweep.hpp"
#include "rotalign/version.hpp"

namespace {

using rotalign::json;

struct FlagSet {
    std::string config_file;
    std::string out_dir = "out";
    int workers = 0;  // 0 -> hardware concurrency

    std::vector<double> delta_omega, tau_fwhm, amplitude_ratio, delay_ratio;
    std::optional<std::string> color_mode, interaction;
    std::optional<double> delta_omega_mu, delta_omega_perp, carrier_omega;
    std::optional<double> dt, t_start, t_end, refine_tol, post_pulse_cutoff;
    std::optional<int> j_max, m, initial_j, n_nodes, record_every, refine_max_halvings;
    std::optional<bool> record_populations, refine_dt, check_basis;

    std::optional<double> phys_b_invcm, phys_dipole_debye, phys_alpha_par, phys_alpha_perp;
    std::optional<double> phys_intensity_w_cm2, phys_tau_fwhm_fs;
};

void add_common_flags(CLI::App* cmd, FlagSet& f, bool with_config) {
    if (with_config) {
        cmd->add_option("--config", f.config_file, "JSON configuration file")
            ->check(CLI::ExistingFile);
    }
    cmd->add_option("--out", f.out_dir, "output directory (default: out)");

    cmd->add_option("--delta-omega", f.delta_omega,
                    "dimensionless polarizability coupling(s)");
    cmd->add_option("--tau-fwhm", f.tau_fwhm, "pulse FWHM(s), dimensionless time");
    cmd->add_option("--amplitude-ratio", f.amplitude_ratio, "F2/F1 ratio(s), two-color only");
    cmd->add_option("--delay-ratio", f.delay_ratio, "t2/t1 ratio(s), two-color only");
    cmd->add_option("--color-mode", f.color_mode, "one_color | two_color");
    cmd->add_option("--interaction", f.interaction, "cycle_averaged | full_carrier");
    cmd->add_option("--delta-omega-mu", f.delta_omega_mu, "dimensionless dipole coupling");
    cmd->add_option("--delta-omega-perp", f.delta_omega_perp, "dimensionless isotropic coupling");
    cmd->add_option("--carrier-omega", f.carrier_omega,
                    "fundamental carrier frequency (full_carrier mode)");
    cmd->add_option("--j-max", f.j_max, "basis truncation (default 64)");
    cmd->add_option("--m", f.m, "conserved magnetic quantum number (default 0)");
    cmd->add_option("--initial-j", f.initial_j, "initial eigenstate J (default |m|)");
    cmd->add_option("--n-nodes", f.n_nodes, "quadrature nodes (default 2 j_max + 1)");
    cmd->add_option("--dt", f.dt, "time step (default 1e-4)");
    cmd->add_option("--t-start", f.t_start, "window start (default 0)");
    cmd->add_option("--t-end", f.t_end, "window end (default: auto, pulse span + pi)");
    cmd->add_option("--record-every", f.record_every, "record every N steps (default 20)");
    cmd->add_flag_callback("--record-populations", [&f] { f.record_populations = true; },
                           "add per-J population columns to the CSV");
    cmd->add_flag_callback("--refine-dt", [&f] { f.refine_dt = true; },
                           "halve dt until the Richardson estimate meets refine-tol");
    cmd->add_flag_callback("--no-refine-dt", [&f] { f.refine_dt = false; },
                           "run at the configured dt without step refinement");
    cmd->add_option("--refine-tol", f.refine_tol, "Richardson target (default 1e-7)");
    cmd->add_option("--refine-max-halvings", f.refine_max_halvings, "refinement cap (default 6)");
    cmd->add_option("--post-pulse-cutoff", f.post_pulse_cutoff,
                    "envelope fraction defining pulse switch-off (default 1e-6)");
    cmd->add_flag_callback("--check-basis", [&f] { f.check_basis = true; },
                           "rerun at doubled j_max and flag the run if the final "
                           "alignment moves by 1e-8 or more");

    cmd->add_option("--physical-b-invcm", f.phys_b_invcm, "rotational constant B in cm^-1");
    cmd->add_option("--physical-dipole-debye", f.phys_dipole_debye, "dipole moment in Debye");
    cmd->add_option("--physical-alpha-par", f.phys_alpha_par, "alpha_parallel in Angstrom^3");
    cmd->add_option("--physical-alpha-perp", f.phys_alpha_perp, "alpha_perp in Angstrom^3");
    cmd->add_option("--physical-intensity-wcm2", f.phys_intensity_w_cm2,
                    "peak intensity in W/cm^2");
    cmd->add_option("--physical-tau-fwhm-fs", f.phys_tau_fwhm_fs, "pulse FWHM in fs");
}

json build_doc(const FlagSet& f, json doc) {
    if (!f.config_file.empty()) {
        try {
            doc = json::parse(rotalign::read_text_file(f.config_file));
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("config file '" + f.config_file +
                                        "' is not valid JSON: " + e.what());
        }
    }
    auto set_list = [&doc](const char* key, const std::vector<double>& v) {
        if (!v.empty()) doc[key] = v;
    };
    set_list("delta_omega", f.delta_omega);
    set_list("tau_fwhm", f.tau_fwhm);
    set_list("amplitude_ratio", f.amplitude_ratio);
    set_list("delay_ratio", f.delay_ratio);
    if (f.color_mode) doc["color_mode"] = *f.color_mode;
    if (f.interaction) doc["interaction"] = *f.interaction;
    if (f.delta_omega_mu) doc["delta_omega_mu"] = *f.delta_omega_mu;
    if (f.delta_omega_perp) doc["delta_omega_perp"] = *f.delta_omega_perp;
    if (f.carrier_omega) doc["carrier_omega"] = *f.carrier_omega;
    if (f.j_max) doc["j_max"] = *f.j_max;
    if (f.m) doc["m"] = *f.m;
    if (f.initial_j) doc["initial_j"] = *f.initial_j;
    if (f.n_nodes) doc["n_nodes"] = *f.n_nodes;
    if (f.dt) doc["dt"] = *f.dt;
    if (f.t_start) doc["t_start"] = *f.t_start;
    if (f.t_end) doc["t_end"] = *f.t_end;
    if (f.record_every) doc["record_every"] = *f.record_every;
    if (f.record_populations) doc["record_populations"] = *f.record_populations;
    if (f.refine_dt) doc["refine_dt"] = *f.refine_dt;
    if (f.refine_tol) doc["refine_tol"] = *f.refine_tol;
    if (f.refine_max_halvings) doc["refine_max_halvings"] = *f.refine_max_halvings;
    if (f.post_pulse_cutoff) doc["post_pulse_cutoff"] = *f.post_pulse_cutoff;
    if (f.check_basis) doc["check_basis"] = *f.check_basis;

    auto set_phys = [&doc](const char* key, const std::optional<double>& v) {
        if (v) doc["physical"][key] = *v;
    };
    set_phys("rotational_constant_invcm", f.phys_b_invcm);
    set_phys("dipole_debye", f.phys_dipole_debye);
    set_phys("alpha_parallel_angstrom3", f.phys_alpha_par);
    set_phys("alpha_perp_angstrom3", f.phys_alpha_perp);
    set_phys("peak_intensity_w_cm2", f.phys_intensity_w_cm2);
    set_phys("tau_fwhm_fs", f.phys_tau_fwhm_fs);
    return doc;
}

int resolve_workers(int requested, std::size_t runs) {
    int w = requested > 0 ? requested
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return std::min<int>(w, static_cast<int>(std::max<std::size_t>(1, runs)));
}

void print_warnings(const rotalign::ResolvedConfig& cfg) {
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    const rotalign::SweepSpec& s = cfg.sweep;
    const double phase = s.dt * s.j_max * (s.j_max + 1.0);
    if (phase > 2.0 * std::numbers::pi) {
        std::cerr << "warning: dt * j_max * (j_max + 1) = " << phase
                  << " exceeds 2*pi; kinetic phases wrap within one step\n";
    }
}

void print_summary_lines(const std::vector<rotalign::SweepResult>& results) {
    for (const auto& res : results) {
        const auto& s = res.summary;
        std::printf("run %d: delta_omega=%g tau=%g", s.params.index, s.params.delta_omega,
                    s.params.tau_fwhm);
        if (s.params.color_mode == rotalign::ColorMode::TwoColor) {
            std::printf(" ratio=%g delay=%g", s.params.amplitude_ratio, s.params.delay_ratio);
        }
        std::printf(" peak=%.6f at t=%.4f", s.peak_alignment, s.t_peak);
        if (s.post_pulse_mean) {
            std::printf(" post_mean=%.6f post_amp=%.6f", *s.post_pulse_mean,
                        *s.post_pulse_amplitude);
        }
        std::printf(" converged=%s\n", s.converged ? "yes" : "no");
    }
}

int run_sweep_command(const FlagSet& flags, json doc) {
    rotalign::ResolvedConfig cfg = rotalign::parse_config(build_doc(flags, std::move(doc)));
    print_warnings(cfg);
    const auto runs = rotalign::expand_sweep(cfg.sweep);
    const int workers = resolve_workers(flags.workers, runs.size());
    const auto results = rotalign::run_sweep(cfg.sweep, workers);
    rotalign::write_run_outputs(results, cfg.resolved, flags.out_dir);
    print_summary_lines(results);
    std::printf("wrote %zu run(s) to %s (summary.csv, plot.gp, manifest.json)\n", results.size(),
                flags.out_dir.c_str());
    return 0;
}

int run_simulate_command(const FlagSet& flags) {
    rotalign::ResolvedConfig cfg = rotalign::parse_config(build_doc(flags, json::object()));
    rotalign::require_single_run(cfg.sweep);
    print_warnings(cfg);
    const auto results = rotalign::run_sweep(cfg.sweep, 1);
    rotalign::write_run_outputs(results, cfg.resolved, flags.out_dir);
    print_summary_lines(results);
    std::printf("wrote %s/%s\n", flags.out_dir.c_str(), rotalign::run_csv_filename(0).c_str());
    return 0;
}

int run_compare_oracle(const FlagSet& flags, double tolerance) {
    json doc;
    doc["delta_omega"] = 100.0;
    doc["tau_fwhm"] = 0.05;
    doc["j_max"] = 32;
    doc["refine_dt"] = false;
    rotalign::ResolvedConfig cfg = rotalign::parse_config(build_doc(flags, std::move(doc)));
    rotalign::require_single_run(cfg.sweep);
    print_warnings(cfg);

    const rotalign::SweepSpec& spec = cfg.sweep;
    const auto runs = rotalign::expand_sweep(spec);
    const int n_nodes = spec.n_nodes > 0 ? spec.n_nodes : 2 * spec.j_max + 1;
    const auto grid = rotalign::build_quadrature(n_nodes, rotalign::build_basis(spec.j_max, spec.m));
    const auto plan = rotalign::make_plan(spec, runs[0], grid);
    const auto state = rotalign::initial_eigenstate(spec.initial_j, spec.m, grid.basis);

    const auto split = rotalign::propagate(state, plan);
    const auto oracle = rotalign::oracle_propagate(state, plan);

    double max_dev = 0.0;
    for (std::size_t i = 0; i < split.records.size(); ++i) {
        max_dev = std::max(max_dev,
                           std::abs(split.records[i].alignment - oracle.records[i].alignment));
    }
    const bool pass = max_dev <= tolerance;

    std::filesystem::create_directories(flags.out_dir);
    rotalign::write_timeseries_csv(split, std::filesystem::path(flags.out_dir) / "split.csv");
    rotalign::write_timeseries_csv(oracle, std::filesystem::path(flags.out_dir) / "oracle.csv");
    json report;
    report["max_abs_deviation"] = max_dev;
    report["tolerance"] = tolerance;
    report["records"] = split.records.size();
    report["pass"] = pass;
    rotalign::write_text_file(std::filesystem::path(flags.out_dir) / "report.json",
                              report.dump(2) + "\n");
    rotalign::RunManifest manifest;
    manifest.config_hash = rotalign::config_hash(cfg.resolved);
    manifest.tool_version = std::string(rotalign::kToolVersion);
    manifest.timestamp = rotalign::utc_timestamp_now();
    manifest.output_paths = {"split.csv", "oracle.csv", "report.json"};
    rotalign::write_text_file(std::filesystem::path(flags.out_dir) / "manifest.json",
                              rotalign::manifest_json(manifest, cfg.resolved).dump(2) + "\n");

    std::printf("max |<cos^2>_split - <cos^2>_oracle| = %.3e over %zu records (tol %.1e): %s\n",
                max_dev, split.records.size(), tolerance, pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

json fig_doc(int which) {
    json d;
    d["delta_omega"] = {100.0, 400.0, 900.0};
    d["interaction"] = "cycle_averaged";
    d["j_max"] = 64;
    d["dt"] = 1e-4;
    d["refine_dt"] = false;
    switch (which) {
        case 1:
            d["color_mode"] = "one_color";
            d["tau_fwhm"] = {0.05, 0.5, 5.0};
            break;
        case 2:
            d["color_mode"] = "two_color";
            d["tau_fwhm"] = {0.05, 0.5, 5.0};
            break;
        case 3:
            d["color_mode"] = "two_color";
            d["tau_fwhm"] = 0.05;
            d["amplitude_ratio"] = {1.0, std::sqrt(2.0)};
            break;
        case 4:
            d["color_mode"] = "two_color";
            d["tau_fwhm"] = 0.05;
            d["delay_ratio"] = {1.0, 1.5, 2.0};
            break;
    }
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotalign: split-operator simulation of laser-driven rigid-rotor alignment"};
    app.set_version_flag("--version", std::string(rotalign::kToolVersion));
    app.require_subcommand(1);

    FlagSet simulate_flags, sweep_flags, oracle_flags;
    FlagSet fig_flags[4];
    double oracle_tol = 1e-6;

    CLI::App* simulate = app.add_subcommand("simulate", "run a single configuration");
    add_common_flags(simulate, simulate_flags, true);

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
    add_common_flags(sweep, sweep_flags, true);
    sweep->add_option("--workers", sweep_flags.workers, "parallel workers (default: hardware)");

    CLI::App* oracle =
        app.add_subcommand("compare-oracle", "check the split-operator path against the "
                                             "fine-step reference integrator");
    add_common_flags(oracle, oracle_flags, true);
    oracle->add_option("--tol", oracle_tol, "max allowed |<cos^2>| deviation (default 1e-6)");

    CLI::App* figs[4];
    const char* fig_help[4] = {
        "one-color sweep: delta_omega x tau_fwhm grid",
        "two-color sweep: delta_omega x tau_fwhm grid, equal amplitudes",
        "two-color sweep: amplitude ratios {1, sqrt(2)} at tau_fwhm = 0.05",
        "two-color sweep: delay ratios {1, 1.5, 2} at tau_fwhm = 0.05",
    };
    for (int i = 0; i < 4; ++i) {
        figs[i] = app.add_subcommand("fig" + std::to_string(i + 1), fig_help[i]);
        add_common_flags(figs[i], fig_flags[i], false);
        figs[i]->add_option("--workers", fig_flags[i].workers,
                            "parallel workers (default: hardware)");
        fig_flags[i].out_dir = "out/fig" + std::to_string(i + 1);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate_command(simulate_flags);
        if (sweep->parsed()) return run_sweep_command(sweep_flags, json::object());
        if (oracle->parsed()) return run_compare_oracle(oracle_flags, oracle_tol);
        for (int i = 0; i < 4; ++i) {
            if (figs[i]->parsed()) return run_sweep_command(fig_flags[i], fig_doc(i + 1));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
