// Acceptance suite: end-to-end checks of the solver against its independent
// oracles and the qualitative structure of the canned parameter studies.
// Prints one PASS/FAIL line per criterion; exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "rotalign/io.hpp"
#include "rotalign/oracle.hpp"
#include "rotalign/sweep.hpp"
#include "test_support.hpp"

using namespace rotalign;

namespace {

struct Gate {
    int failures = 0;

    void report(int number, bool ok, const std::string& label, const std::string& detail) {
        std::printf("%s  criterion-%d: %s (%s)\n", ok ? "PASS" : "FAIL", number, label.c_str(),
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SweepSpec canned_spec() {
    SweepSpec spec;
    spec.delta_omegas = {100.0, 400.0, 900.0};
    spec.j_max = 64;
    spec.dt = 1e-4;
    spec.refine_dt = false;
    return spec;
}

// peak alignment over the records before the post-pulse suffix
double in_pulse_peak(const TimeSeries& series, double field_cutoff) {
    double peak_field = 0.0;
    for (const auto& r : series.records) peak_field = std::max(peak_field, std::abs(r.field));
    const double threshold = field_cutoff * peak_field;
    double peak = 0.0;
    for (const auto& r : series.records) {
        if (std::abs(r.field) >= threshold) peak = std::max(peak, r.alignment);
    }
    return peak;
}

double max_alignment_deviation(const TimeSeries& a, const TimeSeries& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        worst = std::max(worst, std::abs(a.records[i].alignment - b.records[i].alignment));
    }
    return worst;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

bool summaries_distinct(const RunSummary& a, const RunSummary& b, double tol) {
    const double mean_gap =
        std::abs(a.post_pulse_mean.value_or(0.0) - b.post_pulse_mean.value_or(0.0));
    const double amp_gap =
        std::abs(a.post_pulse_amplitude.value_or(0.0) - b.post_pulse_amplitude.value_or(0.0));
    const double peak_gap = std::abs(a.peak_alignment - b.peak_alignment);
    return std::max({mean_gap, amp_gap, peak_gap}) > tol;
}

// --- criterion 1: unitarity of the full fig1 sweep, under the time budget --
// (keeps the results for criterion 5)
std::vector<SweepResult> criterion_1(Gate& gate) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepSpec spec = canned_spec();
    spec.tau_fwhms = {0.05, 0.5, 5.0};
    spec.color_mode = ColorMode::OneColor;
    auto results = run_sweep(spec, 2);
    const double elapsed = seconds_since(t0);

    double worst_drift = 0.0;
    for (const auto& res : results) worst_drift = std::max(worst_drift, res.series.norm_drift);
    const bool ok = results.size() == 9 && worst_drift <= 1e-10 && elapsed < 300.0;
    gate.report(1, ok, "fig1 sweep conserves norm",
                "9 runs, max drift " + fmt("%.2e", worst_drift) + " <= 1e-10, " +
                    fmt("%.0f", elapsed) + " s < 300 s");
    return results;
}

// --- criterion 2: split-operator vs fine-step reference integrator ---------
// (keeps the trajectory for the parity check of criterion 7)
TimeSeries criterion_2(Gate& gate) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepSpec spec = canned_spec();
    spec.delta_omegas = {100.0};
    spec.tau_fwhms = {0.05};
    spec.j_max = 32;
    const auto runs = expand_sweep(spec);
    const auto grid = build_quadrature(65, build_basis(32, 0));
    const auto plan = make_plan(spec, runs[0], grid);
    const auto state = initial_eigenstate(0, 0, grid.basis);

    const auto split = propagate(state, plan);
    const auto reference = oracle_propagate(state, plan);
    const double deviation = max_alignment_deviation(split, reference);
    const double elapsed = seconds_since(t0);

    const bool ok = deviation <= 1e-6 && elapsed < 120.0;
    gate.report(2, ok, "split-operator matches the reference integrator",
                "max |<cos^2>| deviation " + fmt("%.2e", deviation) + " <= 1e-6 over " +
                    std::to_string(split.records.size()) + " records, " + fmt("%.0f", elapsed) +
                    " s < 120 s");
    return split;
}

// --- criterion 3: free-rotor analytics --------------------------------------
void criterion_3(Gate& gate) {
    const auto basis = build_basis(24, 0);
    const auto grid = build_quadrature(49, basis);
    FieldConfig off;
    off.pulses.push_back({0.0, 1.0, 0.0, 1, 0.0});

    PropagationPlan plan;
    plan.field = off;
    plan.grid = grid;
    plan.t_start = 0.0;
    plan.t_end = std::numbers::pi;
    plan.dt = std::numbers::pi / 4000.0;
    plan.record_every = 100;

    bool ok = true;
    std::string detail;

    // eigenstate runs stay at the quadrature-oracle values
    const double expected[] = {1.0 / 3.0, 0.6};
    for (int j = 0; j <= 1; ++j) {
        const auto series = propagate(initial_eigenstate(j, 0, basis), plan);
        for (const auto& rec : series.records) {
            if (std::abs(rec.alignment - expected[j]) > 1e-12) ok = false;
        }
    }
    detail += "eigenstate alignments constant to 1e-12";

    // revival identity for arbitrary superpositions
    double worst = 0.0;
    for (unsigned seed : {11u, 12u, 13u}) {
        auto rng = testsupport::seeded_rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        SpectralState state;
        state.basis = basis;
        state.coefficients.resize(basis.dim);
        for (auto& c : state.coefficients) c = complex{dist(rng), dist(rng)};
        const double n = state.norm();
        for (auto& c : state.coefficients) c /= n;

        const auto series = propagate(state, plan);
        worst = std::max(worst, std::abs(series.records.back().alignment -
                                         series.records.front().alignment));
        // and via exact kinetic phases at an arbitrary offset
        const auto a = free_evolve(state, 0.81);
        const auto b = free_evolve(a, std::numbers::pi);
        worst = std::max(worst, std::abs(alignment_cosine(b) - alignment_cosine(a)));
    }
    if (worst >= 1e-10) ok = false;
    detail += ", revival residue " + fmt("%.2e", worst) + " < 1e-10";
    gate.report(3, ok, "free-rotor analytics", detail);
}

// --- criterion 4: second-order convergence in dt ----------------------------
void criterion_4(Gate& gate) {
    const auto basis = build_basis(16, 0);
    const auto grid = build_quadrature(33, basis);
    FieldConfig f;
    f.mode = InteractionMode::CycleAveraged;
    f.couplings = {50.0, 0.0, 0.0};
    f.pulses.push_back({1.0, 0.5, 2.0, 1, 2.0});
    const auto state = initial_eigenstate(0, 0, basis);

    auto plan_for = [&](double dt, int record_every) {
        PropagationPlan p;
        p.field = f;
        p.grid = grid;
        p.t_start = 0.0;
        p.t_end = 4.0;
        p.dt = dt;
        p.record_every = record_every;
        return p;
    };
    const auto reference = oracle_propagate(state, plan_for(1e-4, 200));
    auto error_at = [&](double dt, int record_every) {
        return max_alignment_deviation(propagate(state, plan_for(dt, record_every)), reference);
    };
    const double e_coarse = error_at(4e-4, 50);
    const double e_half = error_at(2e-4, 100);
    const double ratio = e_coarse / e_half;
    const bool ok = ratio >= 3.5 && ratio <= 4.5;
    gate.report(4, ok, "halving dt divides the error by ~4",
                "err(4e-4) = " + fmt("%.2e", e_coarse) + ", err(2e-4) = " + fmt("%.2e", e_half) +
                    ", ratio " + fmt("%.2f", ratio) + " in [3.5, 4.5]");
}

// --- criterion 5: fig1 impulsive/adiabatic structure -------------------------
void criterion_5(Gate& gate, const std::vector<SweepResult>& fig1) {
    bool ok = true;
    std::string detail;

    // (a) tau = 0.05: persistent post-pulse oscillations, in-pulse peaks
    // ordered by drive strength ("higher alignment during the pulse")
    std::vector<double> pulse_peaks;
    for (const auto& res : fig1) {
        if (res.config.tau_fwhm != 0.05) continue;
        if (!res.summary.post_pulse_amplitude || *res.summary.post_pulse_amplitude <= 0.1) {
            ok = false;
        }
        pulse_peaks.push_back(in_pulse_peak(res.series, 1e-12));
    }
    if (pulse_peaks.size() != 3 ||
        !(pulse_peaks[0] < pulse_peaks[1] && pulse_peaks[1] < pulse_peaks[2])) {
        ok = false;
    }
    detail += "in-pulse peaks " + fmt("%.3f", pulse_peaks[0]) + " < " +
              fmt("%.3f", pulse_peaks[1]) + " < " + fmt("%.3f", pulse_peaks[2]) +
              ", post amplitudes > 0.1";

    // (c) tau = 5: adiabatic return to the isotropic value
    double worst_return = 0.0;
    for (const auto& res : fig1) {
        if (res.config.tau_fwhm != 5.0) continue;
        if (!res.summary.post_pulse_mean) {
            ok = false;
            continue;
        }
        worst_return = std::max(worst_return, std::abs(*res.summary.post_pulse_mean - 1.0 / 3.0));
    }
    if (worst_return >= 0.05) ok = false;
    detail += "; adiabatic |post mean - 1/3| " + fmt("%.4f", worst_return) + " < 0.05";
    gate.report(5, ok, "fig1 impulsive and adiabatic regimes", detail);
}

// --- criterion 6: two-color structure (figs 2-4), structural pass ----------
void criterion_6(Gate& gate, const std::vector<SweepResult>& fig1,
                 const std::vector<SweepResult>& fig3_runs) {
    bool ok = true;
    std::string detail;

    // two-color equal-amplitude runs at tau = 0.05 restructure the
    // post-pulse oscillations relative to one-color at the same drive
    SweepSpec two = canned_spec();
    two.tau_fwhms = {0.05};
    two.color_mode = ColorMode::TwoColor;
    const auto fig2_row = run_sweep(two, 2);
    int distinct = 0;
    for (const auto& res : fig2_row) {
        for (const auto& base : fig1) {
            if (base.config.tau_fwhm == 0.05 &&
                base.config.delta_omega == res.config.delta_omega) {
                if (summaries_distinct(res.summary, base.summary, 1e-3)) ++distinct;
            }
        }
    }
    if (distinct != 3) ok = false;
    detail += "two-color vs one-color post-pulse metrics distinct for " +
              std::to_string(distinct) + "/3 drives";

    // amplitude-ratio panels: complete and distinct per panel
    if (fig3_runs.size() != 6) ok = false;
    for (std::size_t i = 0; i + 1 < fig3_runs.size(); i += 2) {
        if (!summaries_distinct(fig3_runs[i].summary, fig3_runs[i + 1].summary, 1e-6)) ok = false;
    }

    // delay-ratio panels: complete, deterministic on a rerun, distinct
    SweepSpec fig4 = canned_spec();
    fig4.tau_fwhms = {0.05};
    fig4.color_mode = ColorMode::TwoColor;
    fig4.delay_ratios = {1.0, 1.5, 2.0};
    const auto fig4_runs = run_sweep(fig4, 2);
    const auto fig4_again = run_sweep(fig4, 2);
    if (fig4_runs.size() != 9) ok = false;
    if (summary_csv_string(fig4_runs) != summary_csv_string(fig4_again)) ok = false;
    for (std::size_t base = 0; base + 2 < fig4_runs.size(); base += 3) {
        for (std::size_t a = base; a < base + 3; ++a) {
            for (std::size_t b = a + 1; b < base + 3; ++b) {
                if (!summaries_distinct(fig4_runs[a].summary, fig4_runs[b].summary, 1e-6)) {
                    ok = false;
                }
            }
        }
    }
    detail += "; ratio and delay sweeps complete, rerun-identical, distinct per panel";
    gate.report(6, ok, "two-color sweeps restructure the dynamics", detail);
}

// fig3-shaped sweep used by criteria 6 (panel structure) and 7 (worker
// determinism): run once serially and once on 8 workers
struct Fig3Evidence {
    std::vector<SweepResult> serial;
    bool bitwise = false;
};

Fig3Evidence run_fig3_twice() {
    SweepSpec fig3 = canned_spec();
    fig3.tau_fwhms = {0.05};
    fig3.color_mode = ColorMode::TwoColor;
    fig3.amplitude_ratios = {1.0, std::sqrt(2.0)};
    Fig3Evidence ev;
    ev.serial = run_sweep(fig3, 1);
    const auto parallel = run_sweep(fig3, 8);
    ev.bitwise = summary_csv_string(ev.serial) == summary_csv_string(parallel) &&
                 ev.serial.size() == parallel.size();
    for (std::size_t i = 0; ev.bitwise && i < ev.serial.size(); ++i) {
        ev.bitwise = timeseries_csv_string(ev.serial[i].series) ==
                     timeseries_csv_string(parallel[i].series);
    }
    return ev;
}

// --- criterion 7: invariance suite ------------------------------------------
void criterion_7(Gate& gate, const TimeSeries& parity_series, bool workers_bitwise) {
    bool ok = true;
    std::string detail;

    // isotropic coupling invariance
    SweepSpec spec = canned_spec();
    spec.delta_omegas = {100.0};
    spec.tau_fwhms = {0.05};
    spec.j_max = 32;
    const auto runs = expand_sweep(spec);
    const auto grid = build_quadrature(65, build_basis(32, 0));
    const auto state = initial_eigenstate(0, 0, grid.basis);
    auto plan = make_plan(spec, runs[0], grid);
    const auto bare = propagate(state, plan);
    plan.field.couplings.delta_omega_perp = 10.0;
    const auto dressed = propagate(state, plan);
    double worst = max_alignment_deviation(bare, dressed);
    for (std::size_t i = 0; i < bare.records.size(); ++i) {
        worst = std::max(worst,
                         std::abs(bare.records[i].orientation - dressed.records[i].orientation));
    }
    if (worst > 1e-12) ok = false;
    detail += "delta_omega_perp effect " + fmt("%.1e", worst) + " <= 1e-12";

    // parity: no dipole term, no orientation
    double worst_orientation = 0.0;
    for (const auto& rec : parity_series.records) {
        worst_orientation = std::max(worst_orientation, std::abs(rec.orientation));
    }
    if (worst_orientation >= 1e-10) ok = false;
    detail += "; |<cos theta>| " + fmt("%.1e", worst_orientation) + " < 1e-10";

    // worker-count determinism, bitwise on the emitted CSV bytes
    if (!workers_bitwise) ok = false;
    detail += std::string("; 1 vs 8 workers ") + (workers_bitwise ? "bitwise identical" : "DIFFER");
    gate.report(7, ok, "invariances hold", detail);
}

// --- criterion 8: matrix elements vs independent quadrature ------------------
void criterion_8(Gate& gate) {
    double worst = 0.0;
    for (int m = 0; m <= 4; ++m) {
        const auto basis = build_basis(16, m);
        const auto cos_op = cos_theta_matrix(basis);
        const auto cos2_op = cos2_theta_matrix(basis);
        const testsupport::MatrixElementOracle oracle(16, m, 400000);
        for (int a = 0; a < basis.dim; ++a) {
            for (int b = a; b < basis.dim; ++b) {
                const int j1 = basis.j_of(a);
                const int j2 = basis.j_of(b);
                if (j2 - j1 <= 1) {
                    worst = std::max(worst,
                                     std::abs(cos_op.element(a, b) - oracle.element(j1, j2, 1)));
                }
                if (j2 - j1 <= 2) {
                    worst = std::max(worst,
                                     std::abs(cos2_op.element(a, b) - oracle.element(j1, j2, 2)));
                }
            }
        }
        // negative m is the same operator
        const auto mirrored = cos2_theta_matrix(build_basis(16, -m));
        for (int a = 0; a < basis.dim; ++a) {
            if (mirrored.element(a, a) != cos2_op.element(a, a)) worst = 1.0;
        }
    }
    gate.report(8, worst <= 1e-12, "matrix elements match independent quadrature",
                "j <= 16, |m| <= 4, worst |difference| " + fmt("%.2e", worst) + " <= 1e-12");
}

}  // namespace

int main() {
    Gate gate;
    const auto fig1 = criterion_1(gate);
    const auto parity_series = criterion_2(gate);
    criterion_3(gate);
    criterion_4(gate);
    criterion_5(gate, fig1);
    const auto fig3_evidence = run_fig3_twice();
    criterion_6(gate, fig1, fig3_evidence.serial);
    criterion_7(gate, parity_series, fig3_evidence.bitwise);
    criterion_8(gate);
    if (gate.failures > 0) {
        std::printf("%d criterion(s) FAILED\n", gate.failures);
        return 1;
    }
    std::printf("all 8 criteria passed\n");
    return 0;
}
