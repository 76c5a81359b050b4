#pragma once

// Parameter-sweep harness: cartesian expansion over (delta_omega, tau_fwhm,
// amplitude ratio, delay ratio), deterministic static-partition parallel
// execution, and per-run summary metrics.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rotalign/field.hpp"
#include "rotalign/propagator.hpp"

namespace rotalign {

enum class ColorMode { OneColor, TwoColor };

struct SweepSpec {
    // swept axes
    std::vector<double> delta_omegas;
    std::vector<double> tau_fwhms;
    std::vector<double> amplitude_ratios{1.0};  // F2 / F1
    std::vector<double> delay_ratios{1.0};      // t2 / t1
    ColorMode color_mode = ColorMode::OneColor;
    InteractionMode interaction = InteractionMode::CycleAveraged;

    // shared drive parameters
    double delta_omega_mu = 0.0;
    double delta_omega_perp = 0.0;
    double carrier_omega = 0.0;

    // shared numerics
    int j_max = 64;
    int m = 0;
    int initial_j = 0;
    int n_nodes = 0;  // 0 -> 2 j_max + 1
    double dt = 1e-4;
    double t_start = 0.0;
    double t_end = 0.0;  // 0 -> auto: max(center + 4 tau) + pi
    int record_every = 20;
    bool record_populations = false;
    bool refine_dt = true;
    double refine_tol = 1e-7;
    int refine_max_halvings = 6;
    double post_pulse_cutoff = 1e-6;  // fraction of peak envelope
    bool check_basis = false;         // rerun at doubled j_max, compare final alignment
};

// Truncation acceptance rule: doubling j_max must move the final alignment
// by less than this, or the run is flagged non-converged.
inline constexpr double kBasisDoublingTolerance = 1e-8;

struct RunConfig {
    int index = 0;
    double delta_omega = 0.0;
    double tau_fwhm = 0.0;
    double amplitude_ratio = 1.0;  // meaningful for TwoColor only
    double delay_ratio = 1.0;      // meaningful for TwoColor only
    ColorMode color_mode = ColorMode::OneColor;
};

inline void validate(const SweepSpec& spec) {
    auto require_nonempty = [](const std::vector<double>& axis, const char* name) {
        if (axis.empty()) throw std::invalid_argument(std::string("SweepSpec: empty axis ") + name);
    };
    require_nonempty(spec.delta_omegas, "delta_omega");
    require_nonempty(spec.tau_fwhms, "tau_fwhm");
    if (spec.color_mode == ColorMode::TwoColor) {
        require_nonempty(spec.amplitude_ratios, "amplitude_ratio");
        require_nonempty(spec.delay_ratios, "delay_ratio");
    }
    for (double tau : spec.tau_fwhms) {
        if (!(tau > 0.0)) throw std::invalid_argument("SweepSpec: tau_fwhm values must be > 0");
    }
    if (spec.j_max < std::abs(spec.m)) throw std::invalid_argument("SweepSpec: j_max must be >= |m|");
    if (spec.initial_j < std::abs(spec.m) || spec.initial_j > spec.j_max) {
        throw std::invalid_argument("SweepSpec: initial_j must lie in [|m|, j_max]");
    }
}

// Lexicographic over (delta_omega, tau, ratio, delay); OneColor drops the
// ratio/delay axes.
inline std::vector<RunConfig> expand_sweep(const SweepSpec& spec) {
    validate(spec);
    const bool two_color = spec.color_mode == ColorMode::TwoColor;
    const std::vector<double> ones{1.0};
    const auto& ratios = two_color ? spec.amplitude_ratios : ones;
    const auto& delays = two_color ? spec.delay_ratios : ones;
    std::vector<RunConfig> runs;
    runs.reserve(spec.delta_omegas.size() * spec.tau_fwhms.size() * ratios.size() * delays.size());
    int index = 0;
    for (double dw : spec.delta_omegas) {
        for (double tau : spec.tau_fwhms) {
            for (double ratio : ratios) {
                for (double delay : delays) {
                    runs.push_back({index++, dw, tau, ratio, delay, spec.color_mode});
                }
            }
        }
    }
    return runs;
}

// Envelope centers default to 4 tau after the window start so the field at
// t = 0 is ~2.6e-10 of peak; carrier delays ride with the centers.
inline FieldConfig make_field_config(const SweepSpec& spec, const RunConfig& run) {
    FieldConfig field;
    field.mode = spec.interaction;
    field.carrier_omega = spec.carrier_omega;
    field.couplings = {run.delta_omega, spec.delta_omega_mu, spec.delta_omega_perp};
    const double t1 = 4.0 * run.tau_fwhm;
    field.pulses.push_back({1.0, run.tau_fwhm, t1, 1, t1});
    if (run.color_mode == ColorMode::TwoColor) {
        const double t2 = run.delay_ratio * t1;
        field.pulses.push_back({run.amplitude_ratio, run.tau_fwhm, t2, 2, t2});
    }
    validate(field);
    return field;
}

inline double auto_t_end(const FieldConfig& field) {
    double latest = 0.0;
    for (const auto& p : field.pulses) latest = std::max(latest, p.center + 4.0 * p.tau_fwhm);
    return latest + std::numbers::pi;  // one rotational period past switch-off
}

inline PropagationPlan make_plan(const SweepSpec& spec, const RunConfig& run,
                                 const AngularGrid& grid) {
    PropagationPlan plan;
    plan.field = make_field_config(spec, run);
    plan.grid = grid;
    plan.t_start = spec.t_start;
    plan.t_end = spec.t_end > 0.0 ? spec.t_end : auto_t_end(plan.field);
    plan.dt = spec.dt;
    plan.record_every = spec.record_every;
    plan.record_populations = spec.record_populations;
    return plan;
}

struct RunSummary {
    RunConfig params;
    double peak_alignment = 0.0;
    double t_peak = 0.0;
    std::optional<double> post_pulse_mean;
    std::optional<double> post_pulse_amplitude;  // max - min after switch-off
    bool converged = true;
};

// Post-pulse statistics over the suffix where |field| stays below
// field_cutoff * peak |field|. A fieldless run is all suffix; a window that
// never clears the cutoff reports absent post-pulse stats.
inline RunSummary summarize(const TimeSeries& series, double field_cutoff) {
    if (series.records.empty()) throw std::invalid_argument("summarize: empty time series");
    RunSummary summary;
    summary.converged = series.converged;

    double peak_field = 0.0;
    for (const auto& r : series.records) peak_field = std::max(peak_field, std::abs(r.field));

    std::size_t suffix_begin = 0;
    if (peak_field > 0.0) {
        const double threshold = field_cutoff * peak_field;
        suffix_begin = series.records.size();
        while (suffix_begin > 0 &&
               std::abs(series.records[suffix_begin - 1].field) < threshold) {
            --suffix_begin;
        }
    }

    summary.peak_alignment = series.records.front().alignment;
    summary.t_peak = series.records.front().t;
    for (const auto& r : series.records) {
        if (r.alignment > summary.peak_alignment) {
            summary.peak_alignment = r.alignment;
            summary.t_peak = r.t;
        }
    }

    if (suffix_begin < series.records.size()) {
        double lo = series.records[suffix_begin].alignment;
        double hi = lo;
        double sum = 0.0;
        for (std::size_t i = suffix_begin; i < series.records.size(); ++i) {
            const double a = series.records[i].alignment;
            lo = std::min(lo, a);
            hi = std::max(hi, a);
            sum += a;
        }
        summary.post_pulse_mean = sum / static_cast<double>(series.records.size() - suffix_begin);
        summary.post_pulse_amplitude = hi - lo;
    }
    return summary;
}

struct SweepResult {
    RunConfig config;
    TimeSeries series;
    RunSummary summary;
};

namespace detail {

// The recorded field column is quadratic in the envelope under cycle
// averaging, so the envelope cutoff enters squared there.
inline double effective_field_cutoff(const SweepSpec& spec) {
    return spec.interaction == InteractionMode::CycleAveraged
               ? spec.post_pulse_cutoff * spec.post_pulse_cutoff
               : spec.post_pulse_cutoff;
}

}  // namespace detail

namespace detail {

// doubling rule: |final alignment(j_max) - final alignment(2 j_max)| at the
// configured dt, both runs plain (no step refinement)
inline double basis_doubling_delta(const SweepSpec& spec, const RunConfig& run,
                                   const AngularGrid& grid) {
    const PropagationPlan plan = make_plan(spec, run, grid);
    const auto base = propagate(initial_eigenstate(spec.initial_j, spec.m, grid.basis), plan);

    const int doubled_j = 2 * spec.j_max;
    const auto doubled_grid = build_quadrature(2 * doubled_j + 1, build_basis(doubled_j, spec.m));
    PropagationPlan doubled_plan = plan;
    doubled_plan.grid = doubled_grid;
    const auto doubled =
        propagate(initial_eigenstate(spec.initial_j, spec.m, doubled_grid.basis), doubled_plan);
    return std::abs(base.records.back().alignment - doubled.records.back().alignment);
}

}  // namespace detail

inline SweepResult run_single(const SweepSpec& spec, const RunConfig& run,
                              const AngularGrid& grid) {
    PropagationPlan plan = make_plan(spec, run, grid);
    SpectralState state = initial_eigenstate(spec.initial_j, spec.m, grid.basis);
    TimeSeries series;
    if (spec.refine_dt) {
        series = propagate_refined(state, plan, spec.refine_tol, spec.refine_max_halvings).series;
    } else {
        series = propagate(std::move(state), plan);
    }
    if (spec.check_basis &&
        detail::basis_doubling_delta(spec, run, grid) >= kBasisDoublingTolerance) {
        series.converged = false;
    }
    RunSummary summary = summarize(series, detail::effective_field_cutoff(spec));
    summary.params = run;
    return {run, std::move(series), std::move(summary)};
}

// Static round-robin partition over a shared immutable grid; results are
// gathered in expansion order and bitwise independent of the worker count.
inline std::vector<SweepResult> run_sweep(const SweepSpec& spec, int workers) {
    if (workers < 1) throw std::invalid_argument("run_sweep: workers must be >= 1");
    const std::vector<RunConfig> runs = expand_sweep(spec);
    const int n_nodes = spec.n_nodes > 0 ? spec.n_nodes : 2 * spec.j_max + 1;
    const AngularGrid grid = build_quadrature(n_nodes, build_basis(spec.j_max, spec.m));

    std::vector<SweepResult> results(runs.size());
    if (workers == 1 || runs.size() <= 1) {
        for (std::size_t i = 0; i < runs.size(); ++i) results[i] = run_single(spec, runs[i], grid);
        return results;
    }
    const int active = std::min<int>(workers, static_cast<int>(runs.size()));
    std::vector<std::thread> pool;
    pool.reserve(active);
    for (int w = 0; w < active; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = static_cast<std::size_t>(w); i < runs.size();
                 i += static_cast<std::size_t>(active)) {
                results[i] = run_single(spec, runs[i], grid);
            }
        });
    }
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace rotalign
