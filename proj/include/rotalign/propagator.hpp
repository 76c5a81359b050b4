#pragma once

// Strang split-operator propagation of the dimensionless TDSE
//   i d/dt psi = (J^2 + V(theta, t)) psi
// Kinetic factor is exact in the spectral basis; the potential factor is
// diagonal on the collocation grid. V is evaluated at the step midpoint.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rotalign/angular_basis.hpp"
#include "rotalign/field.hpp"
#include "rotalign/observables.hpp"

namespace rotalign {

// Convergence guards. A run that trips either is flagged, not failed.
inline constexpr double kNormDriftTolerance = 1e-8;
inline constexpr double kEdgePopulationTolerance = 1e-8;

struct PropagationPlan {
    double t_start = 0.0;
    double t_end = 0.0;
    double dt = 1e-4;
    int record_every = 20;
    FieldConfig field;
    AngularGrid grid;
    bool record_populations = false;
};

inline void validate(const PropagationPlan& plan) {
    if (!(plan.t_end > plan.t_start)) {
        throw std::invalid_argument("PropagationPlan: t_end must be > t_start");
    }
    if (!(plan.dt > 0.0) || plan.dt > plan.t_end - plan.t_start) {
        throw std::invalid_argument("PropagationPlan: need 0 < dt <= (t_end - t_start)");
    }
    if (plan.record_every < 1) {
        throw std::invalid_argument("PropagationPlan: record_every must be >= 1");
    }
    validate(plan.field);
}

// Phase per step of the fastest retained rotor level should stay below one
// cycle; advisory only.
inline std::optional<std::string> stability_warning(const PropagationPlan& plan) {
    const double jm = plan.grid.basis.j_max;
    if (plan.dt * jm * (jm + 1.0) > 2.0 * std::numbers::pi) {
        return "dt * j_max * (j_max + 1) = " + std::to_string(plan.dt * jm * (jm + 1.0)) +
               " exceeds 2*pi; kinetic phases wrap within a single step";
    }
    return std::nullopt;
}

struct TimeSeries {
    std::vector<ObservableRecord> records;
    double norm_drift = 0.0;          // max |norm(t) - norm(t_start)| over records
    double edge_population_max = 0.0; // max of p_{jmax} + p_{jmax-1} over records
    bool converged = true;
};

inline SpectralState initial_eigenstate(int j, int m, const BasisDescriptor& basis) {
    if (m != basis.m) {
        throw std::invalid_argument("initial_eigenstate: m (" + std::to_string(m) +
                                    ") does not match basis m (" + std::to_string(basis.m) + ")");
    }
    if (j < basis.j_min() || j > basis.j_max) {
        throw std::invalid_argument("initial_eigenstate: j (" + std::to_string(j) +
                                    ") outside basis range [" + std::to_string(basis.j_min()) +
                                    ", " + std::to_string(basis.j_max) + "]");
    }
    SpectralState state;
    state.basis = basis;
    state.coefficients.assign(basis.dim, complex{0.0, 0.0});
    state.coefficients[basis.index_of(j)] = complex{1.0, 0.0};
    return state;
}

// Exact kinetic propagation: c_J *= exp(-i J(J+1) dt).
inline SpectralState free_evolve(SpectralState state, double dt) {
    for (int r = 0; r < state.basis.dim; ++r) {
        const double j = state.basis.j_of(r);
        state.coefficients[r] *= std::polar(1.0, -j * (j + 1.0) * dt);
    }
    return state;
}

namespace detail {

// Per-run stepping engine; owns the phase tables and grid scratch so the
// hot loop allocates nothing.
class StrangStepper {
  public:
    StrangStepper(const AngularGrid& grid, const FieldConfig& field)
        : grid_(grid),
          field_(field),
          psi_(grid.n_nodes()),
          node_phase_(grid.n_nodes()),
          kinetic_phase_(grid.basis.dim) {}

    void prepare(double dt) {
        if (dt == kinetic_dt_) return;
        for (int r = 0; r < grid_.basis.dim; ++r) {
            const double j = grid_.basis.j_of(r);
            kinetic_phase_[r] = std::polar(1.0, -j * (j + 1.0) * dt);
        }
        kinetic_dt_ = dt;
    }

    // exp(-i V dt/2) exp(-i J^2 dt) exp(-i V dt/2), V frozen at t + dt/2
    void step(SpectralState& state, double t, double dt) {
        prepare(dt);
        const PotentialCoefficients pc = effective_couplings(t + 0.5 * dt, field_);
        const bool angular = pc.c1 != 0.0 || pc.c2 != 0.0;
        if (angular) {
            const int n = grid_.n_nodes();
            const double half = 0.5 * dt;
            for (int k = 0; k < n; ++k) {
                const double x = grid_.nodes[k];
                node_phase_[k] = std::polar(1.0, -(pc.c1 * x + pc.c2 * x * x) * half) - 1.0;
            }
            apply_potential_half(state);
        }
        for (int r = 0; r < state.basis.dim; ++r) state.coefficients[r] *= kinetic_phase_[r];
        if (angular) apply_potential_half(state);
        state.global_phase -= pc.c0 * dt;
    }

  private:
    // c <- c + A ((Phi - 1) S c). Algebraically A S = I, so writing the
    // factor as identity plus correction keeps the identity part of the
    // propagator out of the transform round trip; its fixed rounding would
    // otherwise bias the norm coherently over long runs.
    void apply_potential_half(SpectralState& state) {
        const int n = grid_.n_nodes();
        const int dim = grid_.basis.dim;
        // synthesis
        for (int k = 0; k < n; ++k) psi_[k] = complex{0.0, 0.0};
        for (int r = 0; r < dim; ++r) {
            const complex c = state.coefficients[r];
            const double* row = grid_.legendre_table.data() + static_cast<std::size_t>(r) * n;
            for (int k = 0; k < n; ++k) psi_[k] += c * row[k];
        }
        // diagonal potential phase, correction part only
        for (int k = 0; k < n; ++k) psi_[k] *= node_phase_[k];
        // analysis, accumulated onto the untouched coefficients
        for (int r = 0; r < dim; ++r) {
            const double* row = grid_.weighted_table.data() + static_cast<std::size_t>(r) * n;
            complex acc{0.0, 0.0};
            for (int k = 0; k < n; ++k) acc += row[k] * psi_[k];
            state.coefficients[r] += acc;
        }
    }

    const AngularGrid& grid_;
    const FieldConfig& field_;
    std::vector<complex> psi_;
    std::vector<complex> node_phase_;
    std::vector<complex> kinetic_phase_;
    double kinetic_dt_ = -1.0;
};

struct RecordingContext {
    const PropagationPlan& plan;
    BandedOperator cos_op;
    BandedOperator cos2_op;
    double norm0 = 1.0;

    explicit RecordingContext(const PropagationPlan& p)
        : plan(p),
          cos_op(cos_theta_matrix(p.grid.basis)),
          cos2_op(cos2_theta_matrix(p.grid.basis)) {}

    void record(TimeSeries& out, const SpectralState& state, double t) {
        ObservableRecord rec;
        rec.t = t;
        rec.alignment = alignment_cosine(state, cos2_op);
        rec.orientation = orientation_cosine(state, cos_op);
        rec.norm = state.norm();
        rec.field = field_record_value(t, plan.field);
        if (plan.record_populations) rec.populations = populations(state);
        if (out.records.empty()) norm0 = rec.norm;
        out.norm_drift = std::max(out.norm_drift, std::abs(rec.norm - norm0));
        const int dim = state.basis.dim;
        if (dim >= 3) {
            const double edge = std::norm(state.coefficients[dim - 1]) +
                                std::norm(state.coefficients[dim - 2]);
            out.edge_population_max = std::max(out.edge_population_max, edge);
        }
        out.records.push_back(std::move(rec));
    }

    void finish(TimeSeries& out) const {
        out.converged = out.norm_drift <= kNormDriftTolerance &&
                        out.edge_population_max < kEdgePopulationTolerance;
    }
};

// Splits [t_start, t_end] into n_full steps of dt plus an optional shortened
// remainder, absorbing float noise in span/dt.
struct StepSchedule {
    std::int64_t n_full = 0;
    double remainder = 0.0;
};

inline StepSchedule make_schedule(double t_start, double t_end, double dt) {
    const double span = t_end - t_start;
    auto n = static_cast<std::int64_t>(std::floor(span / dt));
    double rem = span - static_cast<double>(n) * dt;
    if (rem >= dt * (1.0 - 1e-9)) {
        ++n;
        rem = 0.0;
    } else if (rem < dt * 1e-9) {
        rem = 0.0;
    }
    return {n, rem};
}

}  // namespace detail

inline SpectralState strang_step(SpectralState state, double t, double dt,
                                 const PropagationPlan& plan) {
    detail::StrangStepper stepper(plan.grid, plan.field);
    stepper.step(state, t, dt);
    return state;
}

inline TimeSeries propagate(SpectralState state, const PropagationPlan& plan) {
    validate(plan);
    if (state.basis != plan.grid.basis) {
        throw std::invalid_argument("propagate: state basis does not match plan grid basis");
    }
    detail::StrangStepper stepper(plan.grid, plan.field);
    detail::RecordingContext ctx(plan);
    const auto schedule = detail::make_schedule(plan.t_start, plan.t_end, plan.dt);

    TimeSeries out;
    ctx.record(out, state, plan.t_start);
    for (std::int64_t k = 1; k <= schedule.n_full; ++k) {
        const double t_prev = plan.t_start + static_cast<double>(k - 1) * plan.dt;
        stepper.step(state, t_prev, plan.dt);
        if (k % plan.record_every == 0) {
            const bool last = k == schedule.n_full && schedule.remainder == 0.0;
            ctx.record(out, state, last ? plan.t_end : plan.t_start + static_cast<double>(k) * plan.dt);
        }
    }
    if (schedule.remainder > 0.0) {
        stepper.step(state, plan.t_start + static_cast<double>(schedule.n_full) * plan.dt,
                     schedule.remainder);
        ctx.record(out, state, plan.t_end);
    } else if (schedule.n_full % plan.record_every != 0) {
        ctx.record(out, state, plan.t_end);
    }
    ctx.finish(out);
    return out;
}

// Richardson step control: halve dt until consecutive final alignments agree
// to tol (second-order extrapolation). Returns the finest run.
struct RefinedRun {
    TimeSeries series;
    double dt_used = 0.0;
    double error_estimate = 0.0;
    int halvings = 0;
};

inline RefinedRun propagate_refined(const SpectralState& state, PropagationPlan plan,
                                    double tol = 1e-7, int max_halvings = 6) {
    TimeSeries coarse = propagate(state, plan);
    RefinedRun result{std::move(coarse), plan.dt, 0.0, 0};
    for (int h = 1; h <= max_halvings; ++h) {
        PropagationPlan finer = plan;
        finer.dt = plan.dt / 2.0;
        TimeSeries next = propagate(state, finer);
        const double est =
            std::abs(next.records.back().alignment - result.series.records.back().alignment) / 3.0;
        plan = std::move(finer);
        result = RefinedRun{std::move(next), plan.dt, est, h};
        if (est < tol) return result;
    }
    result.series.converged = false;  // step-size control never met tol
    return result;
}

}  // namespace rotalign
