#pragma once

// Slow reference integrator: the spectral-basis ODE i dc/dt = H(t) c with
// dense banded H(t), stepped by classic fourth-order Runge-Kutta at dt/100.
// Exists to check the split-operator path; never used for production runs.

#include <cstdint>
#include <vector>

#include "rotalign/angular_basis.hpp"
#include "rotalign/field.hpp"
#include "rotalign/propagator.hpp"

namespace rotalign {

inline constexpr int kOracleMaxDim = 256;
inline constexpr int kOracleSubsteps = 100;

namespace detail {

class OracleRhs {
  public:
    OracleRhs(const BasisDescriptor& basis, const FieldConfig& field)
        : field_(field),
          cos_op_(cos_theta_matrix(basis)),
          cos2_op_(cos2_theta_matrix(basis)),
          kinetic_(basis.dim),
          scratch_(basis.dim) {
        for (int r = 0; r < basis.dim; ++r) {
            const double j = basis.j_of(r);
            kinetic_[r] = j * (j + 1.0);
        }
    }

    // out = -i H(t) c
    void operator()(double t, const std::vector<complex>& c, std::vector<complex>& out) {
        const PotentialCoefficients pc = effective_couplings(t, field_);
        const int n = static_cast<int>(c.size());
        for (int r = 0; r < n; ++r) out[r] = (kinetic_[r] + pc.c0) * c[r];
        if (pc.c1 != 0.0) {
            cos_op_.apply(c, scratch_);
            for (int r = 0; r < n; ++r) out[r] += pc.c1 * scratch_[r];
        }
        if (pc.c2 != 0.0) {
            cos2_op_.apply(c, scratch_);
            for (int r = 0; r < n; ++r) out[r] += pc.c2 * scratch_[r];
        }
        const complex minus_i{0.0, -1.0};
        for (int r = 0; r < n; ++r) out[r] *= minus_i;
    }

  private:
    const FieldConfig& field_;
    BandedOperator cos_op_;
    BandedOperator cos2_op_;
    std::vector<double> kinetic_;
    std::vector<complex> scratch_;
};

class Rk4 {
  public:
    explicit Rk4(int dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

    void advance(OracleRhs& rhs, double t, double h, std::vector<complex>& y) {
        const int n = static_cast<int>(y.size());
        rhs(t, y, k1_);
        for (int r = 0; r < n; ++r) tmp_[r] = y[r] + 0.5 * h * k1_[r];
        rhs(t + 0.5 * h, tmp_, k2_);
        for (int r = 0; r < n; ++r) tmp_[r] = y[r] + 0.5 * h * k2_[r];
        rhs(t + 0.5 * h, tmp_, k3_);
        for (int r = 0; r < n; ++r) tmp_[r] = y[r] + h * k3_[r];
        rhs(t + h, tmp_, k4_);
        const double sixth = h / 6.0;
        for (int r = 0; r < n; ++r) {
            y[r] += sixth * (k1_[r] + 2.0 * k2_[r] + 2.0 * k3_[r] + k4_[r]);
        }
    }

  private:
    std::vector<complex> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace detail

// Same recording contract as propagate(); records land on the plan's dt grid
// while integration substeps at plan.dt / 100.
inline TimeSeries oracle_propagate(const SpectralState& initial, const PropagationPlan& plan) {
    validate(plan);
    if (initial.basis != plan.grid.basis) {
        throw std::invalid_argument("oracle_propagate: state basis does not match plan grid basis");
    }
    if (initial.basis.dim > kOracleMaxDim) {
        throw std::invalid_argument("oracle_propagate: basis dim " +
                                    std::to_string(initial.basis.dim) +
                                    " exceeds the dense-method guard of " +
                                    std::to_string(kOracleMaxDim));
    }

    detail::OracleRhs rhs(initial.basis, plan.field);
    detail::Rk4 rk4(initial.basis.dim);
    detail::RecordingContext ctx(plan);
    const auto schedule = detail::make_schedule(plan.t_start, plan.t_end, plan.dt);

    SpectralState state = initial;
    TimeSeries out;
    ctx.record(out, state, plan.t_start);

    auto advance_interval = [&](double t0, double width) {
        const double h = width / kOracleSubsteps;
        for (int s = 0; s < kOracleSubsteps; ++s) {
            rk4.advance(rhs, t0 + s * h, h, state.coefficients);
        }
    };

    for (std::int64_t k = 1; k <= schedule.n_full; ++k) {
        advance_interval(plan.t_start + static_cast<double>(k - 1) * plan.dt, plan.dt);
        if (k % plan.record_every == 0) {
            const bool last = k == schedule.n_full && schedule.remainder == 0.0;
            ctx.record(out, state, last ? plan.t_end : plan.t_start + static_cast<double>(k) * plan.dt);
        }
    }
    if (schedule.remainder > 0.0) {
        advance_interval(plan.t_start + static_cast<double>(schedule.n_full) * plan.dt,
                         schedule.remainder);
        ctx.record(out, state, plan.t_end);
    } else if (schedule.n_full % plan.record_every != 0) {
        ctx.record(out, state, plan.t_end);
    }
    ctx.finish(out);
    return out;
}

}  // namespace rotalign
