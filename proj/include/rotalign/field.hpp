#pragma once

// Two-color drive: Gaussian pulse envelopes, the biharmonic carrier, and the
// reduction of the interaction to time-dependent cos/cos^2 coefficients in
// either full-carrier or cycle-averaged form.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotalign {

// One harmonic of the drive. Amplitudes are relative to the peak envelope of
// the fundamental, which is 1 by definition.
struct PulseSpec {
    double relative_amplitude = 1.0;
    double tau_fwhm = 1.0;      // envelope FWHM, dimensionless time
    double center = 0.0;        // envelope peak time
    int carrier_multiple = 1;   // 1 for omega, 2 for 2*omega
    double carrier_delay = 0.0; // delay inside the carrier phase
};

inline void validate(const PulseSpec& p) {
    if (!(p.tau_fwhm > 0.0)) throw std::invalid_argument("PulseSpec: tau_fwhm must be > 0");
    if (!(p.relative_amplitude >= 0.0)) {
        throw std::invalid_argument("PulseSpec: relative_amplitude must be >= 0");
    }
    if (p.carrier_multiple != 1 && p.carrier_multiple != 2) {
        throw std::invalid_argument("PulseSpec: carrier_multiple must be 1 or 2");
    }
}

// Dimensionless interaction strengths, everything in units of the rotational
// constant with fields in units of the fundamental's peak:
//   delta_omega      = max(F1)^2 * dalpha / (2B)   (anisotropic polarizability)
//   delta_omega_mu   = mu * max(F1) / B            (permanent dipole)
//   delta_omega_perp = alpha_perp * max(F1)^2 / (2B)  (isotropic, phase only)
struct CouplingSet {
    double delta_omega = 0.0;
    double delta_omega_mu = 0.0;
    double delta_omega_perp = 0.0;
};

inline void validate(const CouplingSet& c) {
    if (!(c.delta_omega >= 0.0) || !std::isfinite(c.delta_omega) ||
        !(c.delta_omega_mu >= 0.0) || !std::isfinite(c.delta_omega_mu) ||
        !(c.delta_omega_perp >= 0.0) || !std::isfinite(c.delta_omega_perp)) {
        throw std::invalid_argument("CouplingSet: couplings must be finite and >= 0");
    }
}

enum class InteractionMode { FullCarrier, CycleAveraged };

struct FieldConfig {
    std::vector<PulseSpec> pulses;
    CouplingSet couplings;
    double carrier_omega = 0.0;  // fundamental, units of B/hbar; used by FullCarrier only
    InteractionMode mode = InteractionMode::CycleAveraged;
};

inline void validate(const FieldConfig& f) {
    for (const auto& p : f.pulses) validate(p);
    validate(f.couplings);
    if (f.mode == InteractionMode::CycleAveraged && f.couplings.delta_omega_mu > 0.0) {
        throw std::invalid_argument(
            "FieldConfig: delta_omega_mu > 0 has no effect in CycleAveraged mode "
            "(the dipole term averages to zero over a carrier cycle); use FullCarrier");
    }
    if (f.mode == InteractionMode::FullCarrier && !(f.carrier_omega > 0.0)) {
        throw std::invalid_argument("FieldConfig: FullCarrier mode requires carrier_omega > 0");
    }
}

// Gaussian envelope, amplitude convention of the squared-field FWHM: the
// envelope itself is exp(-2 ln2 u^2/tau^2) so that envelope^2 has FWHM tau.
inline double envelope(double t, const PulseSpec& pulse) {
    const double u = t - pulse.center;
    return pulse.relative_amplitude *
           std::exp(-2.0 * std::numbers::ln2 * u * u / (pulse.tau_fwhm * pulse.tau_fwhm));
}

// Instantaneous field in units of max(F1); defined only with a carrier.
inline double field_value(double t, const FieldConfig& config) {
    if (config.mode != InteractionMode::FullCarrier) {
        throw std::logic_error(
            "field_value: instantaneous field is undefined in CycleAveraged mode; "
            "call effective_couplings instead");
    }
    double f = 0.0;
    for (const auto& p : config.pulses) {
        f += envelope(t, p) * std::cos(p.carrier_multiple * config.carrier_omega * (t - p.carrier_delay));
    }
    return f;
}

// V(theta, t) = c1 cos(theta) + c2 cos^2(theta) + c0
struct PotentialCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;
    double c0 = 0.0;
};

inline PotentialCoefficients effective_couplings(double t, const FieldConfig& config) {
    const CouplingSet& cs = config.couplings;
    if (config.mode == InteractionMode::FullCarrier) {
        const double f = field_value(t, config);
        return {-cs.delta_omega_mu * f, -cs.delta_omega * f * f, -cs.delta_omega_perp * f * f};
    }
    // Cycle average: <cos^2> = 1/2 per harmonic, the omega/2*omega cross term
    // and the dipole term average to zero.
    double s = 0.0;
    for (const auto& p : config.pulses) {
        const double g = envelope(t, p);
        s += 0.5 * g * g;
    }
    return {0.0, -cs.delta_omega * s, -cs.delta_omega_perp * s};
}

// What the time-series "field" column records: the instantaneous field in
// FullCarrier mode, the cycle-averaged squared envelope in CycleAveraged mode.
inline double field_record_value(double t, const FieldConfig& config) {
    if (config.mode == InteractionMode::FullCarrier) return field_value(t, config);
    double s = 0.0;
    for (const auto& p : config.pulses) {
        const double g = envelope(t, p);
        s += 0.5 * g * g;
    }
    return s;
}

}  // namespace rotalign
