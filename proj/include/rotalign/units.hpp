#pragma once

// Conversion between laboratory quantities and the dimensionless couplings
// and times used everywhere else. The solver core never sees SI units.
//
// Conventions: rotational constant in cm^-1, dipole moment in Debye,
// polarizability volumes in Angstrom^3, intensity in W/cm^2, durations in
// seconds. Times are measured in hbar/B, energies in B.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rotalign/field.hpp"

namespace rotalign {

namespace constants {
// CODATA 2018
inline constexpr double planck = 6.62607015e-34;  // J s (exact)
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
inline constexpr double speed_of_light = 2.99792458e8;  // m/s (exact)
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double debye = 3.33564095e-30;         // C m
inline constexpr double angstrom3 = 1e-30;              // m^3
}  // namespace constants

struct PhysicalMolecule {
    double rotational_constant_invcm = 0.0;
    double dipole_debye = 0.0;
    double alpha_parallel_angstrom3 = 0.0;
    double alpha_perp_angstrom3 = 0.0;
};

inline void validate(const PhysicalMolecule& mol) {
    if (!(mol.rotational_constant_invcm > 0.0)) {
        throw std::invalid_argument("PhysicalMolecule: rotational_constant must be > 0");
    }
    if (mol.alpha_parallel_angstrom3 < 0.0 || mol.alpha_perp_angstrom3 < 0.0) {
        throw std::invalid_argument("PhysicalMolecule: polarizabilities must be >= 0");
    }
    if (mol.alpha_parallel_angstrom3 < mol.alpha_perp_angstrom3) {
        throw std::invalid_argument(
            "PhysicalMolecule: alpha_parallel must be >= alpha_perp (negative anisotropy "
            "is outside this model)");
    }
    if (mol.dipole_debye < 0.0) {
        throw std::invalid_argument("PhysicalMolecule: dipole_moment must be >= 0");
    }
}

struct DimensionlessDrive {
    CouplingSet couplings;
    double tau_fwhm = 0.0;  // units of hbar/B
};

namespace detail {

inline double rotational_constant_joule(const PhysicalMolecule& mol) {
    // cm^-1 -> J: E = h c (100 * nu_tilde)
    return constants::planck * constants::speed_of_light * 100.0 * mol.rotational_constant_invcm;
}

inline double peak_field_si(double peak_intensity_w_cm2) {
    // I = (1/2) eps0 c F^2, intensity in W/m^2
    const double intensity_si = peak_intensity_w_cm2 * 1e4;
    return std::sqrt(2.0 * intensity_si /
                     (constants::vacuum_permittivity * constants::speed_of_light));
}

inline double polarizability_si(double volume_angstrom3) {
    // polarizability volume -> SI: alpha = 4 pi eps0 * volume
    return 4.0 * std::numbers::pi * constants::vacuum_permittivity * volume_angstrom3 *
           constants::angstrom3;
}

}  // namespace detail

inline DimensionlessDrive to_dimensionless(const PhysicalMolecule& mol,
                                           double peak_intensity_w_cm2, double tau_fwhm_s) {
    validate(mol);
    if (!(peak_intensity_w_cm2 > 0.0)) {
        throw std::invalid_argument("to_dimensionless: peak_intensity must be > 0");
    }
    if (!(tau_fwhm_s > 0.0)) {
        throw std::invalid_argument("to_dimensionless: tau_fwhm must be > 0");
    }
    const double b = detail::rotational_constant_joule(mol);
    const double f = detail::peak_field_si(peak_intensity_w_cm2);
    const double dalpha =
        detail::polarizability_si(mol.alpha_parallel_angstrom3 - mol.alpha_perp_angstrom3);
    const double alpha_perp = detail::polarizability_si(mol.alpha_perp_angstrom3);
    DimensionlessDrive drive;
    drive.couplings.delta_omega = f * f * dalpha / (2.0 * b);
    drive.couplings.delta_omega_mu = mol.dipole_debye * constants::debye * f / b;
    drive.couplings.delta_omega_perp = alpha_perp * f * f / (2.0 * b);
    drive.tau_fwhm = b * tau_fwhm_s / constants::hbar;
    return drive;
}

struct LabDrive {
    double peak_intensity_w_cm2 = 0.0;
    double tau_fwhm_s = 0.0;
};

// Inverse of to_dimensionless on (intensity, duration); needs a nonzero
// polarizability anisotropy to pin the intensity.
inline LabDrive from_dimensionless(const PhysicalMolecule& mol, double delta_omega,
                                   double tau_fwhm) {
    validate(mol);
    if (!(delta_omega > 0.0) || !(tau_fwhm > 0.0)) {
        throw std::invalid_argument("from_dimensionless: delta_omega and tau_fwhm must be > 0");
    }
    const double dalpha =
        detail::polarizability_si(mol.alpha_parallel_angstrom3 - mol.alpha_perp_angstrom3);
    if (!(dalpha > 0.0)) {
        throw std::invalid_argument(
            "from_dimensionless: alpha_parallel must exceed alpha_perp to invert delta_omega");
    }
    const double b = detail::rotational_constant_joule(mol);
    const double f_squared = delta_omega * 2.0 * b / dalpha;
    const double intensity_si =
        0.5 * constants::vacuum_permittivity * constants::speed_of_light * f_squared;
    return {intensity_si * 1e-4, tau_fwhm * constants::hbar / b};
}

}  // namespace rotalign
