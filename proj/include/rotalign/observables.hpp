#pragma once

// Alignment/orientation cosines, rotational populations and norm, computed
// from the spectral coefficients (banded quadratic forms) with a grid-side
// evaluation kept as a cross-check.

#include <vector>

#include "rotalign/angular_basis.hpp"

namespace rotalign {

struct ObservableRecord {
    double t = 0.0;
    double alignment = 0.0;    // <cos^2 theta>
    double orientation = 0.0;  // <cos theta>
    double norm = 0.0;
    double field = 0.0;        // f(t), or the cycle-averaged f^2 proxy
    std::vector<double> populations;  // |c_J|^2, recorded only when enabled
};

inline double alignment_cosine(const SpectralState& state, const BandedOperator& cos2_op) {
    return cos2_op.quadratic_form(state.coefficients);
}

inline double alignment_cosine(const SpectralState& state) {
    return alignment_cosine(state, cos2_theta_matrix(state.basis));
}

inline double orientation_cosine(const SpectralState& state, const BandedOperator& cos_op) {
    return cos_op.quadratic_form(state.coefficients);
}

inline double orientation_cosine(const SpectralState& state) {
    return orientation_cosine(state, cos_theta_matrix(state.basis));
}

inline std::vector<double> populations(const SpectralState& state) {
    std::vector<double> p(state.coefficients.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state.coefficients[i]);
    return p;
}

// Grid-side evaluations: sum_k w_k x_k^p |psi(x_k)|^2. Exact for states in
// the basis as long as the grid integrates degree 2 j_max + 2.
inline double alignment_cosine_grid(const SpectralState& state, const AngularGrid& grid) {
    const auto values = spectral_to_grid(state, grid);
    double acc = 0.0;
    for (int k = 0; k < grid.n_nodes(); ++k) {
        acc += grid.weights[k] * grid.nodes[k] * grid.nodes[k] * std::norm(values[k]);
    }
    return acc;
}

inline double orientation_cosine_grid(const SpectralState& state, const AngularGrid& grid) {
    const auto values = spectral_to_grid(state, grid);
    double acc = 0.0;
    for (int k = 0; k < grid.n_nodes(); ++k) {
        acc += grid.weights[k] * grid.nodes[k] * std::norm(values[k]);
    }
    return acc;
}

}  // namespace rotalign
