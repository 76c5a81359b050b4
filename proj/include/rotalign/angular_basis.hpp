#pragma once

// Fixed-M spherical-harmonic machinery: normalized associated Legendre
// functions, banded cos(theta)/cos^2(theta) operators, the Gauss-Legendre
// collocation grid and the spectral<->grid transform pair.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotalign {

using complex = std::complex<double>;

// Truncated basis {Y_{J,M} : |m| <= J <= j_max} at fixed magnetic quantum
// number m. The azimuthal factor e^{im phi}/sqrt(2 pi) is carried
// analytically; states live on the theta part only.
struct BasisDescriptor {
    int j_max = 0;
    int m = 0;
    int dim = 1;

    int j_min() const { return std::abs(m); }
    int j_of(int index) const { return j_min() + index; }
    int index_of(int j) const { return j - j_min(); }

    friend bool operator==(const BasisDescriptor&, const BasisDescriptor&) = default;
};

inline BasisDescriptor build_basis(int j_max, int m) {
    if (j_max < std::abs(m)) {
        throw std::invalid_argument("build_basis: j_max (" + std::to_string(j_max) +
                                    ") must be >= |m| (" + std::to_string(std::abs(m)) + ")");
    }
    return BasisDescriptor{j_max, m, j_max - std::abs(m) + 1};
}

// Theta part of Y_{j,m}, normalized so that the square integrates to one
// over x = cos(theta) in [-1, 1]. Evaluated by the normalized three-term
// recurrence upward in j from the closed-form seed at j = |m|; stable far
// beyond any j used here. Depends on m only through |m| (Condon-Shortley
// phase included on the seed).
inline double normalized_assoc_legendre(int j, int m, double x) {
    const int mm = std::abs(m);
    if (j < mm) {
        throw std::domain_error("normalized_assoc_legendre: j (" + std::to_string(j) +
                                ") must be >= |m| (" + std::to_string(mm) + ")");
    }
    if (!(x >= -1.0 && x <= 1.0)) {
        throw std::domain_error("normalized_assoc_legendre: x must lie in [-1, 1]");
    }

    // seed: N_{|m|}^{|m|}(x) = (-1)^|m| sqrt((2|m|+1)/2 * (2|m|-1)!!/(2|m|)!!) (1-x^2)^{|m|/2}
    double p = std::sqrt(0.5);
    const double sx = std::sqrt((1.0 - x) * (1.0 + x));
    for (int k = 1; k <= mm; ++k) {
        p *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sx;
    }
    if (j == mm) return p;

    // upward in l; the l = |m|+1 step has a vanishing second-term coefficient
    double p_prev = 0.0;
    for (int l = mm + 1; l <= j; ++l) {
        const double lm = static_cast<double>(l) * l - static_cast<double>(mm) * mm;
        const double a = std::sqrt((4.0 * l * l - 1.0) / lm);
        const double b = std::sqrt((2.0 * l + 1.0) * (l - 1.0 + mm) * (l - 1.0 - mm) /
                                   ((2.0 * l - 3.0) * lm));
        const double p_next = a * x * p - b * p_prev;
        p_prev = p;
        p = p_next;
    }
    return p;
}

// Real symmetric banded operator over a fixed-m basis. diagonals[d][i]
// holds element (i, i+d); diagonals[0] is the main diagonal.
struct BandedOperator {
    int half_bandwidth = 0;
    std::vector<std::vector<double>> diagonals;

    int dim() const { return static_cast<int>(diagonals.at(0).size()); }

    double element(int i, int j) const {
        if (i > j) std::swap(i, j);
        const int d = j - i;
        if (d > half_bandwidth) return 0.0;
        return diagonals[d][static_cast<std::size_t>(i)];
    }

    // c^dagger A c; real for Hermitian quadratic forms over a real symmetric A.
    double quadratic_form(const std::vector<complex>& c) const {
        const int n = dim();
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += diagonals[0][i] * std::norm(c[i]);
        for (int d = 1; d <= half_bandwidth; ++d) {
            for (int i = 0; i + d < n; ++i) {
                acc += 2.0 * diagonals[d][i] * (std::conj(c[i]) * c[i + d]).real();
            }
        }
        return acc;
    }

    // out = A in (symmetric banded matvec)
    void apply(const std::vector<complex>& in, std::vector<complex>& out) const {
        const int n = dim();
        out.assign(in.size(), complex{0.0, 0.0});
        for (int i = 0; i < n; ++i) out[i] = diagonals[0][i] * in[i];
        for (int d = 1; d <= half_bandwidth; ++d) {
            for (int i = 0; i + d < n; ++i) {
                out[i] += diagonals[d][i] * in[i + d];
                out[i + d] += diagonals[d][i] * in[i];
            }
        }
    }
};

// <j,m|cos(theta)|j+1,m> = sqrt(((j+1)^2 - m^2) / ((2j+1)(2j+3)))
inline double cos_theta_coupling(int j, int m) {
    const double jp = j + 1.0;
    return std::sqrt((jp * jp - static_cast<double>(m) * m) / ((2.0 * j + 1.0) * (2.0 * j + 3.0)));
}

// cos(theta) in the fixed-m basis: symmetric tridiagonal, zero main
// diagonal (parity selection rule).
inline BandedOperator cos_theta_matrix(const BasisDescriptor& basis) {
    BandedOperator op;
    op.half_bandwidth = 1;
    op.diagonals.resize(2);
    op.diagonals[0].assign(basis.dim, 0.0);
    op.diagonals[1].resize(basis.dim > 0 ? basis.dim - 1 : 0);
    for (int i = 0; i + 1 < basis.dim; ++i) {
        op.diagonals[1][i] = cos_theta_coupling(basis.j_of(i), basis.m);
    }
    return op;
}

// cos^2(theta): symmetric pentadiagonal coupling J with J and J+-2, built
// from closed-form elements. Note the edge rows differ from squaring the
// truncated cos(theta) matrix: the diagonal at J = j_max-1, j_max keeps the
// |j_max+1> intermediate contribution that truncation would drop.
inline BandedOperator cos2_theta_matrix(const BasisDescriptor& basis) {
    BandedOperator op;
    op.half_bandwidth = 2;
    op.diagonals.resize(3);
    op.diagonals[0].resize(basis.dim);
    op.diagonals[1].assign(basis.dim > 1 ? basis.dim - 1 : 0, 0.0);
    op.diagonals[2].resize(basis.dim > 2 ? basis.dim - 2 : 0);
    const double m2 = static_cast<double>(basis.m) * basis.m;
    for (int i = 0; i < basis.dim; ++i) {
        const int j = basis.j_of(i);
        op.diagonals[0][i] =
            1.0 / 3.0 + (2.0 / 3.0) * (j * (j + 1.0) - 3.0 * m2) / ((2.0 * j + 3.0) * (2.0 * j - 1.0));
    }
    for (int i = 0; i + 2 < basis.dim; ++i) {
        const int j = basis.j_of(i);
        op.diagonals[2][i] = cos_theta_coupling(j, basis.m) * cos_theta_coupling(j + 1, basis.m);
    }
    return op;
}

// Gauss-Legendre nodes/weights in x = cos(theta) plus the precomputed,
// weight-premultiplied Legendre table for the basis the grid serves.
struct AngularGrid {
    BasisDescriptor basis;
    std::vector<double> nodes;    // strictly increasing, in (-1, 1)
    std::vector<double> weights;  // > 0, sum to 2
    // row-major dim x n_nodes; row = basis index, column = node index
    std::vector<double> legendre_table;
    std::vector<double> weighted_table;  // weights[k] * legendre_table[r][k]

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    double table(int row, int k) const { return legendre_table[static_cast<std::size_t>(row) * nodes.size() + k]; }
};

namespace detail {

// Newton iteration on P_n; nodes are mirrored in pairs so the grid is
// exactly symmetric about x = 0.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        if (n % 2 == 1 && i == half - 1) x = 0.0;  // middle root is exact
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // roots are visited from +1 inward; store the mirrored pair
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

}  // namespace detail

namespace detail {

// The raw table satisfies T W T^T = I only up to ~1e-13 of accumulated
// rounding, and that fixed bias compounds into a visible norm drift over
// 1e5-step propagations. A Newton step of G^(-1/2), C = (3I - G)/2, is
// exact to O(|G - I|^2); a second pass mops up the storage rounding of the
// first, leaving the stored table's Gram bias at the 1e-17 level.
inline void reorthonormalize_pass(int dim, int n, std::vector<double>& table,
                                  const std::vector<double>& weights) {
    std::vector<double> gram(static_cast<std::size_t>(dim) * dim, 0.0);
    for (int a = 0; a < dim; ++a) {
        const double* ra = table.data() + static_cast<std::size_t>(a) * n;
        for (int b = a; b < dim; ++b) {
            const double* rb = table.data() + static_cast<std::size_t>(b) * n;
            long double acc = 0.0L;
            for (int k = 0; k < n; ++k) acc += weights[k] * ra[k] * rb[k];
            const double g = static_cast<double>(acc);
            gram[static_cast<std::size_t>(a) * dim + b] = g;
            gram[static_cast<std::size_t>(b) * dim + a] = g;
        }
    }
    std::vector<double> corrected(table.size(), 0.0);
    for (int r = 0; r < dim; ++r) {
        for (int s = 0; s < dim; ++s) {
            const double g = gram[static_cast<std::size_t>(r) * dim + s];
            const double c = r == s ? 1.5 - 0.5 * g : -0.5 * g;
            if (c == 0.0) continue;
            const double* row = table.data() + static_cast<std::size_t>(s) * n;
            double* out = corrected.data() + static_cast<std::size_t>(r) * n;
            for (int k = 0; k < n; ++k) out[k] += c * row[k];
        }
    }
    table = std::move(corrected);
}

}  // namespace detail

inline AngularGrid build_quadrature(int n_nodes, const BasisDescriptor& basis) {
    if (n_nodes < basis.j_max + 1) {
        throw std::invalid_argument("build_quadrature: n_nodes (" + std::to_string(n_nodes) +
                                    ") insufficient; need >= j_max + 1 = " +
                                    std::to_string(basis.j_max + 1));
    }
    AngularGrid grid;
    grid.basis = basis;
    detail::gauss_legendre(n_nodes, grid.nodes, grid.weights);
    grid.legendre_table.resize(static_cast<std::size_t>(basis.dim) * n_nodes);
    for (int r = 0; r < basis.dim; ++r) {
        const int j = basis.j_of(r);
        for (int k = 0; k < n_nodes; ++k) {
            grid.legendre_table[static_cast<std::size_t>(r) * n_nodes + k] =
                normalized_assoc_legendre(j, basis.m, grid.nodes[k]);
        }
    }
    detail::reorthonormalize_pass(basis.dim, n_nodes, grid.legendre_table, grid.weights);
    detail::reorthonormalize_pass(basis.dim, n_nodes, grid.legendre_table, grid.weights);
    grid.weighted_table.resize(grid.legendre_table.size());
    for (int r = 0; r < basis.dim; ++r) {
        for (int k = 0; k < n_nodes; ++k) {
            grid.weighted_table[static_cast<std::size_t>(r) * n_nodes + k] =
                grid.weights[k] * grid.legendre_table[static_cast<std::size_t>(r) * n_nodes + k];
        }
    }
    return grid;
}

// Wavefunction in the truncated spectral basis. The isotropic part of the
// interaction only ever contributes a global phase, which is tracked as a
// separate scalar so it cannot contaminate the coefficients numerically.
struct SpectralState {
    std::vector<complex> coefficients;
    BasisDescriptor basis;
    double global_phase = 0.0;

    double norm_squared() const {
        double acc = 0.0;
        for (const auto& c : coefficients) acc += std::norm(c);
        return acc;
    }
    double norm() const { return std::sqrt(norm_squared()); }
};

// psi(x_k) = sum_J c_J N_J^M(x_k)  (synthesis; exact for band-limited states)
inline std::vector<complex> spectral_to_grid(const SpectralState& state, const AngularGrid& grid) {
    if (state.basis != grid.basis) {
        throw std::invalid_argument("spectral_to_grid: state basis does not match grid basis");
    }
    const int n = grid.n_nodes();
    std::vector<complex> values(static_cast<std::size_t>(n), complex{0.0, 0.0});
    for (int r = 0; r < state.basis.dim; ++r) {
        const complex c = state.coefficients[r];
        const double* row = grid.legendre_table.data() + static_cast<std::size_t>(r) * n;
        for (int k = 0; k < n; ++k) values[k] += c * row[k];
    }
    return values;
}

// c_J = sum_k w_k N_J^M(x_k) psi(x_k)  (analysis; inverse of synthesis on
// band-limited data, orthogonal projection otherwise)
inline SpectralState grid_to_spectral(const std::vector<complex>& values, const AngularGrid& grid) {
    const int n = grid.n_nodes();
    if (static_cast<int>(values.size()) != n) {
        throw std::invalid_argument("grid_to_spectral: expected " + std::to_string(n) +
                                    " node values, got " + std::to_string(values.size()));
    }
    SpectralState state;
    state.basis = grid.basis;
    state.coefficients.resize(grid.basis.dim);
    for (int r = 0; r < grid.basis.dim; ++r) {
        const double* row = grid.weighted_table.data() + static_cast<std::size_t>(r) * n;
        complex acc{0.0, 0.0};
        for (int k = 0; k < n; ++k) acc += row[k] * values[k];
        state.coefficients[r] = acc;
    }
    return state;
}

}  // namespace rotalign
