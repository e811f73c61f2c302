#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "holodisc/fourier.hpp"
#include "holodisc/grid.hpp"
#include "holodisc/poly.hpp"

namespace holodisc {

/// Thrown when a transform cannot meet the tolerance requested for its
/// projection step.
struct TransformToleranceError : std::runtime_error {
    TransformToleranceError(double requested, double achieved)
        : std::runtime_error("transform projection residual " + std::to_string(achieved) +
                             " exceeds requested tolerance " + std::to_string(requested)),
          requested_tol(requested), residual(achieved) {}
    double requested_tol;
    double residual;
};

/// Cauchy transform of boundary data: by residue calculus the mode
/// e^{im theta} goes to z^m for m >= 0 and to 0 for m < 0.
inline PolyMap cauchy(const Fourier& phi) {
    PolyMap out(phi.n());
    for (int j = 0; j < phi.n(); ++j)
        for (int m = 0; m <= phi.max_mode(); ++m) {
            const Complex c = phi.coeff(m, j);
            if (c != 0.0) out[j].set_coeff(m, 0, c);
        }
    return out;
}

/// Exact Cauchy-Green transform of a polynomial: with H the primitive of h
/// with respect to zbar, T h = H(z, zbar) - K(H|_S).
inline Poly cauchy_green_poly(const Poly& h) {
    const Poly H = h.antiderivative_zbar();
    const Fourier trace = boundary_trace(H);
    Poly out = H;
    for (int m = 0; m <= trace.max_mode(); ++m) {
        const Complex c = trace.coeff(m, 0);
        if (c != 0.0) out.add_coeff(m, 0, -c);
    }
    return out;
}

inline PolyMap cauchy_green_poly(const PolyMap& h) {
    PolyMap out(h.n());
    for (int j = 0; j < h.n(); ++j) out[j] = cauchy_green_poly(h[j]);
    return out;
}

/// Cauchy-Green transform on the grid.  Spectral input dispatches to the
/// exact polynomial path; plain collocation data is first projected onto the
/// spectral basis, and the projection residual stands in for the quadrature
/// error of the classical solid integral.  If required_tol is given and the
/// projection cannot reach it on this grid, throws TransformToleranceError.
inline GridFunction cauchy_green(const GridFunction& h,
                                 std::optional<double> required_tol = std::nullopt) {
    const GridFunction g = h.has_spectral() ? h : h.projected();
    if (required_tol && g.projection_residual() > *required_tol)
        throw TransformToleranceError(*required_tol, g.projection_residual());
    return GridFunction::from_poly(g.grid(), cauchy_green_poly(g.spectral()));
}

/// Schwarz transform: the holomorphic g with Re g|_S = psi and Im g(0) = 0.
/// For psi = sum c_m e^{im theta} real-valued this is c_0 + 2 sum_{m>0} c_m z^m.
inline PolyMap schwarz(const Fourier& psi, double real_tol = 1e-11) {
    if (!psi.is_real(real_tol)) throw std::invalid_argument("schwarz: boundary data must be real-valued");
    PolyMap out(psi.n());
    for (int j = 0; j < psi.n(); ++j) {
        const Complex c0 = psi.coeff(0, j);
        if (c0 != 0.0) out[j].set_coeff(0, 0, c0.real());
        for (int m = 1; m <= psi.max_mode(); ++m) {
            const Complex c = psi.coeff(m, j);
            if (c != 0.0) out[j].set_coeff(m, 0, 2.0 * c);
        }
    }
    return out;
}

/// Poisson (harmonic) extension of complex boundary data:
/// mode m >= 0 goes to z^m, mode m < 0 to zbar^{-m}; equivalently
/// P phi = Re T_SW(Re phi) + i Re T_SW(Im phi).
inline PolyMap poisson(const Fourier& phi) {
    PolyMap out(phi.n());
    for (int j = 0; j < phi.n(); ++j)
        for (int m = -phi.max_mode(); m <= phi.max_mode(); ++m) {
            const Complex c = phi.coeff(m, j);
            if (c == 0.0) continue;
            if (m >= 0) out[j].add_coeff(m, 0, c);
            else out[j].add_coeff(0, -m, c);
        }
    return out;
}

inline GridFunction cauchy(const Fourier& phi, GridPtr grid) {
    return GridFunction::from_poly(std::move(grid), cauchy(phi));
}

inline GridFunction schwarz(const Fourier& psi, GridPtr grid) {
    return GridFunction::from_poly(std::move(grid), schwarz(psi));
}

inline GridFunction poisson(const Fourier& phi, GridPtr grid) {
    return GridFunction::from_poly(std::move(grid), poisson(phi));
}

}  // namespace holodisc
