// Test-only oracles, independent of the coefficient-space transform rules:
// direct quadrature of the defining integrals and finite-difference
// derivatives.  Used to freeze expected values; never called by the library.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "holodisc/poly.hpp"

namespace oracles {

using holodisc::Complex;

/// Cauchy-Green transform by quadrature of the solid integral,
///   (T h)(z) = -(1/pi) integral_Delta h(tau) / (tau - z) dA(tau),
/// in polar coordinates recentered at the singularity, where the Jacobian
/// cancels the kernel: tau = z + rho e^{i phi} turns the integrand into
/// -(1/pi) h(tau) e^{-i phi}, smooth up to the boundary radius
///   R(phi) = -Re(conj(z) e^{i phi}) + sqrt(1 - Im(conj(z) e^{i phi})^2).
inline Complex cauchy_green_quadrature(const std::function<Complex(Complex)>& h, Complex z,
                                       int n_phi = 400, int n_rho = 400) {
    Complex acc(0.0);
    for (int i = 0; i < n_phi; ++i) {
        const double phi = 2.0 * std::numbers::pi * (i + 0.5) / n_phi;
        const Complex dir = std::polar(1.0, phi);
        const Complex w = std::conj(z) * dir;
        const double b = w.real();
        const double R = -b + std::sqrt(std::max(0.0, 1.0 - w.imag() * w.imag()));
        Complex inner(0.0);
        for (int j = 0; j < n_rho; ++j) {
            const double rho = R * (j + 0.5) / n_rho;
            inner += h(z + rho * dir);
        }
        acc += inner * (R / n_rho) * std::conj(dir);
    }
    return -acc * (2.0 * std::numbers::pi / n_phi) / std::numbers::pi;
}

/// Schwarz transform by trapezoid quadrature of the boundary integral
/// (spectrally accurate for |z| < 1):
///   (T_SW psi)(z) = (1/2pi) int (e^{it} + z)/(e^{it} - z) psi(e^{it}) dt.
inline Complex schwarz_quadrature(const std::function<double(double)>& psi, Complex z,
                                  int n = 4096) {
    Complex acc(0.0);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        const Complex e = std::polar(1.0, t);
        acc += (e + z) / (e - z) * psi(t);
    }
    return acc / static_cast<double>(n);
}

/// Cauchy transform of boundary data by trapezoid quadrature.
inline Complex cauchy_quadrature(const std::function<Complex(double)>& phi, Complex z,
                                 int n = 4096) {
    Complex acc(0.0);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        const Complex e = std::polar(1.0, t);
        acc += phi(t) * e / (e - z);
    }
    return acc / static_cast<double>(n);
}

/// Fourth-order central-difference d/dzbar of a callable.
inline Complex fd_dbar(const std::function<Complex(Complex)>& f, Complex z, double h = 1e-3) {
    const Complex I(0.0, 1.0);
    const Complex fx =
        (-f(z + 2 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2 * h)) / (12.0 * h);
    const Complex fy = (-f(z + 2 * h * I) + 8.0 * f(z + h * I) - 8.0 * f(z - h * I) +
                        f(z - 2 * h * I)) /
                       (12.0 * h);
    return 0.5 * (fx + I * fy);
}

/// Area integral of a scalar function over the unit disc by a fine polar
/// midpoint rule (independent of the grid quadrature weights).
inline double disc_integral(const std::function<double(Complex)>& f, int n_r = 800, int n_t = 800) {
    double acc = 0.0;
    for (int i = 0; i < n_r; ++i) {
        const double r = (i + 0.5) / n_r;
        double ring = 0.0;
        for (int j = 0; j < n_t; ++j)
            ring += f(std::polar(r, 2.0 * std::numbers::pi * (j + 0.5) / n_t));
        acc += ring * r;
    }
    return acc * (1.0 / n_r) * (2.0 * std::numbers::pi / n_t);
}

}  // namespace oracles
