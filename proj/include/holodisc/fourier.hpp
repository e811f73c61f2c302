#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "holodisc/poly.hpp"

namespace holodisc {

/// C^n-valued trigonometric polynomial on the unit circle,
/// f(theta) = sum_{m=-M..M} c_m e^{i m theta}.  A real-valued function has
/// c_{-m} = conj(c_m) for every mode and component.
class Fourier {
public:
    Fourier() : n_(1), M_(0), c_(1, Complex(0.0)) {}

    Fourier(int n, int max_mode) : n_(n), M_(max_mode) {
        if (n < 1 || max_mode < 0) throw std::invalid_argument("Fourier: bad shape");
        c_.assign(static_cast<size_t>(2 * M_ + 1) * n_, Complex(0.0));
    }

    static Fourier zero(int n = 1, int max_mode = 0) { return Fourier(n, max_mode); }

    static Fourier constant(Complex c) {
        Fourier f(1, 0);
        f.set_coeff(0, 0, c);
        return f;
    }

    /// cos(m theta) as a real boundary function (scalar).
    static Fourier cosine(int m, double amp = 1.0) {
        Fourier f(1, std::abs(m));
        f.add_coeff(m, 0, amp / 2.0);
        f.add_coeff(-m, 0, amp / 2.0);
        return f;
    }

    /// sin(m theta) as a real boundary function (scalar).
    static Fourier sine(int m, double amp = 1.0) {
        Fourier f(1, std::abs(m));
        f.add_coeff(m, 0, Complex(0.0, -amp / 2.0));
        f.add_coeff(-m, 0, Complex(0.0, amp / 2.0));
        return f;
    }

    int n() const { return n_; }
    int max_mode() const { return M_; }

    Complex coeff(int m, int component = 0) const {
        if (component < 0 || component >= n_) throw std::out_of_range("Fourier: component");
        if (std::abs(m) > M_) return 0.0;
        return c_[idx(m, component)];
    }

    void set_coeff(int m, int component, Complex v) {
        ensure_mode(std::abs(m));
        c_[idx(m, component)] = v;
    }

    void add_coeff(int m, int component, Complex v) {
        ensure_mode(std::abs(m));
        c_[idx(m, component)] += v;
    }

    std::vector<Complex> eval(double theta) const {
        std::vector<Complex> v(static_cast<size_t>(n_), Complex(0.0));
        for (int m = -M_; m <= M_; ++m) {
            const Complex e = std::polar(1.0, m * theta);
            for (int j = 0; j < n_; ++j) v[static_cast<size_t>(j)] += coeff(m, j) * e;
        }
        return v;
    }

    bool is_real(double tol = 1e-12) const {
        for (int m = 0; m <= M_; ++m)
            for (int j = 0; j < n_; ++j)
                if (std::abs(coeff(-m, j) - std::conj(coeff(m, j))) > tol) return false;
        return true;
    }

    Fourier real_part() const {
        Fourier r(n_, M_);
        for (int m = -M_; m <= M_; ++m)
            for (int j = 0; j < n_; ++j)
                r.set_coeff(m, j, 0.5 * (coeff(m, j) + std::conj(coeff(-m, j))));
        return r;
    }

    Fourier imag_part() const {
        Fourier r(n_, M_);
        const Complex half_over_i(0.0, -0.5);
        for (int m = -M_; m <= M_; ++m)
            for (int j = 0; j < n_; ++j)
                r.set_coeff(m, j, half_over_i * (coeff(m, j) - std::conj(coeff(-m, j))));
        return r;
    }

    /// Max over a dense angular sample of the componentwise modulus.
    double sup_norm(int oversample = 8) const {
        const int N = std::max(64, oversample * (2 * M_ + 1));
        double s = 0.0;
        for (int i = 0; i < N; ++i) {
            const auto v = eval(2.0 * std::numbers::pi * i / N);
            for (const Complex& x : v) s = std::max(s, std::abs(x));
        }
        return s;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const Complex& c : c_) m = std::max(m, std::abs(c));
        return m;
    }

    Fourier& operator+=(const Fourier& o) {
        check_n(o);
        ensure_mode(o.M_);
        for (int m = -o.M_; m <= o.M_; ++m)
            for (int j = 0; j < n_; ++j) c_[idx(m, j)] += o.coeff(m, j);
        return *this;
    }
    Fourier& operator-=(const Fourier& o) {
        check_n(o);
        ensure_mode(o.M_);
        for (int m = -o.M_; m <= o.M_; ++m)
            for (int j = 0; j < n_; ++j) c_[idx(m, j)] -= o.coeff(m, j);
        return *this;
    }
    Fourier& operator*=(Complex s) {
        for (Complex& c : c_) c *= s;
        return *this;
    }
    friend Fourier operator+(Fourier a, const Fourier& b) { a += b; return a; }
    friend Fourier operator-(Fourier a, const Fourier& b) { a -= b; return a; }
    friend Fourier operator*(Complex s, Fourier f) { f *= s; return f; }
    friend Fourier operator-(Fourier f) { f *= -1.0; return f; }

private:
    size_t idx(int m, int component) const {
        return static_cast<size_t>(m + M_) * n_ + component;
    }

    void ensure_mode(int m) {
        if (m <= M_) return;
        Fourier bigger(n_, m);
        for (int mm = -M_; mm <= M_; ++mm)
            for (int j = 0; j < n_; ++j) bigger.c_[bigger.idx(mm, j)] = c_[idx(mm, j)];
        *this = std::move(bigger);
    }

    void check_n(const Fourier& o) const {
        if (o.n_ != n_) throw std::invalid_argument("Fourier: component count mismatch");
    }

    int n_;
    int M_;
    std::vector<Complex> c_;  // (2M+1) x n, mode-major
};

/// Fourier coefficients of the boundary trace of a polynomial map:
/// z^k zbar^l restricted to |z| = 1 is e^{i(k-l)theta}, so c_m = sum_{k-l=m} c_{kl}.
inline Fourier boundary_trace(const PolyMap& u) {
    int M = 0;
    for (const Poly& p : u.comp) M = std::max({M, p.max_k(), p.max_l()});
    Fourier f(u.n(), M);
    for (int j = 0; j < u.n(); ++j) {
        const Poly& p = u[j];
        for (int k = 0; k <= p.max_k(); ++k)
            for (int l = 0; l <= p.max_l(); ++l) {
                const Complex c = p.coeff(k, l);
                if (c != 0.0) f.add_coeff(k - l, j, c);
            }
    }
    return f;
}

inline Fourier boundary_trace(const Poly& p) { return boundary_trace(PolyMap{p}); }

}  // namespace holodisc
