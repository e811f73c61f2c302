#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace holodisc {

using Complex = std::complex<double>;

/// Finite double power series  h(z) = sum_{k,l >= 0} c_{kl} z^k zbar^l
/// together with its polarization  h^(z, xi) = sum c_{kl} z^k xi^l,
/// so that h(z) = h^(z, conj z).  Coefficients are stored densely as a
/// (kmax+1) x (lmax+1) block; the zero polynomial has kmax = lmax = -1.
class Poly {
public:
    Poly() = default;

    static Poly constant(Complex c) { return monomial(0, 0, c); }

    static Poly monomial(int k, int l, Complex c = 1.0) {
        if (k < 0 || l < 0) throw std::invalid_argument("Poly: negative exponent");
        Poly p;
        p.set_coeff(k, l, c);
        return p;
    }

    /// z^1 zbar^0
    static Poly zeta() { return monomial(1, 0, 1.0); }
    /// z^0 zbar^1
    static Poly zetabar() { return monomial(0, 1, 1.0); }

    int max_k() const { return kmax_; }
    int max_l() const { return lmax_; }
    int total_degree() const {
        int d = -1;
        for (int k = 0; k <= kmax_; ++k)
            for (int l = 0; l <= lmax_; ++l)
                if (coeff(k, l) != 0.0) d = std::max(d, k + l);
        return d;
    }

    bool is_zero(double tol = 0.0) const {
        for (const Complex& c : c_)
            if (std::abs(c) > tol) return false;
        return true;
    }

    Complex coeff(int k, int l) const {
        if (k < 0 || l < 0 || k > kmax_ || l > lmax_) return 0.0;
        return c_[static_cast<size_t>(k) * (lmax_ + 1) + l];
    }

    void set_coeff(int k, int l, Complex v) {
        if (k < 0 || l < 0) throw std::invalid_argument("Poly: negative exponent");
        grow(k, l);
        c_[static_cast<size_t>(k) * (lmax_ + 1) + l] = v;
    }

    void add_coeff(int k, int l, Complex v) { set_coeff(k, l, coeff(k, l) + v); }

    /// Evaluate the polarization h^(zeta, xi).  Long-double Horner keeps the
    /// synthesis direction well below the round-trip tolerance.
    Complex eval_polarized(Complex zeta, Complex xi) const {
        using LC = std::complex<long double>;
        const LC z(zeta.real(), zeta.imag());
        const LC x(xi.real(), xi.imag());
        LC acc(0.0L, 0.0L);
        for (int k = kmax_; k >= 0; --k) {
            LC row(0.0L, 0.0L);
            for (int l = lmax_; l >= 0; --l) {
                const Complex c = coeff(k, l);
                row = row * x + LC(c.real(), c.imag());
            }
            acc = acc * z + row;
        }
        return Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }

    Complex eval(Complex z) const { return eval_polarized(z, std::conj(z)); }

    /// d/dzbar: z^k zbar^l -> l z^k zbar^{l-1}
    Poly dbar() const {
        Poly r;
        for (int k = 0; k <= kmax_; ++k)
            for (int l = 1; l <= lmax_; ++l) {
                const Complex c = coeff(k, l);
                if (c != 0.0) r.set_coeff(k, l - 1, static_cast<double>(l) * c);
            }
        return r;
    }

    /// d/dz: z^k zbar^l -> k z^{k-1} zbar^l
    Poly d() const {
        Poly r;
        for (int k = 1; k <= kmax_; ++k)
            for (int l = 0; l <= lmax_; ++l) {
                const Complex c = coeff(k, l);
                if (c != 0.0) r.set_coeff(k - 1, l, static_cast<double>(k) * c);
            }
        return r;
    }

    /// Primitive with respect to zbar: z^k zbar^l -> z^k zbar^{l+1}/(l+1).
    Poly antiderivative_zbar() const {
        Poly r;
        for (int k = 0; k <= kmax_; ++k)
            for (int l = 0; l <= lmax_; ++l) {
                const Complex c = coeff(k, l);
                if (c != 0.0) r.set_coeff(k, l + 1, c / static_cast<double>(l + 1));
            }
        return r;
    }

    /// Coefficients of the conjugate function: conj h has c'_{kl} = conj(c_{lk}).
    Poly conjugated() const {
        Poly r;
        for (int k = 0; k <= kmax_; ++k)
            for (int l = 0; l <= lmax_; ++l) {
                const Complex c = coeff(k, l);
                if (c != 0.0) r.set_coeff(l, k, std::conj(c));
            }
        return r;
    }

    Poly truncated_total(int cap) const {
        Poly r;
        for (int k = 0; k <= kmax_; ++k)
            for (int l = 0; l <= lmax_; ++l)
                if (k + l <= cap) {
                    const Complex c = coeff(k, l);
                    if (c != 0.0) r.set_coeff(k, l, c);
                }
        return r;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const Complex& c : c_) m = std::max(m, std::abs(c));
        return m;
    }

    double sum_abs_coeff() const {
        double s = 0.0;
        for (const Complex& c : c_) s += std::abs(c);
        return s;
    }

    Poly& operator+=(const Poly& o) {
        for (int k = 0; k <= o.kmax_; ++k)
            for (int l = 0; l <= o.lmax_; ++l) {
                const Complex c = o.coeff(k, l);
                if (c != 0.0) add_coeff(k, l, c);
            }
        return *this;
    }

    Poly& operator-=(const Poly& o) {
        for (int k = 0; k <= o.kmax_; ++k)
            for (int l = 0; l <= o.lmax_; ++l) {
                const Complex c = o.coeff(k, l);
                if (c != 0.0) add_coeff(k, l, -c);
            }
        return *this;
    }

    Poly& operator*=(Complex s) {
        for (Complex& c : c_) c *= s;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { a += b; return a; }
    friend Poly operator-(Poly a, const Poly& b) { a -= b; return a; }
    friend Poly operator*(Complex s, Poly p) { p *= s; return p; }
    friend Poly operator*(Poly p, Complex s) { p *= s; return p; }
    friend Poly operator-(Poly p) { p *= -1.0; return p; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        if (a.kmax_ < 0 || b.kmax_ < 0) return r;
        for (int k = 0; k <= a.kmax_; ++k)
            for (int l = 0; l <= a.lmax_; ++l) {
                const Complex ca = a.coeff(k, l);
                if (ca == 0.0) continue;
                for (int k2 = 0; k2 <= b.kmax_; ++k2)
                    for (int l2 = 0; l2 <= b.lmax_; ++l2) {
                        const Complex cb = b.coeff(k2, l2);
                        if (cb != 0.0) r.add_coeff(k + k2, l + l2, ca * cb);
                    }
            }
        return r;
    }

private:
    void grow(int k, int l) {
        if (k <= kmax_ && l <= lmax_) return;
        const int nk = std::max(k, kmax_);
        const int nl = std::max(l, lmax_);
        std::vector<Complex> nc(static_cast<size_t>(nk + 1) * (nl + 1), Complex(0.0));
        for (int i = 0; i <= kmax_; ++i)
            for (int j = 0; j <= lmax_; ++j)
                nc[static_cast<size_t>(i) * (nl + 1) + j] = c_[static_cast<size_t>(i) * (lmax_ + 1) + j];
        c_ = std::move(nc);
        kmax_ = nk;
        lmax_ = nl;
    }

    int kmax_ = -1;
    int lmax_ = -1;
    std::vector<Complex> c_;
};

/// C^n-valued polynomial map on the closed disc.
struct PolyMap {
    std::vector<Poly> comp;

    PolyMap() = default;
    explicit PolyMap(int n) : comp(static_cast<size_t>(n)) {}
    PolyMap(std::initializer_list<Poly> ps) : comp(ps) {}

    int n() const { return static_cast<int>(comp.size()); }
    Poly& operator[](int i) { return comp[static_cast<size_t>(i)]; }
    const Poly& operator[](int i) const { return comp[static_cast<size_t>(i)]; }

    int total_degree() const {
        int d = -1;
        for (const Poly& p : comp) d = std::max(d, p.total_degree());
        return d;
    }

    bool is_zero(double tol = 0.0) const {
        for (const Poly& p : comp)
            if (!p.is_zero(tol)) return false;
        return true;
    }

    std::vector<Complex> eval(Complex z) const {
        std::vector<Complex> v(comp.size());
        for (size_t i = 0; i < comp.size(); ++i) v[i] = comp[i].eval(z);
        return v;
    }

    PolyMap dbar() const { return apply(&Poly::dbar); }
    PolyMap d() const { return apply(&Poly::d); }
    PolyMap antiderivative_zbar() const { return apply(&Poly::antiderivative_zbar); }
    PolyMap conjugated() const { return apply(&Poly::conjugated); }

    PolyMap truncated_total(int cap) const {
        PolyMap r(n());
        for (size_t i = 0; i < comp.size(); ++i) r.comp[i] = comp[i].truncated_total(cap);
        return r;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const Poly& p : comp) m = std::max(m, p.max_abs_coeff());
        return m;
    }

    PolyMap& operator+=(const PolyMap& o) {
        check_n(o);
        for (size_t i = 0; i < comp.size(); ++i) comp[i] += o.comp[i];
        return *this;
    }
    PolyMap& operator-=(const PolyMap& o) {
        check_n(o);
        for (size_t i = 0; i < comp.size(); ++i) comp[i] -= o.comp[i];
        return *this;
    }
    PolyMap& operator*=(Complex s) {
        for (Poly& p : comp) p *= s;
        return *this;
    }
    friend PolyMap operator+(PolyMap a, const PolyMap& b) { a += b; return a; }
    friend PolyMap operator-(PolyMap a, const PolyMap& b) { a -= b; return a; }
    friend PolyMap operator*(Complex s, PolyMap p) { p *= s; return p; }
    friend PolyMap operator-(PolyMap p) { p *= -1.0; return p; }

private:
    PolyMap apply(Poly (Poly::*op)() const) const {
        PolyMap r(n());
        for (size_t i = 0; i < comp.size(); ++i) r.comp[i] = (comp[i].*op)();
        return r;
    }
    void check_n(const PolyMap& o) const {
        if (o.comp.size() != comp.size()) throw std::invalid_argument("PolyMap: component count mismatch");
    }
};

}  // namespace holodisc
