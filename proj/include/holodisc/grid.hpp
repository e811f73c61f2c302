#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "holodisc/fourier.hpp"
#include "holodisc/poly.hpp"

namespace holodisc {

namespace detail {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// In-place radix-2 FFT; inverse=false computes sum_j x_j e^{-i 2pi jk/N}.
inline void fft(std::vector<Complex>& x, bool inverse) {
    const size_t n = x.size();
    if (n < 2) return;
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const Complex wl = std::polar(1.0, ang);
        for (size_t i = 0; i < n; i += len) {
            Complex w(1.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const Complex u = x[i + k];
                const Complex v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

/// Clenshaw-Curtis weights on nodes cos(j pi / n), j = 0..n, for integral over [-1,1].
inline std::vector<double> clenshaw_curtis_weights(int n) {
    std::vector<double> w(static_cast<size_t>(n) + 1, 0.0);
    for (int j = 0; j <= n; ++j) {
        double s = 1.0;
        for (int b = 1; b <= n / 2; ++b) {
            const double beta = (2 * b == n) ? 1.0 : 2.0;
            s -= beta / (4.0 * b * b - 1.0) * std::cos(2.0 * std::numbers::pi * b * j / n);
        }
        const double cj = (j == 0 || j == n) ? 1.0 : 2.0;
        w[static_cast<size_t>(j)] = cj * s / n;
    }
    return w;
}

}  // namespace detail

/// Collocation grid on the closed unit disc: n_radial rings at the
/// Chebyshev-type radii r_i = cos(i pi / (2 n_radial)) (outermost ring exactly
/// on |z| = 1), n_angular equispaced angles per ring, plus the center stored
/// as a separate node.  Substituting s = 2 r^2 - 1 sends the radii together
/// with the center onto the Clenshaw-Curtis points cos(i pi / n_radial),
/// which is what makes the area quadrature below stable and positive.
class DiscGrid {
public:
    static constexpr int kDefaultDegreeCap = 32;

    DiscGrid(int n_radial, int n_angular) : nr_(n_radial), na_(n_angular) {
        if (!detail::is_power_of_two(n_angular))
            throw std::invalid_argument("angular count must be power of 2");
        if (n_radial < 4) throw std::invalid_argument("radial count must be at least 4");
        if (n_angular < 8) throw std::invalid_argument("angular count must be at least 8");

        radii_.resize(static_cast<size_t>(nr_));
        for (int i = 0; i < nr_; ++i)
            radii_[static_cast<size_t>(i)] = std::cos(i * std::numbers::pi / (2.0 * nr_));

        max_degree_ = std::min({kDefaultDegreeCap, na_ / 2 - 1, 2 * (nr_ - 1)});

        const auto cc = detail::clenshaw_curtis_weights(nr_);
        ring_weight_.resize(static_cast<size_t>(nr_));
        for (int i = 0; i < nr_; ++i)
            ring_weight_[static_cast<size_t>(i)] = cc[static_cast<size_t>(i)] / 4.0 * (2.0 * std::numbers::pi / na_);
        center_weight_ = cc[static_cast<size_t>(nr_)] / 4.0 * 2.0 * std::numbers::pi;

        build_radial_solvers();
    }

    int n_radial() const { return nr_; }
    int n_angular() const { return na_; }
    size_t node_count() const { return static_cast<size_t>(nr_) * na_ + 1; }
    size_t center_index() const { return static_cast<size_t>(nr_) * na_; }
    int max_degree() const { return max_degree_; }

    double radius(int ring) const { return radii_[static_cast<size_t>(ring)]; }
    double angle(int j) const { return 2.0 * std::numbers::pi * j / na_; }

    Complex node(size_t idx) const {
        if (idx == center_index()) return Complex(0.0);
        const int ring = static_cast<int>(idx) / na_;
        const int j = static_cast<int>(idx) % na_;
        return std::polar(radius(ring), angle(j));
    }

    size_t node_index(int ring, int j) const { return static_cast<size_t>(ring) * na_ + j; }

    /// Area-measure weight of a node; sum over nodes of w * f approximates
    /// the integral of f over the disc (exactly pi for f = 1).
    double weight(size_t idx) const {
        if (idx == center_index()) return center_weight_;
        return ring_weight_[idx / static_cast<size_t>(na_)];
    }

    /// Least-squares projection of node values onto the spectral basis
    /// z^k zbar^l, k + l <= max_degree().
    Poly analyze(std::span<const Complex> values) const {
        if (values.size() != node_count()) throw std::invalid_argument("analyze: value count mismatch");
        // Angular FFT per ring.
        std::vector<std::vector<Complex>> ring_modes(static_cast<size_t>(nr_));
        std::vector<Complex> buf(static_cast<size_t>(na_));
        for (int i = 0; i < nr_; ++i) {
            for (int j = 0; j < na_; ++j) buf[static_cast<size_t>(j)] = values[node_index(i, j)];
            detail::fft(buf, false);
            for (Complex& c : buf) c /= static_cast<double>(na_);
            ring_modes[static_cast<size_t>(i)] = buf;
        }
        Poly out;
        const int D = max_degree_;
        for (int m = -D; m <= D; ++m) {
            const auto& solver = radial_qr_[static_cast<size_t>(std::abs(m))];
            const int rows = (m == 0) ? nr_ + 1 : nr_;
            VecLd re(rows), im(rows);
            for (int i = 0; i < nr_; ++i) {
                const int mi = (m >= 0) ? m : na_ + m;
                const Complex y = ring_modes[static_cast<size_t>(i)][static_cast<size_t>(mi)];
                re(i) = y.real();
                im(i) = y.imag();
            }
            if (m == 0) {
                const Complex y = values[center_index()];
                re(nr_) = y.real();
                im(nr_) = y.imag();
            }
            const VecLd ar = solver.solve(re);
            const VecLd ai = solver.solve(im);
            const int am = std::abs(m);
            for (int j = 0; j < ar.size(); ++j) {
                const int t = am + 2 * j;  // k + l
                const int k = (t + m) / 2;
                const int l = (t - m) / 2;
                const Complex c(static_cast<double>(ar(j)), static_cast<double>(ai(j)));
                if (c != 0.0) out.set_coeff(k, l, c);
            }
        }
        return out;
    }

    std::vector<Complex> synthesize(const Poly& p) const {
        std::vector<Complex> v(node_count());
        for (size_t idx = 0; idx < v.size(); ++idx) {
            const Complex z = node(idx);
            v[idx] = p.eval(z);
        }
        return v;
    }

    /// Fourier modes of the boundary ring (ring 0), modes -na/2+1 .. na/2-1.
    Fourier boundary_modes(std::span<const Complex> boundary_values) const {
        if (boundary_values.size() != static_cast<size_t>(na_))
            throw std::invalid_argument("boundary_modes: need one value per angular node");
        std::vector<Complex> buf(boundary_values.begin(), boundary_values.end());
        detail::fft(buf, false);
        const int M = na_ / 2 - 1;
        Fourier f(1, M);
        for (int m = -M; m <= M; ++m) {
            const int mi = (m >= 0) ? m : na_ + m;
            f.set_coeff(m, 0, buf[static_cast<size_t>(mi)] / static_cast<double>(na_));
        }
        return f;
    }

private:
    using MatLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using VecLd = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

    void build_radial_solvers() {
        const int D = max_degree_;
        radial_qr_.reserve(static_cast<size_t>(D) + 1);
        for (int m = 0; m <= D; ++m) {
            const int dof = (D - m) / 2 + 1;
            const int rows = (m == 0) ? nr_ + 1 : nr_;
            MatLd V(rows, dof);
            for (int i = 0; i < nr_; ++i) {
                const long double r = static_cast<long double>(radii_[static_cast<size_t>(i)]);
                long double p = 1.0L;
                for (int q = 0; q < m; ++q) p *= r;
                for (int j = 0; j < dof; ++j) {
                    V(i, j) = p;
                    p *= r * r;
                }
            }
            if (m == 0) {
                for (int j = 0; j < dof; ++j) V(nr_, j) = (j == 0) ? 1.0L : 0.0L;
            }
            radial_qr_.emplace_back(V);
        }
    }

    int nr_;
    int na_;
    int max_degree_;
    std::vector<double> radii_;
    std::vector<double> ring_weight_;
    double center_weight_ = 0.0;
    std::vector<Eigen::HouseholderQR<MatLd>> radial_qr_;
};

using GridPtr = std::shared_ptr<const DiscGrid>;

inline GridPtr make_disc_grid(int n_radial, int n_angular) {
    return std::make_shared<const DiscGrid>(n_radial, n_angular);
}

/// C^n-valued function on a DiscGrid: collocation values plus an optional
/// spectral (polynomial) form.  Immutable after construction; all operations
/// return new objects.
class GridFunction {
public:
    static GridFunction from_poly(GridPtr grid, PolyMap p) {
        GridFunction f;
        f.grid_ = std::move(grid);
        f.n_ = p.n();
        f.values_.resize(f.grid_->node_count() * static_cast<size_t>(f.n_));
        for (int c = 0; c < f.n_; ++c) {
            const auto vals = f.grid_->synthesize(p[c]);
            for (size_t idx = 0; idx < vals.size(); ++idx) f.values_[idx * f.n_ + c] = vals[idx];
        }
        f.spectral_ = std::move(p);
        return f;
    }

    static GridFunction from_poly(GridPtr grid, Poly p) {
        return from_poly(std::move(grid), PolyMap{std::move(p)});
    }

    static GridFunction from_values(GridPtr grid, std::vector<Complex> values, int n = 1) {
        GridFunction f;
        if (values.size() != grid->node_count() * static_cast<size_t>(n))
            throw std::invalid_argument("GridFunction: value count mismatch");
        f.grid_ = std::move(grid);
        f.n_ = n;
        f.values_ = std::move(values);
        return f;
    }

    template <typename Fn>
    static GridFunction sample(GridPtr grid, int n, Fn&& fn) {
        std::vector<Complex> v(grid->node_count() * static_cast<size_t>(n));
        for (size_t idx = 0; idx < grid->node_count(); ++idx) {
            const auto val = fn(grid->node(idx));
            for (int c = 0; c < n; ++c) v[idx * static_cast<size_t>(n) + c] = val[static_cast<size_t>(c)];
        }
        return from_values(std::move(grid), std::move(v), n);
    }

    template <typename Fn>
    static GridFunction sample_scalar(GridPtr grid, Fn&& fn) {
        std::vector<Complex> v(grid->node_count());
        for (size_t idx = 0; idx < grid->node_count(); ++idx) v[idx] = fn(grid->node(idx));
        return from_values(std::move(grid), std::move(v), 1);
    }

    const GridPtr& grid() const { return grid_; }
    int n() const { return n_; }
    size_t node_count() const { return grid_->node_count(); }

    Complex value(size_t idx, int component = 0) const {
        return values_[idx * static_cast<size_t>(n_) + component];
    }

    const std::vector<Complex>& raw_values() const { return values_; }

    bool has_spectral() const { return spectral_.has_value(); }

    const PolyMap& spectral() const {
        if (!spectral_) throw std::logic_error("GridFunction: no spectral form (call projected())");
        return *spectral_;
    }

    double projection_residual() const { return projection_residual_; }

    /// Least-squares projection onto the grid's spectral basis.  The returned
    /// function keeps the original values; projection_residual() reports the
    /// sup over nodes of |synthesized - original|.
    GridFunction projected() const {
        if (spectral_) return *this;
        GridFunction f(*this);
        PolyMap p(n_);
        std::vector<Complex> comp(grid_->node_count());
        double resid = 0.0;
        for (int c = 0; c < n_; ++c) {
            for (size_t idx = 0; idx < comp.size(); ++idx) comp[idx] = value(idx, c);
            p[c] = grid_->analyze(comp);
            const auto back = grid_->synthesize(p[c]);
            for (size_t idx = 0; idx < comp.size(); ++idx)
                resid = std::max(resid, std::abs(back[idx] - comp[idx]));
        }
        f.spectral_ = std::move(p);
        f.projection_residual_ = resid;
        return f;
    }

    double sup_norm() const {
        double s = 0.0;
        for (const Complex& v : values_) s = std::max(s, std::abs(v));
        return s;
    }

    GridFunction component(int c) const {
        std::vector<Complex> v(grid_->node_count());
        for (size_t idx = 0; idx < v.size(); ++idx) v[idx] = value(idx, c);
        GridFunction f = from_values(grid_, std::move(v), 1);
        if (spectral_) f.spectral_ = PolyMap{(*spectral_)[c]};
        f.projection_residual_ = projection_residual_;
        return f;
    }

    GridFunction& operator+=(const GridFunction& o) {
        check_compatible(o);
        for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
        if (spectral_ && o.spectral_) *spectral_ += *o.spectral_;
        else spectral_.reset();
        projection_residual_ = std::max(projection_residual_, o.projection_residual_);
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        check_compatible(o);
        for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
        if (spectral_ && o.spectral_) *spectral_ -= *o.spectral_;
        else spectral_.reset();
        projection_residual_ = std::max(projection_residual_, o.projection_residual_);
        return *this;
    }
    GridFunction& operator*=(Complex s) {
        for (Complex& v : values_) v *= s;
        if (spectral_) *spectral_ *= s;
        return *this;
    }
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { a += b; return a; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { a -= b; return a; }
    friend GridFunction operator*(Complex s, GridFunction f) { f *= s; return f; }

private:
    GridFunction() = default;

    void check_compatible(const GridFunction& o) const {
        if (o.n_ != n_ || o.grid_->node_count() != grid_->node_count() ||
            o.grid_->n_angular() != grid_->n_angular())
            throw std::invalid_argument("GridFunction: incompatible operands");
    }

    GridPtr grid_;
    int n_ = 0;
    std::vector<Complex> values_;  // node-major
    std::optional<PolyMap> spectral_;
    double projection_residual_ = 0.0;
};

/// d/dzbar on the grid; exact on the spectral form (monomial rule
/// z^k zbar^l -> l z^k zbar^{l-1}).  Non-spectral input is projected first.
inline GridFunction dbar(const GridFunction& f) {
    const GridFunction g = f.has_spectral() ? f : f.projected();
    return GridFunction::from_poly(g.grid(), g.spectral().dbar());
}

/// d/dz on the grid (monomial rule z^k zbar^l -> k z^{k-1} zbar^l).
inline GridFunction d(const GridFunction& f) {
    const GridFunction g = f.has_spectral() ? f : f.projected();
    return GridFunction::from_poly(g.grid(), g.spectral().d());
}

/// Fourier coefficients of f restricted to the boundary ring.
inline Fourier boundary_trace(const GridFunction& f) {
    if (f.has_spectral()) return boundary_trace(f.spectral());
    const auto& grid = *f.grid();
    Fourier out(f.n(), 1);
    std::vector<Complex> ring(static_cast<size_t>(grid.n_angular()));
    for (int c = 0; c < f.n(); ++c) {
        for (int j = 0; j < grid.n_angular(); ++j) ring[static_cast<size_t>(j)] = f.value(grid.node_index(0, j), c);
        const Fourier fc = grid.boundary_modes(ring);
        for (int m = -fc.max_mode(); m <= fc.max_mode(); ++m) out.set_coeff(m, c, fc.coeff(m, 0));
    }
    return out;
}

}  // namespace holodisc
