#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "holodisc/fourier.hpp"
#include "holodisc/grid.hpp"
#include "holodisc/transforms.hpp"

namespace holodisc {

/// Regularity indices (k, alpha) for Hoelder classes and p for Sobolev/trace
/// exponents.
struct RegularityIndex {
    int k = 0;
    double alpha = 0.5;
    double p = 2.0;

    void validate() const {
        if (k < 0) throw std::invalid_argument("RegularityIndex: k must be >= 0");
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("RegularityIndex: alpha in (0,1)");
        if (!(p > 1.0)) throw std::invalid_argument("RegularityIndex: p > 1");
    }
};

struct NormReport {
    std::string which;
    double value = 0.0;
    int n_radial = 0;
    int n_angular = 0;
    double est_error = 0.0;
    std::vector<double> order_parts;  // per-derivative-order contributions
};

namespace detail {

constexpr int kMaxDerivativeOrder = 6;

/// Mixed partials d^a_xi d^b_eta of all components, exact on the spectral
/// form (d/dxi = d + dbar, d/deta = i (d - dbar)).
inline std::vector<PolyMap> mixed_partials(const PolyMap& u, int order) {
    std::vector<PolyMap> out;
    out.reserve(static_cast<size_t>(order) + 1);
    PolyMap base = u;  // d^order_xi, then trade xi for eta one at a time
    for (int a = 0; a < order; ++a) base = base.d() + base.dbar();
    out.push_back(base);
    PolyMap cur = u;
    for (int b = 1; b <= order; ++b) {
        cur = Complex(0.0, 1.0) * (cur.d() - cur.dbar());
        PolyMap mixed = cur;
        for (int a = 0; a < order - b; ++a) mixed = mixed.d() + mixed.dbar();
        out.push_back(mixed);
    }
    return out;
}

/// |D^order f| at every node: max over the order+1 mixed partials and over
/// components of the modulus.
inline std::vector<double> derivative_magnitudes(const GridFunction& f, int order) {
    const auto& grid = *f.grid();
    std::vector<double> mag(grid.node_count(), 0.0);
    const auto partials = mixed_partials(f.spectral(), order);
    for (const PolyMap& p : partials)
        for (size_t idx = 0; idx < grid.node_count(); ++idx) {
            const Complex z = grid.node(idx);
            for (int c = 0; c < p.n(); ++c) mag[idx] = std::max(mag[idx], std::abs(p[c].eval(z)));
        }
    return mag;
}

/// Componentwise values of all mixed partials of a given order, per node.
inline std::vector<std::vector<Complex>> derivative_tuples(const GridFunction& f, int order) {
    const auto& grid = *f.grid();
    const auto partials = mixed_partials(f.spectral(), order);
    const size_t width = partials.size() * static_cast<size_t>(f.n());
    std::vector<std::vector<Complex>> vals(grid.node_count(), std::vector<Complex>(width));
    for (size_t pi = 0; pi < partials.size(); ++pi)
        for (size_t idx = 0; idx < grid.node_count(); ++idx) {
            const Complex z = grid.node(idx);
            for (int c = 0; c < f.n(); ++c)
                vals[idx][pi * static_cast<size_t>(f.n()) + static_cast<size_t>(c)] =
                    partials[pi][c].eval(z);
        }
    return vals;
}

inline double holder_seminorm_over(const std::vector<std::vector<Complex>>& tuples,
                                   const std::vector<Complex>& points, double alpha, size_t stride) {
    double semi = 0.0;
    const size_t N = points.size();
    for (size_t i = 0; i < N; i += stride)
        for (size_t j = i + stride; j < N; j += stride) {
            const double dist = std::abs(points[i] - points[j]);
            if (dist < 1e-14) continue;
            double diff = 0.0;
            for (size_t c = 0; c < tuples[i].size(); ++c)
                diff = std::max(diff, std::abs(tuples[i][c] - tuples[j][c]));
            semi = std::max(semi, diff / std::pow(dist, alpha));
        }
    return semi;
}

}  // namespace detail

/// C^{k,alpha} norm estimate: sum over j <= k of sup |D^j f| plus the
/// alpha-difference quotient of D^k f, both brute-forced over the grid nodes.
/// sampled_pairs trades the O(N^2) pair scan for a strided subsample.
inline NormReport holder_norm(const GridFunction& f, const RegularityIndex& idx,
                              bool sampled_pairs = false) {
    idx.validate();
    if (idx.k > detail::kMaxDerivativeOrder)
        throw std::invalid_argument("holder_norm: k beyond available derivatives");
    const GridFunction g = f.has_spectral() ? f : f.projected();
    const auto& grid = *g.grid();

    NormReport rep;
    rep.which = "C^{" + std::to_string(idx.k) + "," + std::to_string(idx.alpha) + "}";
    rep.n_radial = grid.n_radial();
    rep.n_angular = grid.n_angular();

    double total = 0.0;
    for (int j = 0; j <= idx.k; ++j) {
        const auto mag = detail::derivative_magnitudes(g, j);
        double sup = 0.0;
        for (const double m : mag) sup = std::max(sup, m);
        rep.order_parts.push_back(sup);
        total += sup;
    }

    std::vector<Complex> points(grid.node_count());
    for (size_t i = 0; i < points.size(); ++i) points[i] = grid.node(i);
    const auto tuples = detail::derivative_tuples(g, idx.k);
    const size_t stride = sampled_pairs ? std::max<size_t>(2, points.size() / 256) : 1;
    const double semi = detail::holder_seminorm_over(tuples, points, idx.alpha, stride);
    total += semi;
    rep.order_parts.push_back(semi);
    rep.value = total;

    // Discretization estimate: redo the pair scan on a coarser subsample.
    const double coarse_semi =
        detail::holder_seminorm_over(tuples, points, idx.alpha, std::max<size_t>(2, 3 * stride));
    rep.est_error = std::abs(semi - coarse_semi);
    return rep;
}

/// L^{k,p} norm estimate via the grid quadrature:
/// ( sum_{j<=k} integral |D^j f|^p )^{1/p}.
inline NormReport sobolev_norm(const GridFunction& f, const RegularityIndex& idx) {
    idx.validate();
    if (idx.k > detail::kMaxDerivativeOrder)
        throw std::invalid_argument("sobolev_norm: k beyond available derivatives");
    const GridFunction g = f.has_spectral() ? f : f.projected();
    const auto& grid = *g.grid();

    NormReport rep;
    rep.which = "L^{" + std::to_string(idx.k) + "," + std::to_string(idx.p) + "}";
    rep.n_radial = grid.n_radial();
    rep.n_angular = grid.n_angular();

    double total = 0.0;
    double total_half = 0.0;  // half angular resolution, for the error estimate
    for (int j = 0; j <= idx.k; ++j) {
        const auto mag = detail::derivative_magnitudes(g, j);
        double I = 0.0;
        double I_half = 0.0;
        for (size_t idx_node = 0; idx_node < mag.size(); ++idx_node) {
            const double term = grid.weight(idx_node) * std::pow(mag[idx_node], idx.p);
            I += term;
            if (idx_node == grid.center_index() ||
                (static_cast<int>(idx_node) % grid.n_angular()) % 2 == 0)
                I_half += (idx_node == grid.center_index()) ? term : 2.0 * term;
        }
        rep.order_parts.push_back(std::pow(I, 1.0 / idx.p));
        total += I;
        total_half += I_half;
    }
    rep.value = std::pow(total, 1.0 / idx.p);
    rep.est_error = std::abs(rep.value - std::pow(total_half, 1.0 / idx.p));
    return rep;
}

/// Trace norm |phi|_{T^{1,p}} = |P phi|_{L^{1,p}}, via the Poisson extension.
/// The trace setting requires p > 2.
inline NormReport trace_norm(const Fourier& phi, double p, const GridPtr& grid) {
    if (!(p > 2.0)) throw std::invalid_argument("trace_norm: requires p > 2");
    RegularityIndex idx{1, 0.5, p};
    NormReport rep = sobolev_norm(GridFunction::from_poly(grid, poisson(phi)), idx);
    rep.which = "T^{1," + std::to_string(p) + "}";
    return rep;
}

/// C^{0,alpha} norm of boundary data on the circle (chordal distances).
inline double boundary_holder_norm(const Fourier& phi, double alpha, int samples = 256) {
    std::vector<double> mags(static_cast<size_t>(samples));
    std::vector<std::vector<Complex>> vals(static_cast<size_t>(samples));
    std::vector<Complex> pts(static_cast<size_t>(samples));
    double sup = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double th = 2.0 * std::numbers::pi * i / samples;
        pts[static_cast<size_t>(i)] = std::polar(1.0, th);
        auto v = phi.eval(th);
        for (const Complex& x : v) sup = std::max(sup, std::abs(x));
        vals[static_cast<size_t>(i)] = std::move(v);
    }
    double semi = 0.0;
    for (int i = 0; i < samples; ++i)
        for (int j = i + 1; j < samples; ++j) {
            const double dist = std::abs(pts[static_cast<size_t>(i)] - pts[static_cast<size_t>(j)]);
            if (dist < 1e-14) continue;
            double diff = 0.0;
            for (size_t c = 0; c < vals[static_cast<size_t>(i)].size(); ++c)
                diff = std::max(diff, std::abs(vals[static_cast<size_t>(i)][c] - vals[static_cast<size_t>(j)][c]));
            semi = std::max(semi, diff / std::pow(dist, alpha));
        }
    return sup + semi;
}

}  // namespace holodisc
