#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "holodisc/acs.hpp"
#include "holodisc/grid.hpp"
#include "holodisc/rh_solver.hpp"

namespace holodisc {

/// Map defined on the closed upper half-disc.  Values live on the upper
/// angular rows of a full DiscGrid (theta in [0, pi]), which is symmetric
/// under conjugation, so the reflection lands on existing nodes.  An
/// evaluator callable extends the function off the nodes (restrictions of
/// spectral functions evaluate their polynomial).
class HalfDiscFunction {
public:
    static HalfDiscFunction restriction(const GridFunction& full) {
        const GridFunction g = full.has_spectral() ? full : full.projected();
        HalfDiscFunction h;
        h.grid_ = g.grid();
        h.n_ = g.n();
        h.spectral_ = g.spectral();
        const PolyMap p = g.spectral();
        h.eval_ = [p](Complex z) {
            CVec v(p.n());
            for (int c = 0; c < p.n(); ++c) v(c) = p[c].eval(z);
            return v;
        };
        h.collect_values();
        return h;
    }

    static HalfDiscFunction sample(GridPtr grid, int n, std::function<CVec(Complex)> fn) {
        HalfDiscFunction h;
        h.grid_ = std::move(grid);
        h.n_ = n;
        h.eval_ = std::move(fn);
        h.collect_values();
        return h;
    }

    const GridPtr& grid() const { return grid_; }
    int n() const { return n_; }
    bool has_spectral() const { return spectral_.has_value(); }
    const PolyMap& spectral() const {
        if (!spectral_) throw std::logic_error("HalfDiscFunction: no spectral form");
        return *spectral_;
    }

    CVec eval(Complex z) const {
        if (z.imag() < -1e-14) throw std::invalid_argument("HalfDiscFunction: point below the segment");
        return eval_(z);
    }

    /// sup of |Im w| over the nodes on beta = (-1,1) (the theta = 0 and
    /// theta = pi rays plus the center).
    double beta_imag_sup() const {
        double s = 0.0;
        for (const size_t idx : beta_nodes()) {
            const CVec v = value(idx);
            for (int c = 0; c < n_; ++c) s = std::max(s, std::abs(v(c).imag()));
        }
        return s;
    }

    std::vector<size_t> beta_nodes() const {
        std::vector<size_t> b;
        for (int i = 0; i < grid_->n_radial(); ++i) {
            b.push_back(grid_->node_index(i, 0));
            b.push_back(grid_->node_index(i, grid_->n_angular() / 2));
        }
        b.push_back(grid_->center_index());
        return b;
    }

    bool is_upper_node(size_t idx) const {
        if (idx == grid_->center_index()) return true;
        const int j = static_cast<int>(idx) % grid_->n_angular();
        return j <= grid_->n_angular() / 2;
    }

    /// Value at an upper node of the underlying grid.
    CVec value(size_t idx) const {
        if (!is_upper_node(idx)) throw std::invalid_argument("HalfDiscFunction: node below the segment");
        return values_.at(upper_offset(idx));
    }

    double sup_norm() const {
        double s = 0.0;
        for (const CVec& v : values_) s = std::max(s, v.lpNorm<Eigen::Infinity>());
        return s;
    }

private:
    size_t upper_offset(size_t idx) const {
        if (idx == grid_->center_index()) return static_cast<size_t>(grid_->n_radial()) * (grid_->n_angular() / 2 + 1);
        const size_t ring = idx / static_cast<size_t>(grid_->n_angular());
        const size_t j = idx % static_cast<size_t>(grid_->n_angular());
        return ring * (static_cast<size_t>(grid_->n_angular()) / 2 + 1) + j;
    }

    void collect_values() {
        const size_t per_ring = static_cast<size_t>(grid_->n_angular()) / 2 + 1;
        values_.assign(static_cast<size_t>(grid_->n_radial()) * per_ring + 1, CVec());
        for (int i = 0; i < grid_->n_radial(); ++i)
            for (int j = 0; j <= grid_->n_angular() / 2; ++j) {
                const size_t idx = grid_->node_index(i, j);
                values_[upper_offset(idx)] = eval_(grid_->node(idx));
            }
        values_[upper_offset(grid_->center_index())] = eval_(Complex(0.0));
    }

    GridPtr grid_;
    int n_ = 0;
    std::vector<CVec> values_;
    std::optional<PolyMap> spectral_;
    std::function<CVec(Complex)> eval_;
};

struct ExtResult {
    GridFunction function;
    bool continuous_across_beta = false;
    double beta_imag_sup = 0.0;
};

/// Extension by reflection, ext(w)(z) = conj(w(conj z)) on the lower
/// half-disc.  Continuity across beta holds iff w(beta) lies in R^n; the
/// mismatch is flagged, not fatal.
inline ExtResult ext(const HalfDiscFunction& w, double beta_tol = 1e-9) {
    const auto& grid = *w.grid();
    const int n = w.n();
    std::vector<Complex> vals(grid.node_count() * static_cast<size_t>(n));
    for (int i = 0; i < grid.n_radial(); ++i)
        for (int j = 0; j < grid.n_angular(); ++j) {
            const size_t idx = grid.node_index(i, j);
            CVec v;
            if (j <= grid.n_angular() / 2) {
                v = w.value(idx);
            } else {
                v = w.value(grid.node_index(i, grid.n_angular() - j)).conjugate();
            }
            for (int c = 0; c < n; ++c) vals[idx * static_cast<size_t>(n) + c] = v(c);
        }
    {
        const CVec v = w.value(grid.center_index());
        for (int c = 0; c < n; ++c) vals[grid.center_index() * static_cast<size_t>(n) + c] = v(c);
    }
    ExtResult r{GridFunction::from_values(w.grid(), std::move(vals), n)};
    r.beta_imag_sup = w.beta_imag_sup();
    r.continuous_across_beta = r.beta_imag_sup <= beta_tol * std::max(1.0, w.sup_norm());
    return r;
}

/// Reflected structure over the full disc:
///   J~(z) = J(u(z)) on the closed upper half-disc,
///   J~(z)[xi] = -tau J(u(tau z))[tau xi] below the segment.
inline BundleStructure reflect_structure(const AlmostComplexStructure& J, const HalfDiscFunction& u) {
    if (J.n() != u.n()) throw std::invalid_argument("reflect_structure: dimension mismatch");
    const RMat C = detail::conj_matrix(J.n());
    return BundleStructure(J.n(), [J, u, C](Complex z) -> RMat {
        if (z.imag() >= 0.0) return J(u.eval(z));
        return RMat(-(C * J(u.eval(std::conj(z))) * C));
    });
}

struct ReflectionReport {
    double base_residual = 0.0;       // sup |dbar_{J~} ext(u)| over upper interior nodes
    double reflected_residual = 0.0;  // same over lower interior nodes
    double beta_imag_sup = 0.0;
    double ext_projection_residual = 0.0;
    bool pass = false;
};

/// Checks the reflection principle on a computed half-disc solution: the
/// extension must satisfy the reflected equation on the lower half-disc with
/// residual comparable to the upper one.  The lower-half derivatives come
/// from an independent projection of the assembled extension, so sign or
/// continuity defects in ext / J~ show up here.
inline ReflectionReport verify_reflection(const HalfDiscFunction& u, const AlmostComplexStructure& J,
                                          double beta_tol = 1e-8) {
    ReflectionReport rep;
    rep.beta_imag_sup = u.beta_imag_sup();
    if (rep.beta_imag_sup > beta_tol * std::max(1.0, u.sup_norm()))
        throw std::invalid_argument("verify_reflection: boundary values leave W = R^n on beta");

    const ExtResult e = ext(u);
    const GridFunction full = e.function.projected();
    rep.ext_projection_residual = full.projection_residual();

    const BundleStructure Jt = reflect_structure(J, u);
    const GridFunction res = dbar_j(Jt, full);

    const auto& grid = *u.grid();
    for (size_t idx = 0; idx < grid.node_count(); ++idx) {
        const Complex z = grid.node(idx);
        if (std::abs(z) >= 1.0 - 1e-12) continue;  // interior nodes only
        double m = 0.0;
        for (int c = 0; c < res.n(); ++c) m = std::max(m, std::abs(res.value(idx, c)));
        if (z.imag() > 1e-14) rep.base_residual = std::max(rep.base_residual, m);
        else if (z.imag() < -1e-14) rep.reflected_residual = std::max(rep.reflected_residual, m);
    }
    rep.pass = rep.reflected_residual <= std::max(10.0 * rep.base_residual, 1e-11);
    return rep;
}

/// Biholomorphic map H of the disc onto the upper half-disc fixing -1 and 1:
/// the Moebius map mu(z) = (z - i)/(1 - i z) onto the lower half-plane
/// followed by the inverse Joukowski map w -> w - sqrt(w-1) sqrt(w+1).
/// H is only C^{1/2} at the two corners.
struct HalfDiscMap {
    Complex forward(Complex zeta) const {
        if (zeta == Complex(1.0)) return 1.0;
        if (zeta == Complex(-1.0)) return -1.0;
        if (std::abs(zeta + Complex(0.0, 1.0)) < 1e-14) return 0.0;  // mu pole
        const Complex w = clamp_lower(mu(zeta));
        return w - branch_sqrt(w - 1.0) * branch_sqrt(w + 1.0);
    }

    Complex inverse(Complex z) const {
        if (z == Complex(1.0)) return 1.0;
        if (z == Complex(-1.0)) return -1.0;
        if (z == Complex(0.0)) return Complex(0.0, -1.0);
        const Complex w = 0.5 * (z + 1.0 / z);
        return (w + Complex(0.0, 1.0)) / (1.0 + Complex(0.0, 1.0) * w);
    }

    /// Complex derivative H'(zeta); not valid at the corners.
    Complex forward_deriv(Complex zeta) const {
        const Complex w = clamp_lower(mu(zeta));
        const Complex root = branch_sqrt(w - 1.0) * branch_sqrt(w + 1.0);
        const Complex dmu = 2.0 / ((1.0 - Complex(0.0, 1.0) * zeta) * (1.0 - Complex(0.0, 1.0) * zeta));
        return dmu * (1.0 - w / root);
    }

private:
    static Complex mu(Complex zeta) {
        return (zeta - Complex(0.0, 1.0)) / (1.0 - Complex(0.0, 1.0) * zeta);
    }

    /// mu maps the closed disc into the closed lower half-plane; stray
    /// positive imaginary parts are rounding noise and would flip the
    /// square-root branch.
    static Complex clamp_lower(Complex w) {
        if (w.imag() > 0.0) return Complex(w.real(), -0.0);
        return w;
    }

    /// Principal square root taken from the closure of the lower half-plane:
    /// on the real axis the limit from below is the right branch.
    static Complex branch_sqrt(Complex v) {
        if (v.imag() == 0.0) return std::sqrt(Complex(v.real(), -0.0));
        return std::sqrt(v);
    }
};

inline HalfDiscMap halfdisc_map() { return HalfDiscMap{}; }

struct AnalyticityOptions {
    double solve_tol = 1e-9;
    double pass_tol = 1e-6;
    double strip_radius = 0.35;
    SolveMethod method = SolveMethod::newton;
};

struct AnalyticityReport {
    double solve_residual = 0.0;       // full-disc solve residual (path 1)
    double beta_imag_sup = 0.0;        // realness of u on the segment
    double pullback_residual = 0.0;    // equation residual of u o H at interior samples
    double resolve_residual = 0.0;     // path-2 solve residual on the straddling disc
    double disagreement = 0.0;         // sup |resolved - reflected| on the strip
    bool pass = false;
};

/// Desk-scale reflection check: solve the half-disc problem
/// with W = R^n contact along beta (encoded as the conjugation-symmetric
/// full-disc problem with even cosine data), reflect the solution and the
/// structure, re-solve independently on a small disc straddling beta, and
/// compare the two J-holomorphic extensions on an interior strip.
inline AnalyticityReport analyticity_experiment(const DeformationTensor& A, const Fourier& phi,
                                                const GridPtr& grid, const AnalyticityOptions& opts = {}) {
    if (A.n() != 1 || phi.n() != 1)
        throw std::invalid_argument("analyticity_experiment: scalar problems only");
    // The W = R^n contact needs the structure real on the reals:
    // conj(A(conj z)) = A(z).
    for (const CVec& z : sample_points(1, 12, 0.8)) {
        const Complex mirrored = std::conj(CMat(A(std::conj(z(0))))(0, 0));
        if (std::abs(CMat(A(z(0)))(0, 0) - mirrored) > 1e-10)
            throw std::invalid_argument("analyticity_experiment: structure is not real on R^n");
    }
    // Even (cosine) data: phi(conj z) = phi(z).
    Fourier data = phi.real_part();
    for (int m = 1; m <= data.max_mode(); ++m) {
        const Complex even = 0.5 * (data.coeff(m, 0) + data.coeff(-m, 0));
        data.set_coeff(m, 0, Complex(even.real(), 0.0));
        data.set_coeff(-m, 0, Complex(even.real(), 0.0));
    }
    data.set_coeff(0, 0, Complex(data.coeff(0, 0).real(), 0.0));

    AnalyticityReport rep;

    SolverOptions sopt;
    sopt.tol = opts.solve_tol;
    sopt.method = opts.method;
    const SolverReport path1 = solve_rh(RHProblem{A, data, RVec::Zero(1)}, sopt, grid);
    rep.solve_residual = path1.refined_residual;
    const PolyMap u = path1.solution->spectral();

    const HalfDiscFunction uhalf = HalfDiscFunction::restriction(*path1.solution);
    rep.beta_imag_sup = uhalf.beta_imag_sup();

    // Conformal-invariance check through the half-disc map: v = u o H solves
    // the same equation, v_zbar = A(v) conj(v_z), on interior samples.
    {
        const HalfDiscMap H = halfdisc_map();
        const PolyMap du = u.d();
        const PolyMap dbu = u.dbar();
        for (const CVec& zv : sample_points(1, 32, 0.9, 99u)) {
            const Complex zeta = zv(0);
            if (std::abs(zeta - 1.0) < 1e-3 || std::abs(zeta + 1.0) < 1e-3) continue;
            const Complex hz = H.forward(zeta);
            const Complex hp = H.forward_deriv(zeta);
            const Complex vz = du[0].eval(hz) * hp;
            const Complex vzb = dbu[0].eval(hz) * std::conj(hp);
            const Complex val = u[0].eval(hz);
            const Complex resid = vzb - CMat(A(val))(0, 0) * std::conj(vz);
            rep.pullback_residual = std::max(rep.pullback_residual, std::abs(resid));
        }
    }

    // Path 2: independent re-solve on the disc D = { |z| <= rho } straddling
    // beta, with the reflected structure and boundary data taken from ext(u).
    const double rho = opts.strip_radius;
    const AlmostComplexStructure J = j_from_deformation(A);
    const BundleStructure Jt = reflect_structure(J, uhalf);

    const auto ext_eval = [&u](Complex z) -> Complex {
        if (z.imag() >= 0.0) return u[0].eval(z);
        return std::conj(u[0].eval(std::conj(z)));
    };

    const BundleStructure Jsub(1, [Jt, rho](Complex zp) { return Jt(rho * zp); });
    const int na = grid->n_angular();
    std::vector<Complex> ring(static_cast<size_t>(na));
    for (int j = 0; j < na; ++j)
        ring[static_cast<size_t>(j)] = ext_eval(rho * std::polar(1.0, 2.0 * std::numbers::pi * j / na));
    const Fourier sub_data = grid->boundary_modes(ring).real_part();
    RVec sub_anchor(1);
    sub_anchor(0) = ext_eval(Complex(0.0)).imag();

    const SolverReport path2 = solve_rh_field(Jsub, sub_data, sub_anchor, sopt, grid);
    rep.resolve_residual = path2.refined_residual;
    const PolyMap w = path2.solution->spectral();

    // Sup-disagreement on the interior strip around beta.
    for (size_t idx = 0; idx < grid->node_count(); ++idx) {
        const Complex zp = grid->node(idx);
        if (std::abs(zp) > 0.9) continue;
        if (std::abs((rho * zp).imag()) > rho / 2.0) continue;
        rep.disagreement = std::max(rep.disagreement, std::abs(w[0].eval(zp) - ext_eval(rho * zp)));
    }
    rep.pass = rep.disagreement <= opts.pass_tol;
    return rep;
}

}  // namespace holodisc
