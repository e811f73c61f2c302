#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "holodisc/acs.hpp"
#include "holodisc/fourier.hpp"
#include "holodisc/grid.hpp"
#include "holodisc/norms.hpp"
#include "holodisc/transforms.hpp"

namespace holodisc {

enum class SolveMethod { newton, picard };

inline const char* to_string(SolveMethod m) { return m == SolveMethod::newton ? "newton" : "picard"; }

/// Which boundary arc the real data is required to vanish on (the T^{1,p}_0
/// style classes of problems attached to a totally real manifold along an arc).
enum class ZeroArc { none, upper, lower };

struct RHProblem {
    DeformationTensor A;
    Fourier phi;   // real-valued boundary target for Re u|_S
    RVec anchor;   // a = Im u(0)
    ZeroArc zero_arc = ZeroArc::none;
    // A trigonometric polynomial can vanish on an arc only up to its
    // truncation error, so membership in the vanishing class is toleranced.
    double zero_arc_tol = 1e-5;
    std::optional<PolyMap> initial_guess;
};

struct SolverOptions {
    double tol = 1e-9;
    int max_iterations = 50;
    int divergence_window = 3;
    SolveMethod method = SolveMethod::newton;
    double admissibility_gate = 0.5;
    int inner_max_iterations = 60;
};

struct SolverReport {
    std::optional<GridFunction> solution;
    std::vector<double> residual_history;
    double final_residual = 0.0;
    double boundary_error = 0.0;
    double anchor_error = 0.0;
    int iterations = 0;
    SolveMethod method = SolveMethod::newton;
    bool converged = false;
    double projection_residual = 0.0;        // worst grid-projection residual seen
    double refined_residual = 0.0;           // equation residual re-checked on a finer grid
    std::vector<std::pair<std::string, double>> norms;
};

struct SolverError : std::runtime_error {
    SolverError(const std::string& msg, SolverReport r) : std::runtime_error(msg), report(std::move(r)) {}
    SolverReport report;
};

/// Exact inverse of the linearized operator at the standard structure:
///   u = T h - i Im(T h)(0) + i a + T_SW(psi - Re (T h)|_S)
/// satisfies dbar u = h, Re u|_S = psi, Im u(0) = a.
inline PolyMap solve_linear_rh(const PolyMap& h, const Fourier& psi, const RVec& a) {
    const int n = h.n();
    if (psi.n() != n || a.size() != n)
        throw std::invalid_argument("solve_linear_rh: shape mismatch");
    const PolyMap Th = cauchy_green_poly(h);
    const Fourier correction = psi - boundary_trace(Th).real_part();
    PolyMap u = Th + schwarz(correction.real_part());
    for (int j = 0; j < n; ++j) {
        const Complex c00 = Th[j].coeff(0, 0);
        u[j].add_coeff(0, 0, Complex(0.0, a(j) - c00.imag()));
    }
    return u;
}

inline GridFunction solve_linear_rh(const GridFunction& h, const Fourier& psi, const RVec& a) {
    const GridFunction g = h.has_spectral() ? h : h.projected();
    return GridFunction::from_poly(g.grid(), solve_linear_rh(g.spectral(), psi, a));
}

namespace detail {

/// Deformation evaluated at (base point, map value); the second functor is
/// its derivative in the value argument along a direction.
using MaterialFn = std::function<CMat(Complex, const CVec&)>;
using MaterialDerivFn = std::function<CMat(Complex, const CVec&, const CVec&)>;

struct NodeData {
    std::vector<CVec> u;
    std::vector<CVec> du;    // d/dz
    std::vector<CVec> dbar;  // d/dzbar
};

inline NodeData evaluate_iterate(const PolyMap& u, const DiscGrid& grid) {
    NodeData nd;
    const size_t N = grid.node_count();
    const int n = u.n();
    nd.u.assign(N, CVec(n));
    nd.du.assign(N, CVec(n));
    nd.dbar.assign(N, CVec(n));
    const PolyMap du = u.d();
    const PolyMap db = u.dbar();
    for (size_t idx = 0; idx < N; ++idx) {
        const Complex z = grid.node(idx);
        for (int c = 0; c < n; ++c) {
            nd.u[idx](c) = u[c].eval(z);
            nd.du[idx](c) = du[c].eval(z);
            nd.dbar[idx](c) = db[c].eval(z);
        }
    }
    return nd;
}

inline PolyMap project_values(const GridPtr& grid, const std::vector<CVec>& vals, int n,
                              double* projection_residual) {
    std::vector<Complex> flat(grid->node_count() * static_cast<size_t>(n));
    for (size_t idx = 0; idx < grid->node_count(); ++idx)
        for (int c = 0; c < n; ++c) flat[idx * static_cast<size_t>(n) + c] = vals[idx](c);
    const GridFunction g = GridFunction::from_values(grid, std::move(flat), n).projected();
    if (projection_residual) *projection_residual = std::max(*projection_residual, g.projection_residual());
    return g.spectral();
}

inline void validate_zero_arc(const Fourier& phi, ZeroArc arc, double tol) {
    if (arc == ZeroArc::none) return;
    const double scale = std::max(1.0, phi.sup_norm());
    double worst = 0.0;
    for (int i = 1; i < 64; ++i) {
        const double th = (arc == ZeroArc::upper ? 0.0 : std::numbers::pi) + std::numbers::pi * i / 64.0;
        for (const Complex& v : phi.eval(th)) worst = std::max(worst, std::abs(v));
    }
    if (worst > tol * scale)
        throw std::invalid_argument("boundary data does not vanish on the declared arc");
}

inline SolverReport solve_rh_core(const MaterialFn& material, const MaterialDerivFn& dmaterial,
                                  int n, const Fourier& phi, const RVec& a, ZeroArc zero_arc,
                                  double zero_arc_tol, const std::optional<PolyMap>& initial,
                                  const SolverOptions& opt, const GridPtr& grid) {
    if (!phi.is_real(1e-10)) throw std::invalid_argument("solve_rh: boundary data must be real-valued");
    if (a.size() != n) throw std::invalid_argument("solve_rh: anchor dimension mismatch");
    validate_zero_arc(phi, zero_arc, zero_arc_tol);

    SolverReport rep;
    rep.method = opt.method;

    PolyMap u = initial ? *initial : solve_linear_rh(PolyMap(n), phi, a);
    const double scale0 = std::max(1.0, phi.sup_norm() + a.lpNorm<Eigen::Infinity>());

    const auto nonlinear_values = [&](const NodeData& nd) {
        std::vector<CVec> h(grid->node_count());
        for (size_t idx = 0; idx < grid->node_count(); ++idx)
            h[idx] = material(grid->node(idx), nd.u[idx]) * nd.du[idx].conjugate();
        return h;
    };

    const auto defects = [&](const PolyMap& w) {
        const Fourier tr = boundary_trace(w).real_part();
        Fourier bdef = phi - tr;
        RVec adef(n);
        for (int c = 0; c < n; ++c) adef(c) = a(c) - w[c].coeff(0, 0).imag();
        return std::make_pair(bdef.real_part(), adef);
    };

    int rising = 0;
    for (int iter = 0; iter <= opt.max_iterations; ++iter) {
        const NodeData nd = evaluate_iterate(u, *grid);
        const auto h_vals = nonlinear_values(nd);
        double res = 0.0;
        for (size_t idx = 0; idx < grid->node_count(); ++idx)
            res = std::max(res, (nd.dbar[idx] - h_vals[idx]).lpNorm<Eigen::Infinity>());
        rep.residual_history.push_back(res);
        rep.iterations = iter;

        auto [bdef, adef] = defects(u);
        const double bderr = bdef.sup_norm();
        const double aderr = adef.size() ? adef.lpNorm<Eigen::Infinity>() : 0.0;

        if (res <= opt.tol && bderr <= opt.tol && aderr <= opt.tol) {
            rep.converged = true;
            rep.final_residual = res;
            rep.boundary_error = bderr;
            rep.anchor_error = aderr;
            break;
        }

        if (rep.residual_history.size() >= 2 && res > rep.residual_history[rep.residual_history.size() - 2]) {
            if (++rising >= opt.divergence_window) {
                rep.final_residual = res;
                throw SolverError("solve_rh: residual increased for " +
                                      std::to_string(opt.divergence_window) + " consecutive steps",
                                  std::move(rep));
            }
        } else {
            rising = 0;
        }

        if (iter == opt.max_iterations) {
            rep.final_residual = res;
            throw SolverError("solve_rh: max iterations exceeded", std::move(rep));
        }

        if (opt.method == SolveMethod::picard) {
            u = solve_linear_rh(project_values(grid, h_vals, n, &rep.projection_residual), phi, a);
            continue;
        }

        // Newton step: solve the true linearization, preconditioned by the
        // exactly invertible standard-structure operator.  r = h - dbar u is
        // the negative residual; the correction solves
        //   dbar d - A(u) conj(d d) - (dA(u)[d]) conj(du) = r.
        std::vector<CVec> r_vals(grid->node_count());
        for (size_t idx = 0; idx < grid->node_count(); ++idx) r_vals[idx] = h_vals[idx] - nd.dbar[idx];

        const double eta = std::min(0.3, std::pow(res / scale0, 0.6));
        const double inner_tol = std::max(eta * res, 0.02 * opt.tol);

        PolyMap delta = solve_linear_rh(project_values(grid, r_vals, n, &rep.projection_residual), bdef, adef);
        double prev_inc = -1.0;
        int inner_rising = 0;
        for (int j = 0; j < opt.inner_max_iterations; ++j) {
            const PolyMap ddelta = delta.d();
            std::vector<CVec> g_vals(grid->node_count());
            for (size_t idx = 0; idx < grid->node_count(); ++idx) {
                const Complex z = grid->node(idx);
                CVec dval(n), deltaval(n);
                for (int c = 0; c < n; ++c) {
                    dval(c) = ddelta[c].eval(z);
                    deltaval(c) = delta[c].eval(z);
                }
                g_vals[idx] = r_vals[idx] + material(z, nd.u[idx]) * dval.conjugate() +
                              dmaterial(z, nd.u[idx], deltaval) * nd.du[idx].conjugate();
            }
            PolyMap next = solve_linear_rh(project_values(grid, g_vals, n, &rep.projection_residual), bdef, adef);
            double inc = 0.0;
            const PolyMap diff = next - delta;
            for (size_t idx = 0; idx < grid->node_count(); ++idx) {
                const Complex z = grid->node(idx);
                for (int c = 0; c < n; ++c) inc = std::max(inc, std::abs(diff[c].eval(z)));
            }
            delta = std::move(next);
            if (inc <= inner_tol) break;
            if (prev_inc >= 0.0 && inc > prev_inc) {
                if (++inner_rising >= 2) {
                    rep.final_residual = res;
                    throw SolverError("solve_rh: inner linearized iteration diverges", std::move(rep));
                }
            } else {
                inner_rising = 0;
            }
            prev_inc = inc;
        }
        u += delta;
    }

    if (!rep.converged) {
        rep.final_residual = rep.residual_history.empty() ? 0.0 : rep.residual_history.back();
        throw SolverError("solve_rh: did not converge", std::move(rep));
    }

    GridFunction sol = GridFunction::from_poly(grid, u);
    rep.solution = sol;

    // Re-check the equation residual on a finer grid (the node residual on
    // the working grid could in principle hide aliasing).
    {
        const GridPtr fine = make_disc_grid(grid->n_radial() + 6, grid->n_angular() * 2);
        const NodeData nd = evaluate_iterate(u, *fine);
        double res = 0.0;
        for (size_t idx = 0; idx < fine->node_count(); ++idx) {
            const CVec h = material(fine->node(idx), nd.u[idx]) * nd.du[idx].conjugate();
            res = std::max(res, (nd.dbar[idx] - h).lpNorm<Eigen::Infinity>());
        }
        rep.refined_residual = res;
    }

    rep.norms.emplace_back("C^{1,0.5}", holder_norm(sol, RegularityIndex{1, 0.5, 2.0}, true).value);
    rep.norms.emplace_back("L^{1,3}", sobolev_norm(sol, RegularityIndex{1, 0.5, 3.0}).value);
    return rep;
}

}  // namespace detail

/// Newton (default) or Picard solve of the boundary problem
///   u_zbar = A(u) conj(u_z),  Re u|_S = phi,  Im u(0) = a.
inline SolverReport solve_rh(const RHProblem& p, const SolverOptions& opt, const GridPtr& grid) {
    if (p.A.sup_bound() > opt.admissibility_gate)
        throw std::invalid_argument("solve_rh: deformation exceeds the admissibility gate");
    const DeformationTensor A = p.A;
    detail::MaterialFn material = [A](Complex, const CVec& u) { return A(u); };
    detail::MaterialDerivFn dmat = [A](Complex, const CVec& u, const CVec& delta) {
        return A.dirderiv(u, delta);
    };
    return detail::solve_rh_core(material, dmat, p.A.n(), p.phi, p.anchor, p.zero_arc,
                                 p.zero_arc_tol, p.initial_guess, opt, grid);
}

/// Same boundary problem for a point-dependent (bundle) structure: the
/// deformation tensor is a field over the disc and the equation is linear.
inline SolverReport solve_rh_field(const BundleStructure& J, const Fourier& phi, const RVec& a,
                                   const SolverOptions& opt, const GridPtr& grid,
                                   std::optional<PolyMap> initial = std::nullopt) {
    detail::MaterialFn material = [J](Complex z, const CVec&) { return J.deformation(z); };
    detail::MaterialDerivFn dmat = [nn = J.n()](Complex, const CVec&, const CVec&) {
        return CMat::Zero(nn, nn);
    };
    return detail::solve_rh_core(material, dmat, J.n(), phi, a, ZeroArc::none, 0.0, initial, opt,
                                 grid);
}

/// Phi_J: u  ->  u - T_CG( A(u) conj(u_z) ); holomorphic exactly when u
/// solves the J-holomorphy equation.
inline GridFunction phi_j(const GridFunction& u, const DeformationTensor& A) {
    const GridFunction w = u.has_spectral() ? u : u.projected();
    const auto& grid = *w.grid();
    const detail::NodeData nd = detail::evaluate_iterate(w.spectral(), grid);
    std::vector<CVec> h(grid.node_count());
    for (size_t idx = 0; idx < grid.node_count(); ++idx)
        h[idx] = A(nd.u[idx]) * nd.du[idx].conjugate();
    double dummy = 0.0;
    const PolyMap hp = detail::project_values(w.grid(), h, w.n(), &dummy);
    return GridFunction::from_poly(w.grid(), w.spectral() - cauchy_green_poly(hp));
}

/// dbar-type operator of a bundle structure, normalized so that the standard
/// structure gives d/dzbar:  dbar_J u = (u_xi + J(z) u_eta) / 2.
inline GridFunction dbar_j(const BundleStructure& J, const GridFunction& u) {
    const GridFunction w = u.has_spectral() ? u : u.projected();
    const auto& grid = *w.grid();
    const PolyMap uxi = w.spectral().d() + w.spectral().dbar();
    const PolyMap ueta = Complex(0.0, 1.0) * (w.spectral().d() - w.spectral().dbar());
    std::vector<Complex> vals(grid.node_count() * static_cast<size_t>(w.n()));
    for (size_t idx = 0; idx < grid.node_count(); ++idx) {
        const Complex z = grid.node(idx);
        CVec xi(w.n()), eta(w.n());
        for (int c = 0; c < w.n(); ++c) {
            xi(c) = uxi[c].eval(z);
            eta(c) = ueta[c].eval(z);
        }
        const CVec out = 0.5 * (xi + detail::apply_real(J(z), eta));
        for (int c = 0; c < w.n(); ++c) vals[idx * static_cast<size_t>(w.n()) + c] = out(c);
    }
    return GridFunction::from_values(w.grid(), std::move(vals), w.n());
}

struct NeumannReport {
    int terms = 0;
    int predicted_terms = 0;
    double contraction = 0.0;
    double forward_residual = 0.0;
    double input_norm = 0.0;
};

/// Neumann-series inverse of (dbar_J o T_CG): returns g with
/// dbar_J(T_CG g) = f to the requested tolerance.  The series is
/// g = sum (-D)^m f with D = (dbar_J - dbar_{J_st}) o T_CG; it contracts
/// only for structures close enough to the standard one.
inline GridFunction neumann_inverse(const BundleStructure& J, const GridFunction& f, double tol,
                                    NeumannReport* info = nullptr) {
    const GridFunction f0 = f.has_spectral() ? f : f.projected();
    const auto& grid = *f0.grid();
    const GridPtr gp = f0.grid();
    const int n = f0.n();
    const RMat Jst = detail::j_standard(n);

    std::vector<RMat> Jnodes(grid.node_count());
    for (size_t idx = 0; idx < grid.node_count(); ++idx) Jnodes[idx] = J(grid.node(idx)) - Jst;

    const auto apply_D = [&](const PolyMap& t) {
        const PolyMap T = cauchy_green_poly(t);
        const PolyMap Teta = Complex(0.0, 1.0) * (T.d() - T.dbar());
        std::vector<CVec> vals(grid.node_count());
        for (size_t idx = 0; idx < grid.node_count(); ++idx) {
            const Complex z = grid.node(idx);
            CVec eta(n);
            for (int c = 0; c < n; ++c) eta(c) = Teta[c].eval(z);
            vals[idx] = 0.5 * detail::apply_real(Jnodes[idx], eta);
        }
        return vals;
    };

    const auto sup_of = [&](const PolyMap& t) {
        double s = 0.0;
        for (size_t idx = 0; idx < grid.node_count(); ++idx) {
            const Complex z = grid.node(idx);
            for (int c = 0; c < n; ++c) s = std::max(s, std::abs(t[c].eval(z)));
        }
        return s;
    };

    PolyMap term = f0.spectral();
    PolyMap g = term;
    const double norm0 = sup_of(term);
    double prev_norm = norm0;
    double qhat = 0.0;
    std::vector<double> ratios;
    int terms = 1;
    double proj_resid = 0.0;

    for (int m = 0; m < 300; ++m) {
        auto vals = apply_D(term);
        for (auto& v : vals) v *= -1.0;
        term = detail::project_values(gp, vals, n, &proj_resid);
        const double tn = sup_of(term);
        double ratio = 0.0;
        if (prev_norm > 0.0) {
            ratio = tn / prev_norm;
            ratios.push_back(ratio);
            qhat = std::max(qhat, ratio);
        }
        if (tn == 0.0) break;
        g += term;
        ++terms;
        prev_norm = tn;
        if (tn <= 0.5 * tol * (1.0 - std::min(qhat, 0.999))) break;
        if (ratio >= 1.0) throw std::runtime_error("structure not close enough to standard");
        if (m == 299) throw std::runtime_error("neumann_inverse: series did not reach tolerance");
    }

    if (info) {
        info->terms = terms;
        info->input_norm = norm0;
        double qbar = 0.0;
        if (!ratios.empty()) {
            double s = 0.0;
            for (const double q : ratios) s += std::log(std::max(q, 1e-300));
            qbar = std::exp(s / static_cast<double>(ratios.size()));
        }
        info->contraction = qbar;
        if (qbar > 0.0 && qbar < 1.0 && norm0 > 0.0) {
            const double target = 0.5 * tol * (1.0 - qbar) / norm0;
            info->predicted_terms = 1 + std::max(0, static_cast<int>(std::ceil(std::log(target) / std::log(qbar))));
        } else {
            info->predicted_terms = terms;
        }
    }

    GridFunction gf = GridFunction::from_poly(gp, g);
    if (info) {
        const GridFunction forward = dbar_j(J, cauchy_green(gf));
        double res = 0.0;
        for (size_t idx = 0; idx < grid.node_count(); ++idx)
            for (int c = 0; c < n; ++c)
                res = std::max(res, std::abs(forward.value(idx, c) - f0.value(idx, c)));
        info->forward_residual = res;
    }
    return gf;
}

enum class GczNorm { lp, holder };

/// Empirical lower bound for the generalized Giraud / Calderon-Zygmund
/// constant: max over samples of |du| / |dbar_J u| in the requested norm.
/// Samples with vanishing dbar_J u are skipped.
inline double estimate_gcz_constant(const BundleStructure& J, std::span<const GridFunction> samples,
                                    GczNorm kind, double param) {
    double best = -1.0;
    for (const GridFunction& s : samples) {
        const GridFunction u = s.has_spectral() ? s : s.projected();
        const PolyMap uxi = u.spectral().d() + u.spectral().dbar();
        const PolyMap ueta = Complex(0.0, 1.0) * (u.spectral().d() - u.spectral().dbar());
        PolyMap du(2 * u.n());
        for (int c = 0; c < u.n(); ++c) {
            du[c] = uxi[c];
            du[u.n() + c] = ueta[c];
        }
        const GridFunction dug = GridFunction::from_poly(u.grid(), du);
        const GridFunction den = dbar_j(J, u).projected();

        double num_val, den_val;
        if (kind == GczNorm::lp) {
            const RegularityIndex idx{0, 0.5, param};
            num_val = sobolev_norm(dug, idx).value;
            den_val = sobolev_norm(den, idx).value;
        } else {
            const RegularityIndex idx{0, param, 2.0};
            num_val = holder_norm(dug, idx, true).value;
            den_val = holder_norm(den, idx, true).value;
        }
        if (den_val <= 1e-13 * std::max(1.0, num_val)) continue;  // dbar_J u = 0: skip
        best = std::max(best, num_val / den_val);
    }
    if (best < 0.0) throw std::invalid_argument("estimate_gcz_constant: empty sample set");
    return best;
}

/// Least-squares slope of log r_{k+1} against log r_k over the final
/// `steps` residual pairs above the floor; the Newton ratio-test exponent.
inline double superlinear_exponent(const std::vector<double>& residuals, double floor_value,
                                   int steps = 3) {
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i + 1 < residuals.size(); ++i)
        if (residuals[i] > floor_value && residuals[i + 1] > floor_value)
            pts.emplace_back(std::log(residuals[i]), std::log(residuals[i + 1]));
    if (pts.size() > static_cast<size_t>(steps)) pts.erase(pts.begin(), pts.end() - steps);
    if (pts.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(pts.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace holodisc
