#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "holodisc/acs.hpp"
#include "holodisc/norms.hpp"
#include "holodisc/rh_solver.hpp"

namespace holodisc {

struct ConvergencePoint {
    int index = 0;   // position in the input sequence
    double d = 0.0;  // |A_n - A|_{C^{k,alpha}}
    double e = 0.0;  // |u_n - u|_{C^{k+1,alpha}}
};

struct ConvergenceReport {
    std::vector<ConvergencePoint> points;
    double fitted_constant = 0.0;
    double exponent = 0.0;
    bool monotone_decreasing = true;
};

namespace detail {

/// Entries of (A1 - A2) sampled over the disc as a GridFunction (the
/// desk-scale stand-in for the structure-space norm).
inline GridFunction deformation_difference(const DeformationTensor& A1, const DeformationTensor& A2,
                                           const GridPtr& grid) {
    const int n = A1.n();
    return GridFunction::sample(grid, n * n, [&](Complex z) {
        CVec point = CVec::Constant(n, z);
        const CMat D = A1(point) - A2(point);
        CVec flat(n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) flat(i * n + j) = D(i, j);
        return flat;
    });
}

}  // namespace detail

/// Convergence-rate experiment: solve the boundary problem for each A_n and
/// for the limit structure A, estimate e_n = |u_n - u|_{C^{k+1,alpha}}
/// against d_n = |A_n - A|_{C^{k,alpha}}, and fit e <= C d^p on the final
/// half of the sequence by log-log least squares.
inline ConvergenceReport convergence_study(std::span<const DeformationTensor> As,
                                           const DeformationTensor& A, const Fourier& phi,
                                           const RVec& anchor, const RegularityIndex& idx,
                                           const SolverOptions& opt, const GridPtr& grid,
                                           int threads = 1) {
    idx.validate();
    if (As.size() < 3) throw std::runtime_error("convergence_study: fewer than 3 sequence entries");

    const SolverReport limit = solve_rh(RHProblem{A, phi, anchor}, opt, grid);
    const PolyMap u = limit.solution->spectral();

    std::vector<ConvergencePoint> pts(As.size());
    std::vector<std::string> errors(As.size());
    const RegularityIndex solution_idx{idx.k + 1, idx.alpha, idx.p};

    const auto run_one = [&](size_t i) {
        try {
            const SolverReport rep = solve_rh(RHProblem{As[i], phi, anchor}, opt, grid);
            const GridFunction diff =
                GridFunction::from_poly(grid, rep.solution->spectral() - u);
            pts[i].index = static_cast<int>(i);
            pts[i].e = holder_norm(diff, solution_idx, true).value;
            pts[i].d = holder_norm(detail::deformation_difference(As[i], A, grid), idx, true).value;
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    };

    if (threads <= 1) {
        for (size_t i = 0; i < As.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        const size_t T = std::min<size_t>(static_cast<size_t>(threads), As.size());
        for (size_t t = 0; t < T; ++t)
            pool.emplace_back([&, t] {
                for (size_t i = t; i < As.size(); i += T) run_one(i);
            });
        for (auto& th : pool) th.join();
    }

    for (size_t i = 0; i < As.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error("convergence_study: solve failed at index " + std::to_string(i) +
                                     ": " + errors[i]);

    ConvergenceReport rep;
    rep.points = pts;
    for (size_t i = 1; i < pts.size(); ++i)
        if (pts[i].e > pts[i - 1].e + 1e-14) rep.monotone_decreasing = false;

    // Fit on the last half of the sequence (preasymptotic points dropped).
    const size_t start = pts.size() - (pts.size() + 1) / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = start; i < pts.size(); ++i) {
        if (pts[i].d <= 0.0 || pts[i].e <= 0.0) continue;
        const double x = std::log(pts[i].d);
        const double y = std::log(pts[i].e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2) {
        rep.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        rep.fitted_constant = std::exp((sy - rep.exponent * sx) / m);
    }
    return rep;
}

}  // namespace holodisc
