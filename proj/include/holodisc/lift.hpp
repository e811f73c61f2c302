#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "holodisc/acs.hpp"
#include "holodisc/grid.hpp"

namespace holodisc {

namespace detail {

/// Permutation sending the global real layout of C^{2n},
/// (Re z, Re t, Im z, Im t), onto the block trivialization TX + TX,
/// (Re z, Im z, Re t, Im t).
inline Eigen::PermutationMatrix<Eigen::Dynamic> tangent_permutation(int n) {
    Eigen::VectorXi p(4 * n);
    for (int j = 0; j < n; ++j) {
        p(j) = j;                  // Re z
        p(n + j) = 2 * n + j;      // Re t
        p(2 * n + j) = n + j;      // Im z
        p(3 * n + j) = 3 * n + j;  // Im t
    }
    return Eigen::PermutationMatrix<Eigen::Dynamic>(p);
}

/// Tangent-bundle lift of a structure: over (z, t) in C^n x C^n the block
/// matrix [[J(z), 0], [t^a d_a J(z), J(z)]] in the TX + TX trivialization,
/// with t^a running over the 2n real coordinates of t.  Linear in t;
/// derivatives of any order reduce to base derivatives.
class LiftedStructureRep final : public StructureRep {
public:
    explicit LiftedStructureRep(std::shared_ptr<const StructureRep> base)
        : base_(std::move(base)), perm_(tangent_permutation(base_->dim())) {}

    int dim() const override { return 2 * base_->dim(); }

    RMat eval(const CVec& w) const override { return deriv(w, {}); }

    RMat deriv(const CVec& w, std::span<const int> coords) const override {
        // Conjugate the block form back into the global real layout.
        const RMat B = block_deriv(w, coords);
        return RMat(perm_.inverse() * B * perm_);
    }

    /// Same derivative in the TX + TX block trivialization.
    RMat block_deriv(const CVec& w, std::span<const int> coords) const {
        const int n = base_->dim();
        const CVec z = w.head(n);
        const CVec t = w.segment(n, n);
        const RVec tr = real_rep(t);

        // Split the requested derivative into base-point and tangent coords.
        std::vector<int> zc, tc;
        for (const int a : coords) {
            // Global layout: x = (Re z, Re t), y = (Im z, Im t).
            const int block = a / n;  // 0: Re z, 1: Re t, 2: Im z, 3: Im t
            const int j = a % n;
            if (block == 0) zc.push_back(j);
            else if (block == 2) zc.push_back(n + j);
            else if (block == 1) tc.push_back(j);
            else tc.push_back(n + j);
        }
        RMat out = RMat::Zero(4 * n, 4 * n);
        if (tc.size() >= 2) return out;  // linear in t

        if (tc.empty()) {
            const RMat Dz = base_->deriv(z, zc);
            out.topLeftCorner(2 * n, 2 * n) = Dz;
            out.bottomRightCorner(2 * n, 2 * n) = Dz;
            RMat low = RMat::Zero(2 * n, 2 * n);
            for (int a = 0; a < 2 * n; ++a) {
                if (tr(a) == 0.0) continue;
                std::vector<int> c = zc;
                c.push_back(a);
                low += tr(a) * base_->deriv(z, c);
            }
            out.bottomLeftCorner(2 * n, 2 * n) = low;
        } else {
            std::vector<int> c = zc;
            c.push_back(tc.front());
            out.bottomLeftCorner(2 * n, 2 * n) = base_->deriv(z, c);
        }
        return out;
    }

    bool exact_derivatives() const override { return base_->exact_derivatives(); }
    int poly_degree() const override { return base_->poly_degree(); }
    const StructureRep& base() const { return *base_; }

private:
    std::shared_ptr<const StructureRep> base_;
    Eigen::PermutationMatrix<Eigen::Dynamic> perm_;
};

}  // namespace detail

/// The [[J, 0], [t dJ, J]] block form of a lifted structure at (z, t).
inline RMat lifted_block_form(const AlmostComplexStructure& lifted, const CVec& w) {
    const auto* rep = dynamic_cast<const detail::LiftedStructureRep*>(&lifted.rep());
    if (!rep) throw std::invalid_argument("lifted_block_form: not a lifted structure");
    return rep->block_deriv(w, {});
}

/// Degrees of the lifted blocks when the base structure is polynomial:
/// the diagonal keeps the base degree, the subdiagonal drops one in the base
/// variables (and is linear in the tangent coordinates).
struct LiftDegreeInfo {
    int diag_degree = -1;
    int offdiag_base_degree = -1;
};

/// J^c on the tangent bundle.  Needs at least one derivative of J: exact
/// representations always qualify, callables only with declared C^{k>=1}.
inline AlmostComplexStructure lift_structure(const AlmostComplexStructure& J) {
    if (!J.rep().exact_derivatives() && J.smoothness().k < 1)
        throw std::invalid_argument("lift_structure: structure representation is not differentiable");
    Smoothness s{std::max(0, J.smoothness().k - 1), J.smoothness().alpha};
    return AlmostComplexStructure::from_rep(
        std::make_shared<detail::LiftedStructureRep>(J.rep_ptr()), s);
}

inline LiftDegreeInfo lift_degree_info(const AlmostComplexStructure& lifted) {
    const auto* rep = dynamic_cast<const detail::LiftedStructureRep*>(&lifted.rep());
    if (!rep) throw std::invalid_argument("lift_degree_info: not a lifted structure");
    const int d = rep->base().poly_degree();
    if (d < 0) return {};
    return LiftDegreeInfo{d, d > 0 ? d - 1 : 0};
}

/// Lifted map u^c = (u, du(e_1)) with e_1 = (1, 0), i.e. du(e_1) = du/dxi.
struct LiftedMap {
    GridFunction uc;

    GridFunction base() const {
        const int n = uc.n() / 2;
        PolyMap p(n);
        for (int c = 0; c < n; ++c) p[c] = uc.spectral()[c];
        return GridFunction::from_poly(uc.grid(), p);
    }
};

inline LiftedMap lift_map(const GridFunction& u) {
    const GridFunction g = u.has_spectral() ? u : u.projected();
    const PolyMap& p = g.spectral();
    const PolyMap uxi = p.d() + p.dbar();
    PolyMap stacked(2 * g.n());
    for (int c = 0; c < g.n(); ++c) {
        stacked[c] = p[c];
        stacked[g.n() + c] = uxi[c];
    }
    return LiftedMap{GridFunction::from_poly(g.grid(), stacked)};
}

/// TW for the model boundaries: W x W inside C^{2n}.
inline TotallyRealBoundary lift_totally_real(const TotallyRealBoundary& W) {
    TotallyRealBoundary TW = W;
    TW.n = 2 * W.n;
    return TW;
}

/// sup over interior nodes of |du/deta - J(u) du/dxi| (the matrix form of
/// the holomorphy equation; used to compare base and lifted residuals).
inline double j_holomorphy_residual(const GridFunction& u, const AlmostComplexStructure& J) {
    const GridFunction g = u.has_spectral() ? u : u.projected();
    if (J.n() != g.n()) throw std::invalid_argument("j_holomorphy_residual: dimension mismatch");
    const auto& grid = *g.grid();
    const PolyMap& p = g.spectral();
    const PolyMap uxi = p.d() + p.dbar();
    const PolyMap ueta = Complex(0.0, 1.0) * (p.d() - p.dbar());
    double res = 0.0;
    for (size_t idx = 0; idx < grid.node_count(); ++idx) {
        const Complex z = grid.node(idx);
        CVec uval(g.n()), xi(g.n()), eta(g.n());
        for (int c = 0; c < g.n(); ++c) {
            uval(c) = p[c].eval(z);
            xi(c) = uxi[c].eval(z);
            eta(c) = ueta[c].eval(z);
        }
        const CVec lhs = eta - detail::apply_real(J(uval), xi);
        res = std::max(res, lhs.lpNorm<Eigen::Infinity>());
    }
    return res;
}

}  // namespace holodisc
