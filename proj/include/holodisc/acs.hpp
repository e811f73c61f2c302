#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "holodisc/grid.hpp"
#include "holodisc/linalg.hpp"
#include "holodisc/poly.hpp"

namespace holodisc {

/// Smoothness class C^{k,alpha} claimed by a constructor.
struct Smoothness {
    int k = 1;
    double alpha = 0.5;
};

/// Pointwise conversion J -> A_J: the anti-linear part of
/// (J_st + J)^{-1} (J_st - J), expressed as the complex n x n matrix A with
/// A conj(v) equal to that endomorphism.  Requires J^2 = -Id.
inline CMat deformation_matrix(const RMat& J, double tol = 1e-8) {
    const int n = static_cast<int>(J.rows()) / 2;
    const RMat Jst = detail::j_standard(n);
    const RMat S = Jst + J;
    if (detail::smallest_singular_value(S) < 1e-12 * (1.0 + detail::operator_norm(S)))
        throw std::invalid_argument("structure too far from standard: J_st + J singular");
    const RMat Q = S.partialPivLu().solve(RMat(Jst - J));
    // Q must anti-commute with J_st (equivalently J^2 = -Id).
    if (detail::operator_norm(RMat(Q * Jst + Jst * Q)) > tol * (1.0 + detail::operator_norm(Q)))
        throw std::invalid_argument("J^2 != -Id");
    CMat A(n, n);
    A.real() = Q.topLeftCorner(n, n);
    A.imag() = Q.bottomLeftCorner(n, n);
    return A;
}

/// Pointwise inverse of deformation_matrix: J = J_st (I - Q)(I + Q)^{-1}
/// with Q the real representation of v -> A conj(v); needs |A| < 1.
inline RMat structure_matrix(const CMat& A) {
    const int n = static_cast<int>(A.rows());
    if (detail::operator_norm(A) >= 1.0)
        throw std::invalid_argument("deformation tensor norm must be < 1");
    const RMat Q = detail::real_rep_antilinear(A);
    const RMat I = RMat::Identity(2 * n, 2 * n);
    return detail::j_standard(n) * (I - Q) * (I + Q).partialPivLu().solve(I);
}

/// Deterministic sample points in the polydisc of the given radius.
inline std::vector<CVec> sample_points(int n, int count, double radius = 0.9,
                                       unsigned seed = 20240811u) {
    std::mt19937_64 rng(seed);
    auto u = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    std::vector<CVec> pts;
    pts.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        CVec z(n);
        for (int j = 0; j < n; ++j) z(j) = radius * Complex(u(), u()) / std::sqrt(2.0);
        pts.push_back(std::move(z));
    }
    return pts;
}

/// Backing field of an almost complex structure: a matrix-valued function of
/// the point, with directional derivatives along the real coordinates
/// (x_1..x_n, y_1..y_n).  The default derivative is a central difference;
/// exact representations override it.
class StructureRep {
public:
    virtual ~StructureRep() = default;
    virtual int dim() const = 0;
    virtual RMat eval(const CVec& z) const = 0;

    virtual RMat deriv(const CVec& z, std::span<const int> coords) const {
        if (coords.empty()) return eval(z);
        const int a = coords.back();
        const auto rest = coords.first(coords.size() - 1);
        const double h = fd_step(coords.size());
        CVec zp = z, zm = z;
        const int n = dim();
        const Complex dz = (a < n) ? Complex(h, 0.0) : Complex(0.0, h);
        const int comp = (a < n) ? a : a - n;
        zp(comp) += dz;
        zm(comp) -= dz;
        return (deriv(zp, rest) - deriv(zm, rest)) / (2.0 * h);
    }

    virtual bool exact_derivatives() const { return false; }
    /// Total polynomial degree of the entries, or -1 if not polynomial.
    virtual int poly_degree() const { return -1; }

protected:
    static double fd_step(size_t order) { return order <= 1 ? 1e-5 : 1e-4; }
};

namespace detail {

class ConstantStructureRep final : public StructureRep {
public:
    explicit ConstantStructureRep(RMat J) : J_(std::move(J)) {}
    int dim() const override { return static_cast<int>(J_.rows()) / 2; }
    RMat eval(const CVec&) const override { return J_; }
    RMat deriv(const CVec&, std::span<const int> coords) const override {
        return coords.empty() ? J_ : RMat::Zero(J_.rows(), J_.cols());
    }
    bool exact_derivatives() const override { return true; }
    int poly_degree() const override { return 0; }

private:
    RMat J_;
};

/// n = 1 structure whose four matrix entries are real-valued polynomials in
/// (z, zbar).
class PolyStructureRep final : public StructureRep {
public:
    explicit PolyStructureRep(std::array<Poly, 4> entries) : e_(std::move(entries)) {}
    int dim() const override { return 1; }

    RMat eval(const CVec& z) const override {
        RMat J(2, 2);
        for (int i = 0; i < 4; ++i) {
            const Complex v = e_[static_cast<size_t>(i)].eval(z(0));
            J(i / 2, i % 2) = v.real();
        }
        return J;
    }

    RMat deriv(const CVec& z, std::span<const int> coords) const override {
        std::array<Poly, 4> cur = e_;
        for (const int a : coords)
            for (auto& p : cur) p = (a == 0) ? p.d() + p.dbar() : Complex(0.0, 1.0) * (p.d() - p.dbar());
        RMat J(2, 2);
        for (int i = 0; i < 4; ++i) J(i / 2, i % 2) = cur[static_cast<size_t>(i)].eval(z(0)).real();
        return J;
    }

    bool exact_derivatives() const override { return true; }

    int poly_degree() const override {
        int d = 0;
        for (const auto& p : e_) d = std::max(d, p.total_degree());
        return d;
    }

private:
    std::array<Poly, 4> e_;
};

class CallableStructureRep final : public StructureRep {
public:
    CallableStructureRep(int n, std::function<RMat(const CVec&)> f) : n_(n), f_(std::move(f)) {}
    int dim() const override { return n_; }
    RMat eval(const CVec& z) const override { return f_(z); }

private:
    int n_;
    std::function<RMat(const CVec&)> f_;
};

}  // namespace detail

/// Almost complex structure on (a chart of) C^n: a field of real 2n x 2n
/// matrices with J(z)^2 = -Id.  Immutable; evaluation is pure.
class AlmostComplexStructure {
public:
    static AlmostComplexStructure standard(int n) {
        return AlmostComplexStructure(std::make_shared<detail::ConstantStructureRep>(detail::j_standard(n)),
                                      Smoothness{});
    }

    static AlmostComplexStructure constant(RMat J, Smoothness s = {}) {
        if (J.rows() != J.cols() || J.rows() % 2 != 0)
            throw std::invalid_argument("AlmostComplexStructure: matrix must be 2n x 2n");
        AlmostComplexStructure acs(std::make_shared<detail::ConstantStructureRep>(std::move(J)), s);
        acs.validate();
        return acs;
    }

    /// n = 1 structure with polynomial entries [[e00, e01], [e10, e11]].
    static AlmostComplexStructure polynomial(std::array<Poly, 4> entries, Smoothness s = {},
                                             double domain_radius = 1.0) {
        AlmostComplexStructure acs(std::make_shared<detail::PolyStructureRep>(std::move(entries)), s);
        acs.domain_radius_ = domain_radius;
        acs.validate();
        return acs;
    }

    static AlmostComplexStructure callable(int n, std::function<RMat(const CVec&)> f, Smoothness s = {}) {
        AlmostComplexStructure acs(std::make_shared<detail::CallableStructureRep>(n, std::move(f)), s);
        acs.validate();
        return acs;
    }

    static AlmostComplexStructure from_rep(std::shared_ptr<const StructureRep> rep, Smoothness s = {},
                                           bool validated = true) {
        AlmostComplexStructure acs(std::move(rep), s);
        if (!validated) acs.validate();
        return acs;
    }

    int n() const { return rep_->dim(); }
    Smoothness smoothness() const { return smooth_; }
    double domain_radius() const { return domain_radius_; }
    const StructureRep& rep() const { return *rep_; }
    std::shared_ptr<const StructureRep> rep_ptr() const { return rep_; }

    RMat operator()(const CVec& z) const { return rep_->eval(z); }

    RMat operator()(Complex z) const {
        CVec v(1);
        v(0) = z;
        return rep_->eval(v);
    }

    RMat deriv(const CVec& z, int coord) const {
        const int c[1] = {coord};
        return rep_->deriv(z, c);
    }

    RMat deriv(const CVec& z, std::span<const int> coords) const { return rep_->deriv(z, coords); }

    /// sup of |J(z)^2 + Id| over the given points; throws above tol.
    void validate(double tol = 1e-10) const {
        for (const CVec& z : sample_points(n(), 20, domain_radius_)) {
            const RMat J = rep_->eval(z);
            if (detail::operator_norm(RMat(J * J + RMat::Identity(J.rows(), J.cols()))) > tol)
                throw std::invalid_argument("J^2 != -Id");
        }
    }

    double dist_to_standard(int samples = 40) const {
        const RMat Jst = detail::j_standard(n());
        double s = 0.0;
        for (const CVec& z : sample_points(n(), samples, domain_radius_))
            s = std::max(s, detail::operator_norm(RMat(rep_->eval(z) - Jst)));
        return s;
    }

private:
    AlmostComplexStructure(std::shared_ptr<const StructureRep> rep, Smoothness s)
        : rep_(std::move(rep)), smooth_(s) {}

    std::shared_ptr<const StructureRep> rep_;
    Smoothness smooth_;
    double domain_radius_ = 1.0;
};

namespace detail {

class DeformRep {
public:
    virtual ~DeformRep() = default;
    virtual int dim() const = 0;
    virtual CMat eval(const CVec& z) const = 0;
    /// Derivative of A at z along the real direction delta.
    virtual CMat dirderiv(const CVec& z, const CVec& delta) const {
        const double nd = delta.norm();
        if (nd == 0.0) return CMat::Zero(dim(), dim());
        const double h = 1e-5 / nd;
        return (eval(z + h * delta) - eval(z - h * delta)) / (2.0 * h);
    }
};

class ConstantDeformRep final : public DeformRep {
public:
    explicit ConstantDeformRep(CMat A) : A_(std::move(A)) {}
    int dim() const override { return static_cast<int>(A_.rows()); }
    CMat eval(const CVec&) const override { return A_; }
    CMat dirderiv(const CVec&, const CVec&) const override { return CMat::Zero(A_.rows(), A_.cols()); }

private:
    CMat A_;
};

/// n = 1 deformation A(z) polynomial in (z, zbar).
class PolyDeformRep final : public DeformRep {
public:
    explicit PolyDeformRep(Poly p) : p_(std::move(p)), dz_(p_.d()), dzbar_(p_.dbar()) {}
    int dim() const override { return 1; }
    CMat eval(const CVec& z) const override {
        CMat A(1, 1);
        A(0, 0) = p_.eval(z(0));
        return A;
    }
    CMat dirderiv(const CVec& z, const CVec& delta) const override {
        CMat D(1, 1);
        D(0, 0) = dz_.eval(z(0)) * delta(0) + dzbar_.eval(z(0)) * std::conj(delta(0));
        return D;
    }
    const Poly& poly() const { return p_; }

private:
    Poly p_;
    Poly dz_;
    Poly dzbar_;
};

class CallableDeformRep final : public DeformRep {
public:
    CallableDeformRep(int n, std::function<CMat(const CVec&)> f) : n_(n), f_(std::move(f)) {}
    int dim() const override { return n_; }
    CMat eval(const CVec& z) const override { return f_(z); }

private:
    int n_;
    std::function<CMat(const CVec&)> f_;
};

class FromAcsDeformRep final : public DeformRep {
public:
    explicit FromAcsDeformRep(std::shared_ptr<const StructureRep> J) : J_(std::move(J)) {}
    int dim() const override { return J_->dim(); }
    CMat eval(const CVec& z) const override { return deformation_matrix(J_->eval(z)); }

private:
    std::shared_ptr<const StructureRep> J_;
};

}  // namespace detail

/// Deformation tensor A_J: complex n x n matrix field with |A| < 1 where the
/// structure is admissible; A = 0 exactly where J = J_st.
class DeformationTensor {
public:
    static DeformationTensor zero(int n) { return constant(CMat::Zero(n, n)); }

    static DeformationTensor constant(CMat A) {
        return DeformationTensor(std::make_shared<detail::ConstantDeformRep>(std::move(A)));
    }

    static DeformationTensor constant_scalar(Complex a) {
        CMat A(1, 1);
        A(0, 0) = a;
        return constant(std::move(A));
    }

    /// Scalar polynomial deformation A(z) = sum a_{kl} z^k zbar^l (n = 1).
    static DeformationTensor polynomial(Poly p, double domain_radius = 1.0) {
        DeformationTensor t(std::make_shared<detail::PolyDeformRep>(std::move(p)));
        t.domain_radius_ = domain_radius;
        t.record_bound();
        return t;
    }

    static DeformationTensor callable(int n, std::function<CMat(const CVec&)> f) {
        DeformationTensor t(std::make_shared<detail::CallableDeformRep>(n, std::move(f)));
        t.record_bound();
        return t;
    }

    int n() const { return rep_->dim(); }

    CMat operator()(const CVec& z) const { return rep_->eval(z); }

    CMat operator()(Complex z) const {
        CVec v(1);
        v(0) = z;
        return rep_->eval(v);
    }

    CMat dirderiv(const CVec& z, const CVec& delta) const { return rep_->dirderiv(z, delta); }

    /// Recorded sup bound of |A| over construction samples.
    double sup_bound() const { return eps_bound_; }
    double domain_radius() const { return domain_radius_; }

    /// Scalar polynomial coefficients if this tensor was built from a Poly.
    const Poly* poly() const {
        const auto* p = dynamic_cast<const detail::PolyDeformRep*>(rep_.get());
        return p ? &p->poly() : nullptr;
    }

    bool is_constant() const {
        return dynamic_cast<const detail::ConstantDeformRep*>(rep_.get()) != nullptr;
    }

    friend DeformationTensor deformation_from_j(const AlmostComplexStructure& J);

private:
    explicit DeformationTensor(std::shared_ptr<const detail::DeformRep> rep) : rep_(std::move(rep)) {
        record_bound();
    }

    void record_bound() {
        double s = 0.0;
        for (const CVec& z : sample_points(n(), 24, domain_radius_))
            s = std::max(s, detail::operator_norm(rep_->eval(z)));
        eps_bound_ = s;
    }

    std::shared_ptr<const detail::DeformRep> rep_;
    double eps_bound_ = 0.0;
    double domain_radius_ = 1.0;
};

/// A_J from J, with A(z) conj v = (J_st + J(z))^{-1} (J_st - J(z)) v.
inline DeformationTensor deformation_from_j(const AlmostComplexStructure& J) {
    DeformationTensor t(std::make_shared<detail::FromAcsDeformRep>(J.rep_ptr()));
    t.domain_radius_ = J.domain_radius();
    t.record_bound();
    return t;
}

/// Structure with the prescribed deformation tensor; requires |A| < 1.
/// Constant tensors give an exact constant structure; otherwise the
/// smoothness tag is taken from the caller (the conversion algebra preserves
/// the regularity of A, and the test structures are analytic).
inline AlmostComplexStructure j_from_deformation(const DeformationTensor& A,
                                                 Smoothness s = {3, 0.5}) {
    if (A.sup_bound() >= 1.0)
        throw std::invalid_argument("deformation tensor norm must be < 1");
    if (A.is_constant())
        return AlmostComplexStructure::constant(structure_matrix(A(CVec::Zero(A.n()))), s);
    return AlmostComplexStructure::callable(
        A.n(), [A](const CVec& z) { return structure_matrix(A(z)); }, s);
}

/// Model totally real boundary data: W = R^n or W = iR^n together with the
/// model arc (upper semicircle or the segment (-1,1)).
struct TotallyRealBoundary {
    enum class Model { RealSpan, ImagSpan };
    enum class Arc { UpperSemicircle, Segment };

    int n = 1;
    Model model = Model::RealSpan;
    Arc arc = Arc::Segment;

    static TotallyRealBoundary real_span(int n, Arc arc = Arc::Segment) {
        return TotallyRealBoundary{n, Model::RealSpan, arc};
    }
    static TotallyRealBoundary imag_span(int n, Arc arc = Arc::UpperSemicircle) {
        return TotallyRealBoundary{n, Model::ImagSpan, arc};
    }

    /// Columns span T_p W in the real representation.
    RMat tangent_basis() const {
        RMat B = RMat::Zero(2 * n, n);
        if (model == Model::RealSpan) B.topLeftCorner(n, n) = RMat::Identity(n, n);
        else B.bottomLeftCorner(n, n) = RMat::Identity(n, n);
        return B;
    }

    bool contains(const CVec& p, double tol = 1e-10) const {
        const RVec off = (model == Model::RealSpan) ? RVec(p.imag()) : RVec(p.real());
        return off.lpNorm<Eigen::Infinity>() <= tol;
    }
};

/// T_p W  intersect  J(p) T_p W = {0}, tested as a rank condition: the
/// 2n x 2n matrix [B | J(p) B] must have smallest singular value > sv_tol.
inline bool is_totally_real(const TotallyRealBoundary& W, const AlmostComplexStructure& J,
                            const CVec& p, double sv_tol = 1e-8) {
    if (W.n != J.n()) throw std::invalid_argument("is_totally_real: dimension mismatch");
    if (!W.contains(p)) throw std::invalid_argument("is_totally_real: point not on W");
    const RMat B = W.tangent_basis();
    RMat M(2 * W.n, 2 * W.n);
    M.leftCols(W.n) = B;
    M.rightCols(W.n) = J(p) * B;
    return detail::smallest_singular_value(M) > sv_tol;
}

/// Coordinate normalization along W = R^n: a map phi, first order in y,
/// with phi(x, 0) = x and  d phi / d y_j (x,0) = J(x,0) d/dx_j.  The pushed
/// forward structure equals J_st on the slice y = 0.
class NormalizedChart {
public:
    NormalizedChart(std::shared_ptr<const StructureRep> J) : J_(std::move(J)), n_(J_->dim()) {}

    /// phi(w) for w = x + iy in the new coordinates, returned in old coordinates.
    CVec map(const CVec& w) const {
        const CVec x = w.real().cast<Complex>();
        RVec acc = detail::real_rep(x);
        for (int j = 0; j < n_; ++j) acc += w(j).imag() * tangent_shear(x, j);
        return detail::complex_rep(acc);
    }

    RMat jacobian(const CVec& w) const {
        const CVec x = w.real().cast<Complex>();
        RMat D(2 * n_, 2 * n_);
        for (int j = 0; j < n_; ++j) D.col(n_ + j) = tangent_shear(x, j);
        for (int a = 0; a < n_; ++a) {
            RVec col = RVec::Zero(2 * n_);
            col(a) = 1.0;
            for (int j = 0; j < n_; ++j) {
                const int coords[1] = {a};
                col += w(j).imag() * (J_->deriv(x, coords) * unit_col(j));
            }
            D.col(a) = col;
        }
        return D;
    }

    /// Structure in the new coordinates: Dphi^{-1} J(phi(w)) Dphi.
    AlmostComplexStructure pushforward() const {
        auto J = J_;
        auto self = *this;
        return AlmostComplexStructure::callable(n_, [self, J](const CVec& w) {
            const RMat D = self.jacobian(w);
            return RMat(D.partialPivLu().solve(J->eval(self.map(w)) * D));
        });
    }

private:
    RVec unit_col(int j) const {
        RVec e = RVec::Zero(2 * n_);
        e(j) = 1.0;
        return e;
    }

    RVec tangent_shear(const CVec& x, int j) const { return J_->eval(x) * unit_col(j); }

    std::shared_ptr<const StructureRep> J_;
    int n_;
};

/// Coordinate normalization along W = R^n near 0; requires J totally real there.
inline NormalizedChart normalize_coordinates(const AlmostComplexStructure& J,
                                             double slice_radius = 0.5, int samples = 9) {
    const auto W = TotallyRealBoundary::real_span(J.n());
    for (int s = 0; s < samples; ++s) {
        CVec p = CVec::Zero(J.n());
        const double t = (samples == 1) ? 0.0 : -slice_radius + 2.0 * slice_radius * s / (samples - 1);
        for (int j = 0; j < J.n(); ++j) p(j) = t;
        if (!is_totally_real(W, J, p)) throw std::invalid_argument("structure not totally real along W");
    }
    return NormalizedChart(J.rep_ptr());
}

/// Linear complex structure on the trivial bundle over the closed disc:
/// a field zeta -> J(zeta) in End(R^{2n}) with J^2 = -Id.
class BundleStructure {
public:
    BundleStructure(int n, std::function<RMat(Complex)> f) : n_(n), f_(std::move(f)) {}

    static BundleStructure standard(int n) {
        const RMat J = detail::j_standard(n);
        return BundleStructure(n, [J](Complex) { return J; });
    }

    int n() const { return n_; }
    RMat operator()(Complex zeta) const { return f_(zeta); }

    /// Pointwise deformation tensor of the fibre structure.
    CMat deformation(Complex zeta) const { return deformation_matrix(f_(zeta)); }

    double dist_to_standard(const DiscGrid& grid) const {
        const RMat Jst = detail::j_standard(n_);
        double s = 0.0;
        for (size_t idx = 0; idx < grid.node_count(); ++idx)
            s = std::max(s, detail::operator_norm(RMat(f_(grid.node(idx)) - Jst)));
        return s;
    }

private:
    int n_;
    std::function<RMat(Complex)> f_;
};

}  // namespace holodisc
