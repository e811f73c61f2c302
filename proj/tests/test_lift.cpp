#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "holodisc/lift.hpp"
#include "holodisc/rh_solver.hpp"

using namespace holodisc;

namespace {
// Polynomial n = 1 structure: J = [[s, -(1+s^2)], [1, -s]] with s = c Re z;
// J^2 = -Id identically.
AlmostComplexStructure shear_structure(double c) {
    Poly x;
    x.set_coeff(1, 0, 0.5);
    x.set_coeff(0, 1, 0.5);
    const Poly s = c * x;
    return AlmostComplexStructure::polynomial(
        {s, -(Poly::constant(1.0) + s * s), Poly::constant(1.0), -s});
}
}  // namespace

TEST_CASE("lift of the standard structure is standard (block diagonal)") {
    const auto Jc = lift_structure(AlmostComplexStructure::standard(1));
    CVec w(2);
    w << Complex(0.3, 0.2), Complex(-0.4, 0.1);
    REQUIRE(detail::operator_norm(RMat(Jc(w) - detail::j_standard(2))) < 1e-15);
    // block form: diag(J_st, J_st), zero subdiagonal
    const RMat B = lifted_block_form(Jc, w);
    REQUIRE((B.topLeftCorner(2, 2) - detail::j_standard(1)).norm() < 1e-15);
    REQUIRE((B.bottomRightCorner(2, 2) - detail::j_standard(1)).norm() < 1e-15);
    REQUIRE(B.bottomLeftCorner(2, 2).norm() == 0.0);
    REQUIRE(B.topRightCorner(2, 2).norm() == 0.0);
}

TEST_CASE("lifted structure squares to -Id at random points") {
    const auto Jc = lift_structure(shear_structure(0.3));
    double worst = 0.0;
    for (const CVec& w : sample_points(2, 100, 0.9, 77u)) {
        const RMat M = Jc(w);
        worst = std::max(worst,
                         detail::operator_norm(RMat(M * M + RMat::Identity(M.rows(), M.cols()))));
    }
    REQUIRE(worst < 1e-12);
}

TEST_CASE("lift at t = 0 is block diagonal in the base structure") {
    const auto J = shear_structure(0.25);
    const auto Jc = lift_structure(J);
    CVec w(2);
    w << Complex(0.4, -0.3), Complex(0.0, 0.0);
    const RMat B = lifted_block_form(Jc, w);
    const RMat Jz = J(w(0));
    REQUIRE((B.topLeftCorner(2, 2) - Jz).norm() < 1e-14);
    REQUIRE((B.bottomRightCorner(2, 2) - Jz).norm() < 1e-14);
    REQUIRE(B.bottomLeftCorner(2, 2).norm() < 1e-14);
}

TEST_CASE("lift subdiagonal is the directional derivative of J") {
    const auto J = shear_structure(0.3);
    const auto Jc = lift_structure(J);
    CVec w(2);
    w << Complex(0.2, 0.1), Complex(0.5, -0.7);
    const RMat B = lifted_block_form(Jc, w);
    // t^a d_a J with t = (Re t, Im t)
    RMat expect = RMat::Zero(2, 2);
    CVec z(1);
    z << w(0);
    expect += 0.5 * J.deriv(z, 0);
    expect += -0.7 * J.deriv(z, 1);
    REQUIRE((B.bottomLeftCorner(2, 2) - expect).norm() < 1e-13);
}

TEST_CASE("lift_map worked examples") {
    auto grid = make_disc_grid(8, 32);
    {
        const LiftedMap lm = lift_map(GridFunction::from_poly(grid, Poly::zeta()));
        REQUIRE(lm.uc.n() == 2);
        REQUIRE((lm.uc.spectral()[0] - Poly::zeta()).is_zero(0.0));
        REQUIRE((lm.uc.spectral()[1] - Poly::constant(1.0)).is_zero(0.0));
    }
    {
        const LiftedMap lm =
            lift_map(GridFunction::from_poly(grid, Poly::constant(Complex(2.0, -1.0))));
        REQUIRE((lm.uc.spectral()[0] - Poly::constant(Complex(2.0, -1.0))).is_zero(0.0));
        REQUIRE(lm.uc.spectral()[1].is_zero(0.0));
    }
}

TEST_CASE("lifted map of a converged solution satisfies the lifted equation") {
    auto grid = make_disc_grid(12, 64);
    const auto A = DeformationTensor::constant_scalar(0.25);
    const SolverReport rep =
        solve_rh(RHProblem{A, Fourier::cosine(1), RVec::Zero(1)}, SolverOptions{}, grid);
    const auto J = j_from_deformation(A);
    const double base = j_holomorphy_residual(*rep.solution, J);
    const double lifted = j_holomorphy_residual(lift_map(*rep.solution).uc, lift_structure(J));
    REQUIRE(lifted <= 10.0 * std::max(base, 1e-13));
}

TEST_CASE("bootstrap: double lift keeps the residual ordering") {
    auto grid = make_disc_grid(12, 64);
    const auto A = DeformationTensor::constant_scalar(0.25);
    const SolverReport rep =
        solve_rh(RHProblem{A, Fourier::cosine(1), RVec::Zero(1)}, SolverOptions{}, grid);
    const auto J = j_from_deformation(A);
    const double base = j_holomorphy_residual(*rep.solution, J);
    const LiftedMap once = lift_map(*rep.solution);
    const LiftedMap twice = lift_map(once.uc);
    const double second =
        j_holomorphy_residual(twice.uc, lift_structure(lift_structure(J)));
    REQUIRE(second <= 100.0 * std::max(base, 1e-13));
    // double lift squares to -Id as well
    const auto Jcc = lift_structure(lift_structure(shear_structure(0.2)));
    for (const CVec& w : sample_points(4, 20, 0.8, 78u)) {
        const RMat M = Jcc(w);
        REQUIRE(detail::operator_norm(RMat(M * M + RMat::Identity(8, 8))) < 1e-12);
    }
}

TEST_CASE("lift loses one polynomial degree on the subdiagonal") {
    const auto Jc = lift_structure(shear_structure(0.3));  // base degree 2 (s^2 entry)
    const LiftDegreeInfo info = lift_degree_info(Jc);
    REQUIRE(info.diag_degree == 2);
    REQUIRE(info.offdiag_base_degree == 1);
}

TEST_CASE("lifted totally real boundary passes the rank test") {
    const auto W = TotallyRealBoundary::real_span(1);
    const auto TW = lift_totally_real(W);
    REQUIRE(TW.n == 2);

    // standard structure
    REQUIRE(is_totally_real(TW, lift_structure(AlmostComplexStructure::standard(1)), CVec::Zero(2)));

    // random small polynomial structure at 20 sampled real points
    const auto Jc = lift_structure(shear_structure(0.2));
    std::mt19937_64 rng(79);
    auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    for (int s = 0; s < 20; ++s) {
        CVec p(2);
        p << Complex(0.8 * u01(), 0.0), Complex(0.8 * u01(), 0.0);
        REQUIRE(is_totally_real(TW, Jc, p));
    }

    // degenerate first block kills transversality
    RMat rot = RMat::Zero(4, 4);
    rot(0, 1) = -1.0;
    rot(1, 0) = 1.0;
    rot(2, 3) = -1.0;
    rot(3, 2) = 1.0;
    const auto Jdeg = AlmostComplexStructure::constant(rot);
    REQUIRE_FALSE(is_totally_real(TotallyRealBoundary::real_span(2), Jdeg, CVec::Zero(2)));
}

TEST_CASE("lift_structure requires a differentiable representation") {
    const auto J0 = AlmostComplexStructure::callable(
        1, [](const CVec&) { return detail::j_standard(1); }, Smoothness{0, 0.5});
    REQUIRE_THROWS_AS(lift_structure(J0), std::invalid_argument);
    // callable with k >= 1 lifts via finite differences
    const auto J1 = AlmostComplexStructure::callable(
        1,
        [](const CVec& z) {
            const double lam = 1.0 + 0.1 * std::norm(z(0));
            RMat J(2, 2);
            J << 0.0, -lam, 1.0 / lam, 0.0;
            return J;
        },
        Smoothness{2, 0.5});
    const auto Jc = lift_structure(J1);
    CVec w(2);
    w << Complex(0.3, 0.1), Complex(0.2, 0.4);
    const RMat M = Jc(w);
    REQUIRE(detail::operator_norm(RMat(M * M + RMat::Identity(4, 4))) < 1e-9);
}
