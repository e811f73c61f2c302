#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "holodisc/convergence.hpp"
#include "holodisc/norms.hpp"
#include "oracles.hpp"

using namespace holodisc;

TEST_CASE("regularity index validation") {
    REQUIRE_THROWS_AS((RegularityIndex{0, 1.5, 2.0}).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS((RegularityIndex{0, 0.5, 0.5}).validate(), std::invalid_argument);
    REQUIRE_THROWS_AS((RegularityIndex{-1, 0.5, 2.0}).validate(), std::invalid_argument);
    REQUIRE_NOTHROW((RegularityIndex{2, 0.25, 3.0}).validate());
}

TEST_CASE("holder norm of constants and of z") {
    auto grid = make_disc_grid(12, 64);
    {
        const auto rep = holder_norm(GridFunction::from_poly(grid, Poly::constant(Complex(0.0, -3.0))),
                                     RegularityIndex{0, 0.5, 2.0});
        REQUIRE(rep.order_parts.back() == 0.0);           // seminorm
        REQUIRE(rep.value == Catch::Approx(3.0));         // sup = |c|
    }
    {
        // alpha-seminorm of z at alpha = 1/2 is 2^{1/2}, attained at an
        // antipodal boundary pair
        const auto rep =
            holder_norm(GridFunction::from_poly(grid, Poly::zeta()), RegularityIndex{0, 0.5, 2.0});
        REQUIRE(rep.order_parts.back() == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
        REQUIRE(rep.value == Catch::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
    }
    {
        // k = 1: first-derivative part 1, second-difference seminorm 0
        const auto rep =
            holder_norm(GridFunction::from_poly(grid, Poly::zeta()), RegularityIndex{1, 0.5, 2.0});
        REQUIRE(rep.order_parts[1] == Catch::Approx(1.0));
        REQUIRE(rep.order_parts.back() == 0.0);
        REQUIRE(rep.value == Catch::Approx(2.0));
    }
    // k beyond available derivatives
    REQUIRE_THROWS_AS(holder_norm(GridFunction::from_poly(grid, Poly::zeta()),
                                  RegularityIndex{7, 0.5, 2.0}),
                      std::invalid_argument);
}

TEST_CASE("holder norm monotonicity in k") {
    auto grid = make_disc_grid(10, 32);
    std::mt19937_64 rng(61);
    auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    for (int trial = 0; trial < 5; ++trial) {
        Poly p;
        for (int k = 0; k <= 5; ++k)
            for (int l = 0; k + l <= 5; ++l) p.set_coeff(k, l, Complex(u01(), u01()));
        const GridFunction f = GridFunction::from_poly(grid, p);
        const double n0 = holder_norm(f, RegularityIndex{0, 0.3, 2.0}).value;
        const double n1 = holder_norm(f, RegularityIndex{1, 0.3, 2.0}).value;
        REQUIRE(n0 <= n1 + 1e-12);
    }
}

TEST_CASE("holder seminorm never shrinks under refinement beyond the reported error") {
    const Poly p = Poly::monomial(2, 1, 1.0) + Poly::monomial(0, 3, Complex(0.0, 0.5));
    const RegularityIndex idx{0, 0.4, 2.0};
    const auto coarse = holder_norm(GridFunction::from_poly(make_disc_grid(8, 32), p), idx);
    const auto fine = holder_norm(GridFunction::from_poly(make_disc_grid(16, 64), p), idx);
    REQUIRE(fine.order_parts.back() >= coarse.order_parts.back() - coarse.est_error - 1e-12);
}

TEST_CASE("sampled-pair fast mode stays close to the full scan") {
    auto grid = make_disc_grid(12, 64);
    const Poly p = Poly::monomial(1, 1, 1.0) + Poly::monomial(3, 0, 0.3);
    const GridFunction f = GridFunction::from_poly(grid, p);
    const auto full = holder_norm(f, RegularityIndex{0, 0.5, 2.0}, false);
    const auto fast = holder_norm(f, RegularityIndex{0, 0.5, 2.0}, true);
    REQUIRE(fast.value <= full.value + 1e-12);
    REQUIRE(fast.value >= 0.5 * full.value);
}

TEST_CASE("sobolev norms of the worked examples") {
    auto grid = make_disc_grid(12, 64);
    {
        const auto rep = sobolev_norm(GridFunction::from_poly(grid, Poly::constant(1.0)),
                                      RegularityIndex{0, 0.5, 2.0});
        REQUIRE(rep.value == Catch::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
    }
    {
        const auto rep =
            sobolev_norm(GridFunction::from_poly(grid, Poly()), RegularityIndex{0, 0.5, 2.0});
        REQUIRE(rep.value == 0.0);
    }
    {
        const auto rep =
            sobolev_norm(GridFunction::from_poly(grid, Poly::zeta()), RegularityIndex{1, 0.5, 2.0});
        // derivative part contributes sqrt(pi) (|f'| = 1)
        REQUIRE(rep.order_parts[1] == Catch::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
        // total: (pi/2 + pi)^{1/2}
        REQUIRE(rep.value == Catch::Approx(std::sqrt(1.5 * std::numbers::pi)).epsilon(1e-12));
    }
    // independent quadrature oracle on a non-polynomial power
    {
        const auto rep =
            sobolev_norm(GridFunction::from_poly(grid, Poly::zeta()), RegularityIndex{0, 0.5, 3.0});
        const double ref =
            oracles::disc_integral([](Complex z) { return std::pow(std::abs(z), 3.0); });
        REQUIRE(rep.value == Catch::Approx(std::pow(ref, 1.0 / 3.0)).epsilon(1e-6));
    }
}

TEST_CASE("trace norm via the Poisson extension") {
    auto grid = make_disc_grid(12, 64);
    REQUIRE_THROWS_AS(trace_norm(Fourier::constant(1.0), 2.0, grid), std::invalid_argument);

    REQUIRE(trace_norm(Fourier::zero(1, 2), 3.0, grid).value == 0.0);

    // phi = 1: P phi = 1 and the norm is pi^{1/p}
    const double p = 3.0;
    const auto rep = trace_norm(Fourier::constant(1.0), p, grid);
    REQUIRE(rep.value == Catch::Approx(std::pow(std::numbers::pi, 1.0 / p)).epsilon(1e-12));

    // phi = cos: P phi = x; independent quadrature of |x|^p + |Dx|^p
    const auto repc = trace_norm(Fourier::cosine(1), p, grid);
    const double ref =
        oracles::disc_integral([p](Complex z) { return std::pow(std::abs(z.real()), p); }) +
        std::numbers::pi;  // |Dx| = 1
    REQUIRE(repc.value == Catch::Approx(std::pow(ref, 1.0 / p)).epsilon(1e-6));
}

TEST_CASE("trace-space embedding ratio is grid-stable over the corpus") {
    // T^{1,p} c C^alpha with alpha = (p-2)/p: the boundary Hoelder norm is
    // bounded by a stable multiple of the trace norm across the corpus.
    const double p = 3.0;
    const double alpha = (p - 2.0) / p;
    std::vector<Fourier> corpus = {Fourier::cosine(1), Fourier::sine(2), Fourier::cosine(3, 0.5),
                                   Fourier::cosine(1, 0.3) + Fourier::sine(4, 0.7),
                                   Fourier::constant(1.0) + Fourier::cosine(2, -0.4)};
    for (auto grid : {make_disc_grid(10, 32), make_disc_grid(14, 64)}) {
        for (const Fourier& phi : corpus) {
            const double tn = trace_norm(phi.real_part(), p, grid).value;
            const double hn = boundary_holder_norm(phi.real_part(), alpha);
            REQUIRE(hn <= 6.0 * tn);  // regression ratio, frozen
        }
    }
}

TEST_CASE("convergence study: identical structures give zero errors") {
    auto grid = make_disc_grid(10, 32);
    std::vector<DeformationTensor> As(4, DeformationTensor::constant_scalar(0.2));
    const auto rep = convergence_study(As, DeformationTensor::constant_scalar(0.2),
                                       Fourier::cosine(1), RVec::Zero(1),
                                       RegularityIndex{0, 0.5, 2.0}, SolverOptions{}, grid);
    for (const auto& pt : rep.points) REQUIRE(pt.e < 1e-9);
}

TEST_CASE("convergence study recovers the first-order rate and the closed forms") {
    auto grid = make_disc_grid(10, 64);
    const double A = 0.25;
    std::vector<DeformationTensor> As;
    std::vector<int> ns = {4, 6, 8, 12, 16, 24};
    for (int nn : ns)
        As.push_back(DeformationTensor::constant_scalar(A * (1.0 - 1.0 / nn)));
    const auto rep =
        convergence_study(As, DeformationTensor::constant_scalar(A), Fourier::cosine(1),
                          RVec::Zero(1), RegularityIndex{0, 0.5, 2.0}, SolverOptions{}, grid);
    REQUIRE(rep.monotone_decreasing);
    REQUIRE(rep.exponent >= 0.9);

    // e_n independently checkable via the constant-A closed forms
    auto closed = [&](double a) {
        PolyMap f = schwarz(Fourier::cosine(1));
        f *= 1.0 / (1.0 + a);
        return f + Complex(a) * f.conjugated();
    };
    const PolyMap u = closed(A);
    for (size_t i = 0; i < ns.size(); ++i) {
        const double an = A * (1.0 - 1.0 / ns[i]);
        const GridFunction diff = GridFunction::from_poly(grid, closed(an) - u);
        const double expected =
            holder_norm(diff, RegularityIndex{1, 0.5, 2.0}, true).value;
        REQUIRE(rep.points[i].e == Catch::Approx(expected).margin(1e-7));
    }
}

TEST_CASE("convergence study propagates gate violations with the index") {
    auto grid = make_disc_grid(8, 32);
    std::vector<DeformationTensor> As = {DeformationTensor::constant_scalar(0.1),
                                         DeformationTensor::constant_scalar(0.8),
                                         DeformationTensor::constant_scalar(0.2)};
    try {
        convergence_study(As, DeformationTensor::constant_scalar(0.2), Fourier::cosine(1),
                          RVec::Zero(1), RegularityIndex{0, 0.5, 2.0}, SolverOptions{}, grid);
        FAIL("expected failure");
    } catch (const std::runtime_error& e) {
        REQUIRE(std::string(e.what()).find("index 1") != std::string::npos);
    }

    std::vector<DeformationTensor> two = {DeformationTensor::constant_scalar(0.1),
                                          DeformationTensor::constant_scalar(0.2)};
    REQUIRE_THROWS_AS(convergence_study(two, DeformationTensor::constant_scalar(0.2),
                                        Fourier::cosine(1), RVec::Zero(1),
                                        RegularityIndex{0, 0.5, 2.0}, SolverOptions{}, grid),
                      std::runtime_error);
}
