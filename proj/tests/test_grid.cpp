#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "holodisc/grid.hpp"
#include "oracles.hpp"

using namespace holodisc;

TEST_CASE("make_disc_grid construction contract") {
    // (4, 8): 4 rings x 8 angles + center = 33 nodes
    auto g = make_disc_grid(4, 8);
    REQUIRE(g->node_count() == 33);

    // non-power-of-2 angular count rejected
    REQUIRE_THROWS_WITH(make_disc_grid(4, 7), "angular count must be power of 2");
    REQUIRE_THROWS_AS(make_disc_grid(3, 8), std::invalid_argument);
    REQUIRE_THROWS_AS(make_disc_grid(8, 4), std::invalid_argument);

    // outermost ring exactly on |z| = 1
    auto g2 = make_disc_grid(16, 64);
    REQUIRE(g2->radius(0) == 1.0);
    for (size_t idx = 0; idx < g2->node_count(); ++idx)
        REQUIRE(std::abs(g2->node(idx)) <= 1.0 + 1e-15);
    // angular nodes equispaced
    REQUIRE(g2->angle(1) - g2->angle(0) == Catch::Approx(2.0 * std::numbers::pi / 64));
}

TEST_CASE("spectral round trip is the identity up to 1e-12") {
    auto grid = make_disc_grid(17, 128);
    REQUIRE(grid->max_degree() == 32);
    std::mt19937_64 rng(3);
    auto u = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    for (int trial = 0; trial < 3; ++trial) {
        Poly p;
        for (int k = 0; k <= grid->max_degree(); ++k)
            for (int l = 0; k + l <= grid->max_degree(); ++l) p.set_coeff(k, l, Complex(u(), u()));
        const auto vals = grid->synthesize(p);
        const Poly q = grid->analyze(vals);
        const auto back = grid->synthesize(q);
        double scale = 0.0, err = 0.0;
        for (size_t i = 0; i < vals.size(); ++i) {
            scale = std::max(scale, std::abs(vals[i]));
            err = std::max(err, std::abs(back[i] - vals[i]));
        }
        REQUIRE(err <= 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("grid dbar and d match the monomial rules") {
    auto grid = make_disc_grid(8, 32);
    const GridFunction zb = GridFunction::from_poly(grid, Poly::zetabar());
    REQUIRE((dbar(zb).spectral()[0] - Poly::constant(1.0)).is_zero(0.0));
    REQUIRE(d(zb).spectral()[0].is_zero(0.0));

    const GridFunction z = GridFunction::from_poly(grid, Poly::zeta());
    REQUIRE(dbar(z).spectral()[0].is_zero(0.0));
    REQUIRE((d(z).spectral()[0] - Poly::constant(1.0)).is_zero(0.0));

    const GridFunction zzb = GridFunction::from_poly(grid, Poly::zeta() * Poly::zetabar());
    REQUIRE((dbar(zzb).spectral()[0] - Poly::zeta()).is_zero(0.0));

    const GridFunction z2zb =
        GridFunction::from_poly(grid, Poly::zeta() * Poly::zeta() * Poly::zetabar());
    REQUIRE((d(z2zb).spectral()[0] - 2.0 * (Poly::zeta() * Poly::zetabar())).is_zero(0.0));
}

TEST_CASE("derivatives of projected non-spectral data agree with finite differences") {
    auto grid = make_disc_grid(16, 64);
    const auto f = [](Complex z) { return std::exp(z * std::conj(z)) + std::sin(z.real()); };
    GridFunction gf = GridFunction::sample_scalar(grid, f).projected();
    // smooth non-polynomial data projects with a small reported residual
    REQUIRE(gf.projection_residual() < 1e-10);
    REQUIRE(gf.projection_residual() > 0.0);
    const GridFunction db = dbar(gf);
    for (const Complex z : {Complex(0.3, 0.2), Complex(-0.4, 0.1), Complex(0.0, -0.5)}) {
        const Complex num = oracles::fd_dbar(f, z);
        REQUIRE(std::abs(db.spectral()[0].eval(z) - num) < 1e-8);
    }
}

TEST_CASE("boundary trace via ring FFT matches the spectral rule") {
    auto grid = make_disc_grid(8, 64);
    Poly p;
    p.set_coeff(3, 1, Complex(0.7, -0.2));
    p.set_coeff(0, 2, Complex(-0.1, 0.4));
    p.set_coeff(1, 1, Complex(0.5, 0.0));
    const GridFunction withspec = GridFunction::from_poly(grid, p);
    const GridFunction valsonly = GridFunction::from_values(grid, withspec.raw_values(), 1);
    const Fourier a = boundary_trace(withspec);
    const Fourier b = boundary_trace(valsonly);
    for (int m = -6; m <= 6; ++m) REQUIRE(std::abs(a.coeff(m, 0) - b.coeff(m, 0)) < 1e-14);
    // spectral rule: c_m = sum_{k-l=m} c_{kl}
    REQUIRE(std::abs(a.coeff(2, 0) - Complex(0.7, -0.2)) < 1e-15);
    REQUIRE(std::abs(a.coeff(-2, 0) - Complex(-0.1, 0.4)) < 1e-15);
    REQUIRE(std::abs(a.coeff(0, 0) - Complex(0.5, 0.0)) < 1e-15);
}

TEST_CASE("nonnegative trace modes characterize holomorphic polynomials") {
    auto grid = make_disc_grid(8, 32);
    const Poly holo = Poly::zeta() * Poly::zeta() + Poly::monomial(3, 0, Complex(0.0, 1.0));
    const Fourier th = boundary_trace(GridFunction::from_poly(grid, holo));
    for (int m = 1; m <= th.max_mode(); ++m) REQUIRE(th.coeff(-m, 0) == Complex(0.0));

    const Poly mixed = holo + Poly::zetabar();
    const Fourier tm = boundary_trace(GridFunction::from_poly(grid, mixed));
    REQUIRE(std::abs(tm.coeff(-1, 0)) > 0.5);
}

TEST_CASE("quadrature weights integrate smooth functions") {
    auto grid = make_disc_grid(12, 64);
    double area = 0.0, second = 0.0;
    for (size_t idx = 0; idx < grid->node_count(); ++idx) {
        area += grid->weight(idx);
        second += grid->weight(idx) * std::norm(grid->node(idx));
    }
    REQUIRE(area == Catch::Approx(std::numbers::pi).epsilon(1e-13));
    REQUIRE(second == Catch::Approx(std::numbers::pi / 2.0).epsilon(1e-13));

    // non-polynomial integrand against the independent fine rule
    double val = 0.0;
    for (size_t idx = 0; idx < grid->node_count(); ++idx)
        val += grid->weight(idx) * std::exp(-std::norm(grid->node(idx)));
    const double ref = oracles::disc_integral([](Complex z) { return std::exp(-std::norm(z)); });
    REQUIRE(val == Catch::Approx(ref).margin(1e-5));
}

TEST_CASE("grid function arithmetic and component access") {
    auto grid = make_disc_grid(6, 16);
    PolyMap p(2);
    p[0] = Poly::zeta();
    p[1] = Poly::constant(Complex(0.0, 2.0));
    const GridFunction f = GridFunction::from_poly(grid, p);
    const GridFunction sum = f + f;
    REQUIRE(sum.value(3, 0) == 2.0 * f.value(3, 0));
    REQUIRE(sum.component(1).spectral()[0].coeff(0, 0) == Complex(0.0, 4.0));
    REQUIRE(f.n() == 2);
}
