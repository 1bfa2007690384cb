#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dblevy/sinh_grid.hpp"

using namespace dblevy;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("contour map and crossing point") {
    const auto c1 = build_contour(0.0, 0.9, kPi / 4.0);
    CHECK(c1.crossing() == doctest::Approx(0.9 * std::sin(kPi / 4.0)));
    CHECK(std::abs(c1.map(0.0) - cplx(0.0, 0.6363961031)) < 1e-9);

    const auto flat = build_contour(0.0, 1.0, 0.0);
    CHECK(flat.map(1.3).imag() == doctest::Approx(0.0));
    CHECK(flat.map(1.3).real() == doctest::Approx(std::sinh(1.3)));

    const auto c3 = build_contour(0.5, 1.0, -kPi / 4.0);
    CHECK(c3.crossing() == doctest::Approx(0.5 - std::sin(kPi / 4.0)));

    CHECK_THROWS_AS(build_contour(0.0, -1.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(build_contour(0.0, 1.0, kPi / 2.0), std::invalid_argument);
}

TEST_CASE("grid points match direct evaluation, symmetric in k") {
    const auto c = build_contour(0.0, 1.0, 0.0);
    const auto g = build_grid(c, 1.0, 1);
    REQUIRE(g.size() == 3);
    CHECK(std::abs(g.points[0] - cplx(std::sinh(-1.0), 0.0)) < 1e-15);
    CHECK(std::abs(g.points[1]) < 1e-15);
    CHECK(std::abs(g.points[2] - cplx(std::sinh(1.0), 0.0)) < 1e-15);

    const auto tilted = build_contour(0.3, 0.7, 0.4);
    const auto tg = build_grid(tilted, 0.25, 20);
    // der at y=0 equals b*cos(omega)
    CHECK(std::abs(tg.derivs[20] - cplx(0.7 * std::cos(0.4), 0.0)) < 1e-15);
    for (int k = 0; k < tg.size(); ++k) {
        CHECK(std::abs(tg.points[k] - tilted.map(0.25 * (k - 20))) < 1e-14);
        // mirror symmetry about the imaginary axis
        const cplx refl = tg.points[tg.size() - 1 - k];
        CHECK(refl.real() == doctest::Approx(-tg.points[k].real()));
        CHECK(refl.imag() == doctest::Approx(tg.points[k].imag()));
    }
    for (int k = 1; k < tg.size(); ++k)
        CHECK(std::abs(tg.points[k] - tg.points[k - 1]) > 0.0);
}

TEST_CASE("truncation rule closed form and boundary cases") {
    const auto c = build_contour(0.0, 0.9, kPi / 4.0);
    const double lam = truncation_lambda(c, 0.05, 0.4, 1e-10);
    CHECK(lam == doctest::Approx(7.5009).epsilon(1e-3));
    // bound holds at Lambda, fails at Lambda - 0.1
    auto bound = [&](double L) {
        return std::exp(-0.9 * 0.05 * 0.4 * std::sin(kPi / 4.0) * std::exp(L));
    };
    CHECK(bound(lam) <= 1e-10 * (1.0 + 1e-9));
    CHECK(bound(lam - 0.1) > 1e-10);

    // degenerate tolerance: decay already >= ln 2 at Lambda = 0
    const auto wide = build_contour(0.0, 3.0, kPi / 4.0);
    const auto tr = select_truncation(wide, 2.0, 0.4, 0.5);
    CHECK(tr.lambda == doctest::Approx(0.0));
    CHECK(tr.half_n >= 4);

    // monotonicity in kappa: ln(4/3) shift of the inner argument
    const double l3 = truncation_lambda(c, 0.05, 0.3, 1e-10);
    const double l4 = truncation_lambda(c, 0.05, 0.4, 1e-10);
    CHECK(l3 - l4 == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(truncation_lambda(c, 0.0, 0.4, 1e-10), std::invalid_argument);
    CHECK_THROWS_AS(truncation_lambda(c, -1.0, 0.4, 1e-10),
                    std::invalid_argument);
}

TEST_CASE("trapezoid rule: zero, Gaussian, deformation invariance") {
    const auto flat = build_contour(0.0, 1.0, 0.0);

    SUBCASE("zero integrand") {
        const auto g = build_grid(flat, 0.5, 10);
        std::vector<cplx> samples(g.size(), cplx{0.0, 0.0});
        CHECK(std::abs(integrate(g, samples)) == 0.0);
    }

    SUBCASE("Gaussian equals sqrt(pi)") {
        // The sinh-parametrized real axis has a y-strip of roughly pi/4, so
        // machine precision needs a step near 0.15 rather than the coarse 0.5
        // a uniform grid would allow.
        const auto g = build_grid(flat, 0.15, 150);
        std::vector<cplx> samples(g.size());
        for (int k = 0; k < g.size(); ++k)
            samples[k] = std::exp(-g.points[k] * g.points[k]);
        CHECK(std::abs(integrate(g, samples) - std::sqrt(kPi)) < 1e-12);
    }

    SUBCASE("deformed contour agrees for 1/(xi^2+4)") {
        // poles at +-2i; a contour with wings at pi/4 and small crossing stays
        // inside the analyticity cone, so the value matches the real-axis one.
        const auto g0 = build_grid(flat, 0.05, 400);
        const auto gd = build_grid(build_contour(0.0, 0.5, kPi / 4.0), 0.05, 400);
        auto f = [](cplx z) { return 1.0 / (z * z + 4.0); };
        std::vector<cplx> s0(g0.size()), sd(gd.size());
        for (int k = 0; k < g0.size(); ++k) s0[k] = f(g0.points[k]);
        for (int k = 0; k < gd.size(); ++k) sd[k] = f(gd.points[k]);
        const cplx v0 = integrate(g0, s0);
        const cplx vd = integrate(gd, sd);
        CHECK(std::abs(v0 - kPi / 2.0) < 1e-8);
        CHECK(std::abs(vd - v0) < 1e-7);
    }

    SUBCASE("halving the step squares the error") {
        auto gauss_err = [&](double zeta, int n) {
            const auto g = build_grid(flat, zeta, n);
            std::vector<cplx> s(g.size());
            for (int k = 0; k < g.size(); ++k)
                s[k] = std::exp(-g.points[k] * g.points[k]);
            return std::abs(integrate(g, s) - std::sqrt(kPi));
        };
        const double e1 = gauss_err(0.8, 6);
        const double e2 = gauss_err(0.4, 12);
        CHECK(e2 < 50.0 * e1 * e1);
    }

    SUBCASE("length mismatch rejected") {
        const auto g = build_grid(flat, 0.5, 4);
        std::vector<cplx> bad(3);
        CHECK_THROWS_AS(integrate(g, bad), std::invalid_argument);
    }
}

TEST_CASE("grid presets carry the documented point counts") {
    CHECK(2 * preset_half_n(kGridDefault.main_points) + 1 == 277);
    CHECK(2 * preset_half_n(kGridDefault.whf_points) + 1 == 503);
    CHECK(2 * preset_half_n(kGridCoarsest.main_points) + 1 == 55);
}
