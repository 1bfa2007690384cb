#include <doctest.h>

#include <cmath>

#include "dblevy/gaver.hpp"

using namespace dblevy;

namespace {
std::vector<cplx> sample(const GwrConfig& cfg,
                         const std::function<double(double)>& f) {
    std::vector<cplx> out;
    for (double q : gwr_nodes(cfg)) out.emplace_back(f(q), 0.0);
    return out;
}
}  // namespace

TEST_CASE("node layout") {
    GwrConfig cfg{8, 0.0, 0.25};
    const auto q = gwr_nodes(cfg);
    REQUIRE(q.size() == 16);
    CHECK(q.front() == doctest::Approx(std::log(2.0) / 0.25));
    CHECK(q.back() == doctest::Approx(16.0 * std::log(2.0) / 0.25));
    for (std::size_t i = 1; i < q.size(); ++i) CHECK(q[i] > q[i - 1]);

    GwrConfig one{2, 0.0, 1.0};
    const auto q1 = gwr_nodes(one);
    CHECK(q1[0] == doctest::Approx(std::log(2.0)));
    CHECK(q1[1] == doctest::Approx(2.0 * std::log(2.0)));

    GwrConfig doubled{8, 0.0, 0.5};
    const auto q2 = gwr_nodes(doubled);
    for (std::size_t i = 0; i < q.size(); ++i)
        CHECK(q2[i] == doctest::Approx(q[i] / 2.0));
}

TEST_CASE("closed-form inversions at M = 8") {
    GwrConfig cfg{8, 0.0, 0.25};

    SUBCASE("1/q is exact through the breakdown path") {
        GwrDiagnostics d;
        const double v =
            gwr_invert(sample(cfg, [](double q) { return 1.0 / q; }), cfg, &d);
        CHECK(v == 1.0);
        CHECK(d.rho_breakdown);  // constant Gaver sequence
    }
    SUBCASE("1/(q+3) -> exp(-3T)") {
        const double v = gwr_invert(
            sample(cfg, [](double q) { return 1.0 / (q + 3.0); }), cfg);
        CHECK(std::abs(v - std::exp(-0.75)) < 1e-6);
    }
    SUBCASE("1/q^2 -> T") {
        const double v =
            gwr_invert(sample(cfg, [](double q) { return 1.0 / (q * q); }), cfg);
        CHECK(std::abs(v - 0.25) < 1e-7);
    }
    SUBCASE("q/(q^2+1) -> cos T") {
        const double v = gwr_invert(
            sample(cfg, [](double q) { return q / (q * q + 1.0); }), cfg);
        CHECK(std::abs(v - std::cos(0.25)) < 1e-5);
    }
    SUBCASE("imaginary parts are diagnosed") {
        auto s = sample(cfg, [](double q) { return 1.0 / (q + 3.0); });
        for (auto& v : s) v += cplx(0.0, 1e-13);
        GwrDiagnostics d;
        gwr_invert(s, cfg, &d);
        CHECK(d.max_imag > 0.0);
        CHECK(d.max_imag < 1e-10);
    }
}

TEST_CASE("shift consistency reproduces exp(-aT)") {
    // Feeding samples at q' + s and multiplying by e^{sT} undoes the shift.
    const double a = 3.0, s = 2.5, t = 0.25;
    GwrConfig cfg{8, 0.0, t};
    std::vector<cplx> samples;
    for (double q : gwr_nodes(cfg)) samples.emplace_back(1.0 / (q + s + a), 0.0);
    const double v = std::exp(s * t) * gwr_invert(samples, cfg);
    CHECK(std::abs(v - std::exp(-a * t)) < 1e-6);
}

TEST_CASE("price_with_shift assembles discount and shift") {
    const double t = 0.25, r = 0.01571;

    SUBCASE("zero correction gives the barrier-free discounted value") {
        GwrConfig cfg{8, 0.0, t};
        const double v = price_with_shift(
            [](double) { return cplx{0.0, 0.0}; }, r, cfg);
        CHECK(v == doctest::Approx(std::exp(-r * t)));
    }
    SUBCASE("r0 invariance on an analytic transform") {
        // Correction transform -1/(q+1): time domain exp(-(r+..)..) algebra
        // must give the same price for any shift.
        auto tr = [](double q) { return cplx(-0.1 / (q + 1.0), 0.0); };
        GwrConfig c0{8, 0.0, t};
        GwrConfig c5{8, 5.0, t};
        const double v0 = price_with_shift(tr, r, c0);
        const double v5 = price_with_shift(tr, r, c5);
        CHECK(std::abs(v0 - v5) < 1e-4);
    }
    SUBCASE("large |r0|*T triggers the overflow guard") {
        GwrConfig big{8, 60.0, 0.5};
        CHECK_THROWS_AS(price_with_shift([](double) { return cplx{0, 0}; },
                                         0.0, big),
                        std::runtime_error);
    }
}
