#include <doctest.h>

#include <cmath>

#include "dblevy/pricer.hpp"
#include "dblevy/regime.hpp"

using namespace dblevy;

namespace {
constexpr double kRate = 0.01571;
const BarrierGeometry kGeom(std::log(0.95), std::log(1.05));

RegimeModel one_state(const KoBoLParams& p, double r) {
    RegimeModel m;
    m.states = {p};
    m.rates = Eigen::MatrixXd::Zero(1, 1);
    m.r = {r};
    m.payoff = {1.0};
    return m;
}

RegimeModel two_states(const KoBoLParams& a, const KoBoLParams& b, double l12,
                       double l21, double r, double g1 = 1.0, double g2 = 1.0) {
    RegimeModel m;
    m.states = {a, b};
    m.rates = Eigen::MatrixXd::Zero(2, 2);
    m.rates(0, 1) = l12;
    m.rates(1, 0) = l21;
    m.r = {r, r};
    m.payoff = {g1, g2};
    return m;
}

double single_regime_price(double rate) {
    PricingRequest req{*preset("MB"), kGeom.h_minus, kGeom.h_plus, {0.0},
                       0.25,          rate,          Numerics{}};
    return price(req).price;
}
}  // namespace

TEST_CASE("model validation") {
    auto m = two_states(*preset("MB"), *preset("MA"), 0.5, 0.5, 0.01);
    CHECK_NOTHROW(validate_regime(m));
    CHECK(m.total_rate(0) == doctest::Approx(0.5));

    m.rates(0, 1) = -1.0;
    CHECK_THROWS_AS(validate_regime(m), std::invalid_argument);
    m.rates(0, 1) = 0.5;
    m.payoff[1] = 0.0;
    CHECK_THROWS_AS(validate_regime(m), std::invalid_argument);
    m.payoff[1] = 1.0;
    m.states[1] = mirror(m.states[1]);  // mixed drift signs
    CHECK_THROWS_AS(validate_regime(m), std::domain_error);
}

TEST_CASE("v0 system") {
    SUBCASE("m = 1 collapses to G/(q+r)") {
        const auto m = one_state(*preset("MB"), 0.03);
        const auto v = solve_v0(m, 2.0);
        CHECK(v[0] == doctest::Approx(1.0 / 2.03));
    }
    SUBCASE("identical symmetric states give 1/q") {
        auto m = two_states(*preset("MB"), *preset("MB"), 0.8, 0.8, 0.0);
        const auto v = solve_v0(m, 1.7);
        CHECK(v[0] == doctest::Approx(1.0 / 1.7));
        CHECK(v[1] == doctest::Approx(1.0 / 1.7));
    }
    SUBCASE("2x2 with distinct payoffs solves with a tiny residual") {
        auto m = two_states(*preset("MB"), *preset("MB"), 1.0, 1.0, 0.0, 1.0, 2.0);
        const double q = 1.0;
        const auto v = solve_v0(m, q);
        const double r0 = (q + 1.0) * v[0] - 1.0 - 1.0 * v[1];
        const double r1 = (q + 1.0) * v[1] - 2.0 - 1.0 * v[0];
        CHECK(std::abs(r0) < 1e-14);
        CHECK(std::abs(r1) < 1e-14);
        CHECK(v[0] > 0.0);
        CHECK(v[1] > 0.0);
    }
}

TEST_CASE("inner updates reduce to the single-regime recursion at m = 1") {
    // For one state the coupled updates must match the plain dual-space
    // series computed from the same factor tables on the spiral contours.
    const auto p = *preset("MB");
    const auto model = one_state(p, kRate);
    RegimeNumerics num;
    const auto grids = make_spiral_grids(model, kGeom, 0.0, num);
    const auto kernels = make_regime_kernels(grids);
    const double q = std::log(2.0) / 0.25;
    const double big_q = q + kRate;
    std::vector<StateFactorTables> tabs{compute_state_factors(p, big_q, grids)};
    const auto v0 = solve_v0(model, q);

    // s = 1 seeds: w = -i phi^+ V0 / xi on the lower contours.
    WaveField seed_p(1), seed_m(1);
    for (int c = 0; c < 2; ++c) {
        const auto& g = (c == 0) ? grids.lower1 : grids.lower2;
        Eigen::VectorXcd w(g.size());
        for (int k = 0; k < g.size(); ++k)
            w[k] = -cplx(0.0, 1.0) * tabs[0].phi_plus[c][k] * v0[0] /
                   g.points[k];
        seed_p[0][c] = w;
    }
    for (int c = 0; c < 2; ++c) {
        const auto& g = (c == 0) ? grids.upper1 : grids.upper2;
        Eigen::VectorXcd w(g.size());
        for (int k = 0; k < g.size(); ++k)
            w[k] = cplx(0.0, 1.0) * tabs[0].phi_minus[2 + c][k] * v0[0] /
                   g.points[k];
        seed_m[0][c] = w;
    }
    // With no coupling the inner step returns the barrier term unchanged.
    const auto out =
        inner_step_plus(model, tabs, kernels, grids, seed_p, seed_p);
    CHECK((out[0][0] - seed_p[0][0]).cwiseAbs().maxCoeff() < 1e-15);

    // And the seeds agree with the single-regime representation
    // w = phi^+ W-hat_1 / q with W-hat_1 = -i/xi (V0 = 1/(q + r)).
    for (int k = 0; k < grids.lower1.size(); ++k) {
        const cplx expect = tabs[0].phi_plus[0][k] *
                            (-cplx(0.0, 1.0) / grids.lower1.points[k]) / big_q;
        CHECK(std::abs(seed_p[0][0][k] - expect) < 1e-13);
    }
}

TEST_CASE("residue route agrees with direct integration between the contours") {
    // Coupling term evaluated at a probe between the two lower contours:
    // integrating over the deeper contour (valid side) and integrating over
    // the shallower one plus the residue must agree.
    const auto p = *preset("MB");
    const auto model = one_state(p, kRate);
    RegimeNumerics num;
    num.n_main = 640;          // fine steps keep the probe clear of the
    num.lambda_main = 16.0;    // Cauchy pole between the contours
    const auto grids = make_spiral_grids(model, kGeom, 0.0, num);
    const double q = std::log(2.0) / 0.25 + kRate;
    const auto tabs = compute_state_factors(p, q, grids);

    // probe between L1 (crossing -0.45) and L2 (crossing -0.85)
    const cplx probe(0.2, -0.64);
    const auto probe_fac =
        phi_minus_direct(p, q, std::vector<cplx>{probe}, grids.fine_hi);
    const cplx phi_m_probe = probe_fac[0];
    const cplx phi_c =
        1.0 + psi0(p, probe) / (q - cplx(0.0, 1.0) * p.mu * probe);
    const cplx phi_p0_probe = 1.0 / (phi_c * phi_m_probe);
    const cplx phi_p_probe =
        q / (q - cplx(0.0, 1.0) * p.mu * probe) * phi_p0_probe;

    // g = lambda * w with w the plus seed; evaluable anywhere off the cuts
    auto g_at = [&](cplx xi, cplx phi_plus_xi) {
        return -cplx(0.0, 1.0) * phi_plus_xi / (q * xi);
    };

    auto coupling_over = [&](const DeformedGrid& grid, int contour_idx) {
        cplx acc{0.0, 0.0};
        for (int k = 0; k < grid.size(); ++k) {
            const cplx eta = grid.points[k];
            acc += tabs.phi_minus[contour_idx][k] *
                   g_at(eta, tabs.phi_plus[contour_idx][k]) * grid.derivs[k] /
                   (eta - probe);
        }
        return phi_p_probe / q * grid.zeta * acc /
               (2.0 * std::numbers::pi * cplx(0.0, 1.0));
    };

    const cplx via_deep = coupling_over(grids.lower2, 1);  // eta below probe
    const cplx residue = g_at(probe, phi_p_probe) /
                         (q + psi(p, probe));
    const cplx via_shallow = coupling_over(grids.lower1, 0) + residue;
    CHECK(std::abs(via_deep - via_shallow) <
          1e-9 * (1.0 + std::abs(via_deep)));
}

TEST_CASE("all rates zero decouples the states") {
    const auto p = *preset("MB");
    auto m = two_states(p, *preset("MA"), 0.0, 0.0, kRate);
    RegimeNumerics num;
    const auto prices = price_regime_dnt_all(m, kGeom, 0.25, 0.0, num);
    PricingRequest ra{p, kGeom.h_minus, kGeom.h_plus, {0.0}, 0.25, kRate,
                      Numerics{}};
    PricingRequest rb{*preset("MA"), kGeom.h_minus, kGeom.h_plus, {0.0}, 0.25,
                      kRate,         Numerics{}};
    CHECK(std::abs(prices[0] - price(ra).price) < 1e-6);
    CHECK(std::abs(prices[1] - price(rb).price) < 1e-6);
}

TEST_CASE("m = 1 reduction matches the single-regime engine") {
    const auto m = one_state(*preset("MB"), kRate);
    RegimeNumerics num;
    RegimeDiagnostics diag;
    const auto prices = price_regime_dnt_all(m, kGeom, 0.25, 0.0, num, &diag);
    CHECK(std::abs(prices[0] - single_regime_price(kRate)) < 1e-6);
    CHECK(price_regime_dnt(m, kGeom, 0.25, 0.0, 0, num) ==
          doctest::Approx(prices[0]));
}

TEST_CASE("identical states collapse for any rate matrix") {
    const auto p = *preset("MB");
    RegimeNumerics num;
    const double single = single_regime_price(kRate);
    for (auto [l12, l21] : {std::pair{0.7, 1.3}, std::pair{2.0, 0.1}}) {
        const auto m = two_states(p, p, l12, l21, kRate);
        const auto prices = price_regime_dnt_all(m, kGeom, 0.25, 0.0, num);
        CHECK(std::abs(prices[0] - single) < 1e-6);
        CHECK(std::abs(prices[1] - single) < 1e-6);
        CHECK(std::abs(prices[0] - prices[1]) < 1e-6);
    }
}

TEST_CASE("inner iteration contracts geometrically") {
    const auto p = *preset("MB");
    const auto m = two_states(p, *preset("MA"), 0.9, 1.1, kRate);
    RegimeNumerics num;
    RegimeDiagnostics diag;
    price_regime_dnt_all(m, kGeom, 0.25, 0.0, num, &diag);
    REQUIRE(diag.inner_increments.size() >= 3);
    for (std::size_t i = 1; i < diag.inner_increments.size(); ++i)
        CHECK(diag.inner_increments[i] < diag.inner_increments[i - 1]);
}

TEST_CASE("riskier state prices lower; bounds hold") {
    const auto p = *preset("MB");
    KoBoLParams risky(2.0 * p.c, p.nu, p.lambda_minus, p.lambda_plus, p.mu);
    const auto m = two_states(p, risky, 0.5, 0.5, kRate);
    RegimeNumerics num;
    const auto prices = price_regime_dnt_all(m, kGeom, 0.25, 0.0, num);
    CHECK(prices[1] < prices[0]);
    for (double v : prices) {
        CHECK(v >= 0.0);
        CHECK(v <= std::exp(-kRate * 0.25) * 1.0);
    }
}

TEST_CASE("negative drift states reroute through the global mirror") {
    const auto p = mirror(*preset("MB"));
    RegimeModel m = one_state(p, kRate);
    RegimeNumerics num;
    const BarrierGeometry mirrored(-kGeom.h_plus, -kGeom.h_minus);
    const auto prices = price_regime_dnt_all(m, mirrored, 0.25, 0.0, num);
    CHECK(std::abs(prices[0] - single_regime_price(kRate)) < 1e-6);
}

TEST_CASE("spot outside the corridor prices to zero") {
    const auto m = one_state(*preset("MB"), kRate);
    RegimeNumerics num;
    const auto prices =
        price_regime_dnt_all(m, kGeom, 0.25, kGeom.h_plus + 0.01, num);
    CHECK(prices[0] == 0.0);
}
