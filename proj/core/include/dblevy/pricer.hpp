#pragma once

#include <vector>

#include "dblevy/dual_solver.hpp"
#include "dblevy/gaver.hpp"

namespace dblevy {

struct Numerics {
    int main_points = 276;
    int whf_points = 502;
    int gwr_m = 8;
    double r0 = 0.0;
    int m0 = 16;
    double series_tol = 1e-15;
    double kappa = 0.4;
    double eps_trunc = 1e-12;
    double eps_whf = 1e-17;
    double b = 0.9;
    double omega = 0.0;   // 0 = default pi/4
    double omega1 = 0.0;
    int solver_block = 1;  // 1 = series, 2 = invert, 3 = linear solve
};

/// Everything is in log-price units: barriers h_minus < h_plus, spots x.
struct PricingRequest {
    KoBoLParams model;
    double h_minus;
    double h_plus;
    std::vector<double> spots;
    double maturity = 0.25;
    double rate = 0.004;
    Numerics numerics;
};

struct PricingResult {
    double price = 0.0;
    bool knocked_out = false;
    double im_residual = 0.0;
    double whf_residual = 0.0;
    int series_terms = 0;
    double last_increment = 0.0;
    double gwr_max_imag = 0.0;
    std::vector<double> node_ms;  // wall time per spectral node
    double total_ms = 0.0;
};

PricingResult price(const PricingRequest& req);

/// Prices every spot reusing all per-node state; only the final inverse
/// Fourier evaluation repeats per spot.
std::vector<PricingResult> price_curve(const PricingRequest& req);

struct SelfConsistencyReport {
    std::vector<double> base;    // per spot
    std::vector<double> eps0;    // contour change
    std::vector<double> eps1;    // r0 = 5
    std::vector<double> eps2;    // 108/188 grids
    std::vector<double> eps3;    // r0 = 0.5, 88/155
    std::vector<double> eps4;    // r0 = -0.5, 55/100
    double max_eps0 = 0.0;
    double max_r0_family = 0.0;  // eps1/eps3/eps4
    double max_grid = 0.0;       // eps2
};

SelfConsistencyReport self_consistency(const PricingRequest& req);

}  // namespace dblevy
