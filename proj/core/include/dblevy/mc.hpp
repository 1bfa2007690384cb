#pragma once

#include <cstdint>
#include <string>

#include "dblevy/dual_solver.hpp"

namespace dblevy {

/// Compound-Poisson Monte Carlo with small jumps (|x| <= eps) replaced by
/// their mean and discrete barrier monitoring on the step grid. A coarse
/// oracle: it bounds the analytic price, it does not certify it.
struct McConfig {
    double eps = 1e-4;      // small-jump truncation, log-price units
    long n_paths = 100000;
    int n_steps = 2000;
    std::uint64_t seed = 1;
};

struct McResult {
    double price = 0.0;
    double stderr_ = 0.0;
    long survivors = 0;
    double jump_intensity = 0.0;   // both tails, |x| > eps
    double small_jump_mean = 0.0;  // per unit time
};

McResult simulate_dnt(const KoBoLParams& p, const BarrierGeometry& geom,
                      double t, double x, double r, const McConfig& cfg);

struct McComparison {
    double gap = 0.0;        // analytic - mc
    double gap_in_sigma = 0.0;
    bool flagged = false;    // |gap| > 3*stderr + 0.02
};

McComparison compare(double analytic_price, const McResult& mc);

}  // namespace dblevy
