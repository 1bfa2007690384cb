#pragma once

#include <functional>
#include <vector>

#include "dblevy/sinh_grid.hpp"

namespace dblevy {

/// Gaver-Wynn-Rho Laplace inversion setup: 2M nodes q'_k = k ln2/T.
struct GwrConfig {
    int m = 8;        // acceleration depth; node count = 2M
    double r0 = 0.0;  // spectral shift, unwound by exp(r0*T)
    double maturity = 0.25;
};

std::vector<double> gwr_nodes(const GwrConfig& cfg);

struct GwrDiagnostics {
    double max_imag = 0.0;   // largest |Im| seen in the samples / rho table
    bool rho_breakdown = false;
};

/// Rho-accelerated Gaver inversion of samples F(k ln2/T), k = 1..2M.
/// Returns the value at t = T. On a rho denominator underflow the last
/// stable even-order diagonal entry is returned and the breakdown flagged.
double gwr_invert(const std::vector<cplx>& samples, const GwrConfig& cfg,
                  GwrDiagnostics* diag = nullptr);

/// Discounted DNT assembly: V = exp(-r T) + exp(r0 T) * invert(samples),
/// where transform_at is evaluated at q = r + r0 + q'_k.
double price_with_shift(const std::function<cplx(double)>& transform_at,
                        double r, const GwrConfig& cfg,
                        GwrDiagnostics* diag = nullptr);

}  // namespace dblevy
