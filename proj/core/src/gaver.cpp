#include "dblevy/gaver.hpp"

#include <cmath>
#include <stdexcept>

namespace dblevy {

std::vector<double> gwr_nodes(const GwrConfig& cfg) {
    if (cfg.m < 2) throw std::invalid_argument("gwr_nodes: M must be >= 2");
    if (!(cfg.maturity > 0.0))
        throw std::invalid_argument("gwr_nodes: maturity must be > 0");
    const double tau = std::log(2.0) / cfg.maturity;
    std::vector<double> q(2 * cfg.m);
    for (int k = 1; k <= 2 * cfg.m; ++k) q[k - 1] = k * tau;
    return q;
}

double gwr_invert(const std::vector<cplx>& samples, const GwrConfig& cfg,
                  GwrDiagnostics* diag) {
    const int m = cfg.m;
    if (static_cast<int>(samples.size()) != 2 * m)
        throw std::invalid_argument("gwr_invert: expected 2M samples");
    GwrDiagnostics local;
    const double tau = std::log(2.0) / cfg.maturity;

    // Gaver triangle, two-term form. The correction form G + (n/k)(G[n]-G[n+1])
    // keeps constant sample sequences exact.
    std::vector<cplx> row(2 * m + 1);
    for (int n = 1; n <= 2 * m; ++n) {
        row[n] = static_cast<double>(n) * tau * samples[n - 1];
        local.max_imag = std::max(local.max_imag, std::abs(row[n].imag()));
    }
    std::vector<cplx> gaver(m + 1);
    for (int k = 1; k <= m; ++k) {
        std::vector<cplx> next(2 * m + 1);
        for (int n = k; n <= 2 * m - k; ++n) {
            const double ratio = static_cast<double>(n) / k;
            next[n] = row[n] + ratio * (row[n] - row[n + 1]);
        }
        row = std::move(next);
        gaver[k] = row[k];
    }

    // Wynn rho on G_1..G_M; keep the deepest even-order first-column entry.
    std::vector<cplx> prev2(m + 1, cplx{0.0, 0.0});  // rho_{k-2}
    std::vector<cplx> prev(m + 1);                   // rho_{k-1}
    for (int n = 1; n <= m; ++n) prev[n] = gaver[n];
    cplx best = prev[1];
    for (int k = 1; k <= m - 1; ++k) {
        std::vector<cplx> cur(m + 1);
        bool ok = true;
        for (int n = 1; n <= m - k; ++n) {
            const cplx denom = prev[n + 1] - prev[n];
            if (denom == cplx{0.0, 0.0} || !std::isfinite(std::abs(denom))) {
                ok = false;
                break;
            }
            cur[n] = prev2[n + 1] + static_cast<double>(k) / denom;
            if (!std::isfinite(std::abs(cur[n]))) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            local.rho_breakdown = true;
            break;
        }
        if (k % 2 == 0) best = cur[1];
        prev2 = std::move(prev);
        prev = std::move(cur);
    }
    local.max_imag = std::max(local.max_imag, std::abs(best.imag()));
    if (diag) *diag = local;
    return best.real();
}

double price_with_shift(const std::function<cplx(double)>& transform_at,
                        double r, const GwrConfig& cfg, GwrDiagnostics* diag) {
    if (std::abs(cfg.r0) * cfg.maturity > 10.0)
        throw std::runtime_error(
            "price_with_shift: |r0|*T > 10, shift factors overflow double "
            "precision");
    const auto nodes = gwr_nodes(cfg);
    std::vector<cplx> samples(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        try {
            samples[k] = transform_at(r + cfg.r0 + nodes[k]);
        } catch (const std::exception& e) {
            throw std::runtime_error("price_with_shift: node " +
                                     std::to_string(k + 1) + ": " + e.what());
        }
    }
    const double v1 = gwr_invert(samples, cfg, diag);
    return std::exp(-r * cfg.maturity) + std::exp(cfg.r0 * cfg.maturity) * v1;
}

}  // namespace dblevy
