#include "dblevy/wiener_hopf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dblevy {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kImag{0.0, 1.0};

cplx Phi(const KoBoLParams& p, double q, cplx xi) {
    return 1.0 + psi0(p, xi) / (q - kImag * p.mu * xi);
}

double dist_from_negative_ray(cplx w) {
    if (w.real() > 0.0) return std::abs(w);
    return std::abs(w.imag());
}

// log(Phi) samples along a grid; throws on a principal-branch cut crossing.
std::vector<cplx> log_phi_samples(const KoBoLParams& p, double q,
                                  const DeformedGrid& g) {
    std::vector<cplx> out(g.size());
    for (int k = 0; k < g.size(); ++k) {
        const cplx w = Phi(p, q, g.points[k]);
        if (w.real() <= 0.0 && std::abs(w.imag()) <= 1e-12 * (1.0 - w.real()))
            throw std::runtime_error("compute_factors: log branch violation");
        out[k] = std::log(w);
    }
    return out;
}

// exp[ sign/(2 pi i) * zeta * sum_k xi*logPhi_k*der_k / (eta_k (eta_k - xi)) ]
std::vector<cplx> factor_integral(std::span<const cplx> targets,
                                  const DeformedGrid& g,
                                  const std::vector<cplx>& log_phi,
                                  double sign) {
    std::vector<cplx> out(targets.size());
    const cplx pref = sign * g.zeta / (2.0 * kPi * kImag);
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const cplx xi = targets[j];
        cplx acc{0.0, 0.0};
        for (int k = 0; k < g.size(); ++k) {
            const cplx eta = g.points[k];
            acc += log_phi[k] * g.derivs[k] / (eta * (eta - xi));
        }
        out[j] = std::exp(pref * xi * acc);
    }
    return out;
}
}  // namespace

ContourPair make_contour_pair(const KoBoLParams& p, double offset_upper,
                              double offset_lower, const ContourConfig& cfg) {
    const double om = cfg.omega > 0.0 ? cfg.omega : kPi / 4.0;
    const SinhContour up = build_contour(cfg.omega1, cfg.b, om);
    const SinhContour lo = build_contour(-cfg.omega1, cfg.b, -om);
    const double a_plus = up.crossing();
    const double a_minus = lo.crossing();
    if (!(a_plus > 0.0 && a_plus < p.lambda_plus))
        throw std::invalid_argument(
            "make_contour_pair: upper crossing must lie in (0, lambda_plus)");
    if (!(a_minus < 0.0 && a_minus > p.lambda_minus))
        throw std::invalid_argument(
            "make_contour_pair: lower crossing must lie in (lambda_minus, 0)");

    // Main grids: Lambda from the rule of thumb, step Lambda/N with preset N.
    // Short presets cap the half-length instead of coarsening the step: the
    // aliasing error of a too-large step oscillates with the spectral value
    // and the Laplace inversion amplifies it, while the truncation tail is
    // smooth in q and largely cancels there.
    constexpr double kMaxMainStep = 0.26;
    constexpr double kMaxFineStep = 0.20;
    const int n_main = preset_half_n(cfg.main_points);
    const double lam_lower = std::min(
        truncation_lambda(lo, offset_upper, cfg.kappa, cfg.eps_trunc),
        kMaxMainStep * n_main);
    const double lam_upper = std::min(
        truncation_lambda(up, offset_lower, cfg.kappa, cfg.eps_trunc),
        kMaxMainStep * n_main);
    // Fine grids: the integrand decays like exp((nu-2)|y|).
    const int n_fine = preset_half_n(cfg.whf_points);
    const double lam_fine =
        std::min(std::log(1.0 / cfg.eps_whf) / (2.0 - p.nu),
                 kMaxFineStep * n_fine);

    ContourPair pair;
    pair.upper = build_grid(up, lam_upper / n_main, n_main);
    pair.lower = build_grid(lo, lam_lower / n_main, n_main);
    pair.upper_fine = build_grid(up, lam_fine / n_fine, n_fine);
    pair.lower_fine = build_grid(lo, lam_fine / n_fine, n_fine);
    return pair;
}

AdmissibilityReport check_admissibility(const KoBoLParams& p, double q0,
                                        const ContourPair& pair) {
    AdmissibilityReport rep;
    const double a_plus = pair.upper.contour.crossing();
    const double a_minus = pair.lower.contour.crossing();

    const double v1 = q0 + psi(p, cplx(0.0, a_plus)).real();
    if (!(v1 > 0.0)) {
        rep.ok = false;
        rep.violation = "condition (1): q0 + psi(i a+) <= 0";
        return rep;
    }
    const double v2 = q0 + psi(p, cplx(0.0, a_minus)).real();
    if (!(v2 > 0.0)) {
        rep.ok = false;
        rep.violation = "condition (2): q0 + psi(i a-) <= 0";
        return rep;
    }
    if (!(q0 + a_minus * p.mu > 0.0)) {
        rep.ok = false;
        rep.violation = "condition (2): q0 + a-*mu <= 0";
        return rep;
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (const DeformedGrid* g : {&pair.upper_fine, &pair.lower_fine}) {
        for (const cplx& eta : g->points) {
            const cplx w = 1.0 + psi(p, eta) / q0;
            const double d = dist_from_negative_ray(w);
            min_dist = std::min(min_dist, d);
            if (w.real() <= 0.0 && std::abs(w.imag()) <= 1e-12 * (1.0 - w.real())) {
                rep.ok = false;
                rep.violation = "condition (3): q0 + psi(eta) on (-inf, 0]";
                return rep;
            }
        }
    }
    rep.min_distance = min_dist;
    return rep;
}

FactorTables compute_factors(const KoBoLParams& p, double q,
                             const ContourPair& pair) {
    FactorTables t;
    t.q = q;
    const auto log_lo = log_phi_samples(p, q, pair.lower_fine);
    const auto log_hi = log_phi_samples(p, q, pair.upper_fine);

    // phi^{+,0} on the upper grid: integrate over the lower fine grid.
    t.phi_plus0_on_plus =
        factor_integral(pair.upper.points, pair.lower_fine, log_lo, -1.0);
    // phi^- on the lower grid: integrate over the upper fine grid.
    t.phi_minus_on_minus =
        factor_integral(pair.lower.points, pair.upper_fine, log_hi, +1.0);

    const int n = pair.upper.size();
    t.phi_plus_on_plus.resize(n);
    t.phi_minus_on_plus.resize(n);
    t.phi_plus_on_minus.resize(n);
    t.phi_minus0_on_minus.resize(n);

    double residual = 0.0;
    for (int k = 0; k < n; ++k) {
        const cplx xp = pair.upper.points[k];
        const cplx drift_p = q / (q - kImag * p.mu * xp);
        t.phi_plus_on_plus[k] = drift_p * t.phi_plus0_on_plus[k];
        // Cross-fill by the factorization identity.
        t.phi_minus_on_plus[k] =
            1.0 / (Phi(p, q, xp) * t.phi_plus0_on_plus[k]);

        const cplx xm = pair.lower.points[k];
        t.phi_minus0_on_minus[k] =
            1.0 / (Phi(p, q, xm) * t.phi_minus_on_minus[k]);
        t.phi_plus_on_minus[k] =
            q / (q - kImag * p.mu * xm) * t.phi_minus0_on_minus[k];

        const cplx rp = t.phi_plus_on_plus[k] * t.phi_minus_on_plus[k] *
                            (1.0 + psi(p, xp) / q) -
                        1.0;
        const cplx rm = t.phi_plus_on_minus[k] * t.phi_minus_on_minus[k] *
                            (1.0 + psi(p, xm) / q) -
                        1.0;
        residual = std::max({residual, std::abs(rp), std::abs(rm)});
    }
    t.identity_residual = residual;
    if (!(residual < 1e-10))
        throw std::runtime_error("compute_factors: identity residual too large");
    return t;
}

std::vector<cplx> phi_plus0_direct(const KoBoLParams& p, double q,
                                   std::span<const cplx> targets,
                                   const DeformedGrid& below) {
    return factor_integral(targets, below, log_phi_samples(p, q, below), -1.0);
}

std::vector<cplx> phi_minus_direct(const KoBoLParams& p, double q,
                                   std::span<const cplx> targets,
                                   const DeformedGrid& above) {
    return factor_integral(targets, above, log_phi_samples(p, q, above), +1.0);
}

double cross_check_general_formulas(const KoBoLParams& p, double q,
                                    const ContourPair& pair,
                                    const FactorTables& tables,
                                    double omega_minus,
                                    const std::vector<int>& test_indices) {
    // Flat line Im eta = omega_minus, sinh-parametrized so the trapezoid sum
    // converges despite the logarithmic growth of log(1 + psi/q).
    const SinhContour line = build_contour(omega_minus, 1.0, 0.0);
    const double lam = 30.0;
    const int n = 1800;
    const DeformedGrid g = build_grid(line, lam / n, n);
    std::vector<cplx> log_psi(g.size());
    for (int k = 0; k < g.size(); ++k) {
        const cplx w = 1.0 + psi(p, g.points[k]) / q;
        if (w.real() <= 0.0 && std::abs(w.imag()) <= 1e-12 * (1.0 - w.real()))
            return std::numeric_limits<double>::infinity();
        log_psi[k] = std::log(w);
    }
    double dev = 0.0;
    for (int idx : test_indices) {
        const cplx xi = pair.upper.points[idx];
        cplx acc{0.0, 0.0};
        for (int k = 0; k < g.size(); ++k) {
            const cplx eta = g.points[k];
            acc += log_psi[k] * g.derivs[k] / (eta * (xi - eta));
        }
        const cplx val = std::exp(g.zeta * xi * acc / (2.0 * kPi * kImag));
        dev = std::max(dev, std::abs(val - tables.phi_plus_on_plus[idx]));
    }
    return dev;
}

}  // namespace dblevy
