#pragma once

#include <vector>

#include "dblevy/kobol.hpp"
#include "dblevy/sinh_grid.hpp"

namespace dblevy {

/// Main grids on the upper/lower contours plus the longer, finer grids used
/// for the factor integrals. The upper contour crosses the imaginary axis at
/// i*a_plus with a_plus in (0, lambda_plus); the lower one at i*a_minus with
/// a_minus in (lambda_minus, 0).
struct ContourPair {
    DeformedGrid upper;
    DeformedGrid lower;
    DeformedGrid upper_fine;
    DeformedGrid lower_fine;
};

struct ContourConfig {
    double b = 0.9;
    double omega = 0.0;   // 0 means "use pi/4"
    double omega1 = 0.0;
    int main_points = 276;   // total point count per main grid
    int whf_points = 502;    // total point count per fine grid
    double kappa = 0.4;
    double eps_trunc = 1e-12;  // wing tolerance for the main grids
    double eps_whf = 1e-17;    // wing tolerance for the fine grids
};

/// Builds symmetric upper/lower grids. offset_upper/offset_lower are the
/// smallest decay offsets for the e^{i(x-h_plus)xi} / e^{i(x-h_minus)xi}
/// factors (distance of the spot set to the upper/lower barrier); the
/// corridor width caps nothing since min(offset) <= width/2 always.
ContourPair make_contour_pair(const KoBoLParams& p, double offset_upper,
                              double offset_lower, const ContourConfig& cfg);

struct AdmissibilityReport {
    bool ok = true;
    std::string violation;     // empty when ok
    double min_distance = 0.0; // of 1 + psi/q0 from (-inf, 0]
};

/// Conditions on the smallest spectral value q0: (1) q0 + psi(i a+) > 0 with
/// a+ in (0, lambda+); (2) q0 + psi(i a-) > 0 and q0 + a-*mu > 0; (3)
/// q0 + psi(eta) off (-inf, 0] sampled at every fine-grid point.
AdmissibilityReport check_admissibility(const KoBoLParams& p, double q0,
                                        const ContourPair& pair);

/// Wiener-Hopf factor values tabulated on both main grids for one spectral
/// value q. phi_plus0_on_plus and phi_minus_on_minus are integrated directly;
/// the rest follow from the drift split and the factorization identity.
struct FactorTables {
    double q = 0.0;
    std::vector<cplx> phi_plus0_on_plus;
    std::vector<cplx> phi_minus_on_minus;
    std::vector<cplx> phi_plus_on_plus;
    std::vector<cplx> phi_plus_on_minus;
    std::vector<cplx> phi_minus_on_plus;
    std::vector<cplx> phi_minus0_on_minus;  // phi^{+,0} continued to the lower grid
    double identity_residual = 0.0;  // max |phi+ phi- (1+psi/q) - 1|
};

FactorTables compute_factors(const KoBoLParams& p, double q,
                             const ContourPair& pair);

/// phi^{+,0}_q evaluated by the direct integral over an arbitrary grid lying
/// below every target (used by the continuation checks and the regime solver).
std::vector<cplx> phi_plus0_direct(const KoBoLParams& p, double q,
                                   std::span<const cplx> targets,
                                   const DeformedGrid& below);

/// phi^-_q by the direct integral over a grid lying above every target.
std::vector<cplx> phi_minus_direct(const KoBoLParams& p, double q,
                                   std::span<const cplx> targets,
                                   const DeformedGrid& above);

/// Diagnostic: evaluates phi^+_q through the general-formula integrand
/// log(1 + psi(eta)/q) on a horizontal line Im eta = omega_minus
/// (sinh-parametrized) and reports the max deviation from the tabulated
/// values at the given indices of the upper main grid.
double cross_check_general_formulas(const KoBoLParams& p, double q,
                                    const ContourPair& pair,
                                    const FactorTables& tables,
                                    double omega_minus,
                                    const std::vector<int>& test_indices);

}  // namespace dblevy
