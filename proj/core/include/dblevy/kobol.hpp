#pragma once

#include <optional>
#include <string>

#include "dblevy/sinh_grid.hpp"

namespace dblevy {

/// KoBoL (CGMY) model of finite variation: order nu in (0,1), tempering
/// lambda_minus < 0 < lambda_plus, drift mu != 0, jump intensity scale c > 0.
/// psi(xi) = -i*mu*xi + psi0(xi) with
/// psi0(xi) = c*Gamma(-nu)*[(-lm)^nu - (-lm-i xi)^nu + lp^nu - (lp+i xi)^nu].
struct KoBoLParams {
    double c;
    double nu;
    double lambda_minus;
    double lambda_plus;
    double mu;
    double c_gamma;  // c * tgamma(-nu), cached

    KoBoLParams(double c_, double nu_, double lambda_minus_, double lambda_plus_,
                double mu_);
};

/// Cone/strip metadata of the characteristic exponent. The cone angles are
/// +-pi/2 for KoBoL; the analyticity strip is (lambda_minus, lambda_plus).
struct SinhRegularityInfo {
    double order;
    double gamma_minus;
    double gamma_plus;
    double strip_lo;
    double strip_hi;
};

/// Jump part of the exponent, principal branch, analytic off the two cuts
/// i(-inf, lambda_minus] and i[lambda_plus, +inf).
cplx psi0(const KoBoLParams& p, cplx xi);

/// Full exponent psi(xi) = -i*mu*xi + psi0(xi).
cplx psi(const KoBoLParams& p, cplx xi);

/// Leading coefficient of psi0(rho e^{i phi}) ~ c_inf(phi) rho^nu:
/// c_inf(phi) = -2 c Gamma(-nu) cos(nu pi/2) e^{i nu phi}, |phi| < pi/2.
cplx asymptotic_coeff(const KoBoLParams& p, double phi);

/// Checks the model is inside the method's scope (nu in (0,1), mu > 0,
/// nonempty strip); throws std::domain_error naming the violated condition.
SinhRegularityInfo validate(const KoBoLParams& p);

/// Spatial reflection x -> -x: (c, nu, -lambda_plus, -lambda_minus, -mu).
KoBoLParams mirror(const KoBoLParams& p);

/// Diagnostic only: psi(-i) + carry, never enforced as a martingale condition.
double drift_diagnostic(const KoBoLParams& p, double carry);

/// Calibrated parameter presets keyed "AA", "AB", "MA", "MB".
std::optional<KoBoLParams> preset(const std::string& key);

}  // namespace dblevy
