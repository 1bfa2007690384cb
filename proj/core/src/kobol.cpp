#include "dblevy/kobol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dblevy {

namespace {
constexpr double kPi = std::numbers::pi;

bool on_cut(const KoBoLParams& p, cplx xi) {
    const double tol = 1e-12 * (1.0 + std::abs(xi));
    if (std::abs(xi.real()) > tol) return false;
    return xi.imag() >= p.lambda_plus - tol || xi.imag() <= p.lambda_minus + tol;
}
}  // namespace

KoBoLParams::KoBoLParams(double c_, double nu_, double lambda_minus_,
                         double lambda_plus_, double mu_)
    : c(c_), nu(nu_), lambda_minus(lambda_minus_), lambda_plus(lambda_plus_),
      mu(mu_), c_gamma(c_ * std::tgamma(-nu_)) {
    if (!(c > 0.0)) throw std::invalid_argument("KoBoLParams: c must be > 0");
    if (!(nu > 0.0 && nu < 1.0))
        throw std::invalid_argument("KoBoLParams: nu must be in (0,1)");
    if (!(lambda_minus < 0.0 && lambda_plus > 0.0))
        throw std::invalid_argument(
            "KoBoLParams: need lambda_minus < 0 < lambda_plus");
}

cplx psi0(const KoBoLParams& p, cplx xi) {
    if (on_cut(p, xi))
        throw std::domain_error("psi0: on-cut evaluation");
    const cplx ixi = cplx(0.0, 1.0) * xi;
    const double lm = -p.lambda_minus;  // > 0
    const double lp = p.lambda_plus;
    return p.c_gamma *
           (std::pow(lm, p.nu) - std::pow(cplx(lm) - ixi, p.nu) +
            std::pow(lp, p.nu) - std::pow(cplx(lp) + ixi, p.nu));
}

cplx psi(const KoBoLParams& p, cplx xi) {
    return cplx(0.0, -p.mu) * xi + psi0(p, xi);
}

cplx asymptotic_coeff(const KoBoLParams& p, double phi) {
    if (!(std::abs(phi) < kPi / 2.0))
        throw std::invalid_argument("asymptotic_coeff: |phi| must be < pi/2");
    const double scale = -2.0 * p.c_gamma * std::cos(p.nu * kPi / 2.0);
    return scale * std::exp(cplx(0.0, p.nu * phi));
}

SinhRegularityInfo validate(const KoBoLParams& p) {
    if (!(p.nu > 0.0 && p.nu < 1.0))
        throw std::domain_error("validate: order out of scope");
    if (p.mu == 0.0) throw std::domain_error("validate: zero drift");
    if (p.mu < 0.0) throw std::domain_error("validate: negative drift - use mirror");
    if (!(p.lambda_minus < p.lambda_plus))
        throw std::domain_error("validate: strip empty");
    return SinhRegularityInfo{p.nu, -kPi / 2.0, kPi / 2.0, p.lambda_minus,
                              p.lambda_plus};
}

KoBoLParams mirror(const KoBoLParams& p) {
    return KoBoLParams(p.c, p.nu, -p.lambda_plus, -p.lambda_minus, -p.mu);
}

double drift_diagnostic(const KoBoLParams& p, double carry) {
    return psi(p, cplx(0.0, -1.0)).real() + carry;
}

std::optional<KoBoLParams> preset(const std::string& key) {
    if (key == "AA") return KoBoLParams(0.881, 0.491, -40.43, 25.71, 0.0718);
    if (key == "AB") return KoBoLParams(1.358, 0.407, -52.14, 29.22, 0.09218);
    if (key == "MA") return KoBoLParams(0.677, 0.544, -37.69, 23.89, 0.0693);
    if (key == "MB") return KoBoLParams(1.125, 0.445, -51.66, 27.93, 0.0940);
    return std::nullopt;
}

}  // namespace dblevy
