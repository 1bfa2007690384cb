#include "dblevy/sinh_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dblevy {

namespace {
constexpr double kPi = std::numbers::pi;
}

cplx SinhContour::map(double y) const {
    return cplx(0.0, omega1) + b * std::sinh(cplx(y, omega));
}

cplx SinhContour::deriv(double y) const {
    return b * std::cosh(cplx(y, omega));
}

double SinhContour::crossing() const { return omega1 + b * std::sin(omega); }

SinhContour build_contour(double omega1, double b, double omega) {
    if (!(b > 0.0))
        throw std::invalid_argument("build_contour: scale b must be positive");
    if (!(std::abs(omega) < kPi / 2.0))
        throw std::invalid_argument("build_contour: |omega| must be < pi/2");
    return SinhContour{omega1, b, omega};
}

DeformedGrid build_grid(const SinhContour& contour, double zeta, int half_n) {
    if (!(zeta > 0.0))
        throw std::invalid_argument("build_grid: zeta must be positive");
    if (half_n < 1)
        throw std::invalid_argument("build_grid: N must be >= 1");
    DeformedGrid g;
    g.contour = contour;
    g.zeta = zeta;
    g.half_n = half_n;
    g.points.resize(g.size());
    g.derivs.resize(g.size());
    for (int k = -half_n; k <= half_n; ++k) {
        g.points[k + half_n] = contour.map(zeta * k);
        g.derivs[k + half_n] = contour.deriv(zeta * k);
    }
    return g;
}

double truncation_lambda(const SinhContour& contour, double offset,
                         double kappa, double eps) {
    if (!(offset > 0.0))
        throw std::invalid_argument(
            "select_truncation: degenerate geometry (spot on a barrier)");
    if (!(kappa > 0.0 && kappa < 0.5))
        throw std::invalid_argument("select_truncation: kappa must be in (0,0.5)");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("select_truncation: eps must be in (0,1)");
    const double decay =
        contour.b * offset * kappa * std::abs(std::sin(contour.omega));
    if (!(decay > 0.0))
        throw std::invalid_argument("select_truncation: flat contour has no decay");
    const double lam = std::log(std::log(1.0 / eps) / decay);
    return std::max(lam, 0.0);
}

double default_step(double eps) {
    const double d = kPi / 10.0;
    return 2.0 * kPi * d / std::log(10.0 / eps);
}

Truncation select_truncation(const SinhContour& contour, double offset,
                             double kappa, double eps) {
    const double lam = truncation_lambda(contour, offset, kappa, eps);
    const double zeta = default_step(eps);
    int n = static_cast<int>(std::ceil(lam / zeta));
    n = std::max(n, 4);
    return Truncation{lam, n};
}

cplx integrate(const DeformedGrid& grid, std::span<const cplx> samples) {
    if (static_cast<int>(samples.size()) != grid.size())
        throw std::invalid_argument("integrate: sample count does not match grid");
    cplx acc{0.0, 0.0};
    for (int k = 0; k < grid.size(); ++k) acc += samples[k] * grid.derivs[k];
    return grid.zeta * acc;
}

}  // namespace dblevy
