#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dblevy {

using cplx = std::complex<double>;

/// Sinh-deformed integration contour xi(y) = i*omega1 + b*sinh(i*omega + y).
/// The wings run off to infinity at angle omega to the real axis; the curve
/// crosses the imaginary axis at i*(omega1 + b*sin(omega)).
struct SinhContour {
    double omega1 = 0.0;
    double b = 1.0;
    double omega = 0.0;

    cplx map(double y) const;
    cplx deriv(double y) const;
    /// Imaginary-axis crossing height omega1 + b*sin(omega).
    double crossing() const;
};

SinhContour build_contour(double omega1, double b, double omega);

/// Truncated uniform grid on a sinh contour: points xi_k = xi(zeta*k) and
/// derivatives der_k = b*cosh(i*omega + zeta*k) for k = -N..N.
struct DeformedGrid {
    SinhContour contour;
    double zeta = 0.0;
    int half_n = 0;
    std::vector<cplx> points;
    std::vector<cplx> derivs;

    int size() const { return 2 * half_n + 1; }
};

DeformedGrid build_grid(const SinhContour& contour, double zeta, int half_n);

struct Truncation {
    double lambda;  // half-length N*zeta in the y coordinate
    int half_n;
};

/// Rule-of-thumb truncation: smallest Lambda with
/// exp(-b*offset*kappa*sin|omega|*e^Lambda) < eps, then N = ceil(Lambda/zeta)
/// with the default step heuristic (N is forced >= 4).
Truncation select_truncation(const SinhContour& contour, double offset,
                             double kappa, double eps);

/// Same rule but with the step (hence N) supplied by a grid preset.
double truncation_lambda(const SinhContour& contour, double offset,
                         double kappa, double eps);

/// Default trapezoid step for a target discretization error:
/// zeta = 2*pi*d / ln(10/eps) with conservative strip half-width d = pi/10.
double default_step(double eps);

/// Simplified trapezoid rule: zeta * sum samples[k]*derivs[k].
cplx integrate(const DeformedGrid& grid, std::span<const cplx> samples);

/// Grid-size presets (total point counts, main cycle / factor evaluation).
struct GridPreset {
    int main_points;
    int whf_points;
};

inline constexpr GridPreset kGridDefault{276, 502};
inline constexpr GridPreset kGridWide{306, 557};
inline constexpr GridPreset kGridCoarse{108, 188};
inline constexpr GridPreset kGridCoarser{88, 155};
inline constexpr GridPreset kGridCoarsest{55, 100};

/// Half-length N for a preset given as a total point count (2N+1 points).
inline int preset_half_n(int total_points) { return total_points / 2; }

}  // namespace dblevy
