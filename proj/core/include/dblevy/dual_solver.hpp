#pragma once

#include <Eigen/Dense>

#include "dblevy/wiener_hopf.hpp"

namespace dblevy {

struct BarrierGeometry {
    double h_minus;
    double h_plus;

    BarrierGeometry(double lo, double hi);
    double width() const { return h_plus - h_minus; }
};

/// Dual-space state: samples of W-hat^+ on the lower grid and W-hat^- on the
/// upper grid.
struct DualState {
    Eigen::VectorXcd w_plus;   // on the lower grid
    Eigen::VectorXcd w_minus;  // on the upper grid
};

/// K_mp maps samples on the upper grid to samples on the lower grid (rows =
/// lower targets); K_pm the reverse. Quadrature weights are folded into the
/// source side.
struct KernelMatrices {
    Eigen::MatrixXcd k_mp;
    Eigen::MatrixXcd k_pm;
};

/// W-hat^+_1 = -i/xi on the lower grid, W-hat^-_1 = +i/xi on the upper grid.
DualState seed(const BarrierGeometry& geom, const ContourPair& pair);

KernelMatrices build_kernels(const KoBoLParams& p, double q,
                             const FactorTables& factors,
                             const BarrierGeometry& geom,
                             const ContourPair& pair);

struct SolveDiagnostics {
    int terms = 0;
    double last_increment = 0.0;
    std::vector<double> increments;
};

/// Block (1): alternating series W^+-= sum_j (-1)^j W_j, truncated when the
/// sup-norm increment drops below tol or after m0 update cycles.
DualState solve_series(const KernelMatrices& kernels, const DualState& state0,
                       int m0, double tol, SolveDiagnostics* diag = nullptr);

enum class DirectBlock { Invert, LinearSolve };

/// Blocks (2)/(3): W^+- = (I - K)^{-1} (W_2 - W_1) with K the composed map.
DualState solve_direct(const KernelMatrices& kernels, const DualState& state0,
                       DirectBlock block = DirectBlock::LinearSolve);

/// Spectral radius estimate of the composed lower-to-lower map (power
/// iteration); the series converges iff this is < 1.
double composed_spectral_radius(const KernelMatrices& kernels, int iters = 80);

/// Step IX: V1_plus + V1_minus at log-spot x in (h_minus, h_plus). The true
/// value is real; the imaginary part is returned for diagnostics.
cplx evaluate_correction(const DualState& state, const FactorTables& factors,
                         const BarrierGeometry& geom, const ContourPair& pair,
                         double x);

}  // namespace dblevy
