#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dblevy/dual_solver.hpp"
#include "dblevy/gaver.hpp"

namespace dblevy {

/// Markov-modulated KoBoL model: per-state dynamics, switching rates
/// lambda(j,k) >= 0 for j != k, per-state discount rates and constant payoffs.
struct RegimeModel {
    std::vector<KoBoLParams> states;
    Eigen::MatrixXd rates;    // m x m, diagonal ignored
    std::vector<double> r;    // per-state rates, >= 0
    std::vector<double> payoff;  // per-state terminal payoffs, > 0

    int size() const { return static_cast<int>(states.size()); }
    double total_rate(int j) const;  // Lambda_j = sum_{k != j} rates(j,k)
};

/// Throws std::invalid_argument / std::domain_error on malformed models.
/// All states must share the drift sign (a global mirror handles mu < 0).
void validate_regime(const RegimeModel& model);

struct RegimeNumerics {
    int n_main = 200;        // half-length per contour
    double lambda_main = 16.0;
    int n_fine = 300;
    double eps_fine = 1e-15;
    double kappa = 0.4;
    double eps_eval = 1e-12;   // evaluation-decay tolerance for lambda_main
    double inner_tol = 1e-15;  // relative sup-norm increment
    int inner_max = 100;
    double outer_tol = 1e-15;  // relative to the first outer term
    int outer_max = 30;
    int gwr_m = 8;
    double r0 = 0.0;
    double angle1 = 0.0;  // 0 = default pi/6
    double angle2 = 0.0;  // 0 = default pi/3
    double crossing1 = 0.45;
    double crossing2 = 0.85;
};

/// Double-spiral contour system: two lower and two upper sinh contours plus
/// deeper fine contours for the factor integrals, pairwise disjoint and
/// ordered fine_lo < L2 < L1 < 0 < U1 < U2 < fine_hi at the axis crossings.
struct SpiralGrids {
    DeformedGrid lower1, lower2, upper1, upper2;
    DeformedGrid fine_lo, fine_hi;
};

SpiralGrids make_spiral_grids(const RegimeModel& model,
                              const BarrierGeometry& geom, double x,
                              const RegimeNumerics& num);

/// Per-state factor tables on the four contours (index 0..3 = L1, L2, U1, U2)
/// for one spectral value Q_j = q + Lambda_j + r_j.
struct StateFactorTables {
    double big_q = 0.0;
    std::array<Eigen::VectorXcd, 4> phi_plus0;
    std::array<Eigen::VectorXcd, 4> phi_plus;
    std::array<Eigen::VectorXcd, 4> phi_minus;
    Eigen::VectorXcd resolvent_l2;  // 1 / (Q_j + psi_j(xi)), xi on L2
    Eigen::VectorXcd resolvent_u2;
};

/// Everything one spectral node needs: per-state tables plus the Cauchy
/// kernels between the contours (kernels are node-independent and shared).
struct RegimeKernels {
    Eigen::MatrixXcd l2_to_l1, l1_to_l2;
    Eigen::MatrixXcd u2_to_u1, u1_to_u2;
    Eigen::MatrixXcd u1_to_l1, u1_to_l2;
    Eigen::MatrixXcd l1_to_u1, l1_to_u2;
};

RegimeKernels make_regime_kernels(const SpiralGrids& grids);

StateFactorTables compute_state_factors(const KoBoLParams& p, double big_q,
                                        const SpiralGrids& grids);

/// Per-state samples on a contour pair: [j][0] on the first contour of the
/// half-plane, [j][1] on the second.
using WaveField = std::vector<std::array<Eigen::VectorXcd, 2>>;

/// Solves Q_j(q) V0_j = G_j + sum_{k != j} lambda_jk V0_k.
Eigen::VectorXd solve_v0(const RegimeModel& model, double q);

/// One inner update of the coupled plus-side system: returns barrier +
/// coupling(prev) for every state on both lower contours.
WaveField inner_step_plus(const RegimeModel& model,
                          const std::vector<StateFactorTables>& tables,
                          const RegimeKernels& kernels,
                          const SpiralGrids& grids,
                          const WaveField& barrier,
                          const WaveField& prev);

/// Mirror-symmetric minus-side update on the upper contours.
WaveField inner_step_minus(const RegimeModel& model,
                           const std::vector<StateFactorTables>& tables,
                           const RegimeKernels& kernels,
                           const SpiralGrids& grids,
                           const WaveField& barrier,
                           const WaveField& prev);

struct RegimeDiagnostics {
    int outer_terms = 0;
    int inner_iters_max = 0;
    double last_outer_term = 0.0;
    std::vector<double> inner_increments;  // of the last outer term
};

/// DNT prices for every initial state.
std::vector<double> price_regime_dnt_all(const RegimeModel& model,
                                         const BarrierGeometry& geom, double t,
                                         double x, const RegimeNumerics& num,
                                         RegimeDiagnostics* diag = nullptr);

double price_regime_dnt(const RegimeModel& model, const BarrierGeometry& geom,
                        double t, double x, int initial_state,
                        const RegimeNumerics& num,
                        RegimeDiagnostics* diag = nullptr);

}  // namespace dblevy
