#include "dblevy/dual_solver.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dblevy {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kImag{0.0, 1.0};
}  // namespace

BarrierGeometry::BarrierGeometry(double lo, double hi) : h_minus(lo), h_plus(hi) {
    if (!(lo < hi))
        throw std::invalid_argument("BarrierGeometry: need h_minus < h_plus");
}

DualState seed(const BarrierGeometry&, const ContourPair& pair) {
    DualState s;
    s.w_plus.resize(pair.lower.size());
    s.w_minus.resize(pair.upper.size());
    for (int k = 0; k < pair.lower.size(); ++k)
        s.w_plus[k] = -kImag / pair.lower.points[k];
    for (int k = 0; k < pair.upper.size(); ++k)
        s.w_minus[k] = kImag / pair.upper.points[k];
    return s;
}

KernelMatrices build_kernels(const KoBoLParams& p, double q,
                             const FactorTables& factors,
                             const BarrierGeometry& geom,
                             const ContourPair& pair) {
    const double w = geom.width();
    const int n_up = pair.upper.size();
    const int n_lo = pair.lower.size();

    KernelMatrices km;
    km.k_mp.resize(n_lo, n_up);
    km.k_pm.resize(n_up, n_lo);

    // Source factors on the upper grid, regularized per the drift split:
    // e^{i w xi}(1 - i mu xi/q) phi^-/phi^{+,0}, never the raw phi^-/phi^+.
    std::vector<cplx> src_up(n_up), src_lo(n_lo);
    const cplx pref_up = pair.upper.zeta / (2.0 * kPi);
    const cplx pref_lo = pair.lower.zeta / (2.0 * kPi);
    for (int k = 0; k < n_up; ++k) {
        const cplx xi = pair.upper.points[k];
        src_up[k] = pref_up * pair.upper.derivs[k] * std::exp(kImag * w * xi) *
                    (1.0 - kImag * p.mu * xi / q) *
                    (factors.phi_minus_on_plus[k] / factors.phi_plus0_on_plus[k]);
    }
    for (int k = 0; k < n_lo; ++k) {
        const cplx xi = pair.lower.points[k];
        src_lo[k] = pref_lo * pair.lower.derivs[k] * std::exp(-kImag * w * xi) *
                    (factors.phi_plus_on_minus[k] / factors.phi_minus_on_minus[k]);
    }

    for (int j = 0; j < n_lo; ++j) {
        const cplx tgt = pair.lower.points[j];
        for (int k = 0; k < n_up; ++k) {
            const cplx gap = pair.upper.points[k] - tgt;
            if (std::abs(gap) < 1e-8)
                throw std::runtime_error("build_kernels: contour collision");
            km.k_mp(j, k) = src_up[k] / gap;
        }
    }
    for (int j = 0; j < n_up; ++j) {
        const cplx tgt = pair.upper.points[j];
        for (int k = 0; k < n_lo; ++k) {
            const cplx gap = pair.lower.points[k] - tgt;
            if (std::abs(gap) < 1e-8)
                throw std::runtime_error("build_kernels: contour collision");
            km.k_pm(j, k) = src_lo[k] / gap;
        }
    }
    return km;
}

DualState solve_series(const KernelMatrices& kernels, const DualState& state0,
                       int m0, double tol, SolveDiagnostics* diag) {
    if (m0 < 1) throw std::invalid_argument("solve_series: M0 must be >= 1");
    // U_j = (-1)^j W_j folds the alternating signs into the updates.
    Eigen::VectorXcd up = -state0.w_plus;
    Eigen::VectorXcd um = -state0.w_minus;
    DualState acc{up, um};
    SolveDiagnostics local;
    double inc = 0.0;
    for (int j = 1; j <= m0; ++j) {
        Eigen::VectorXcd up2 = -kImag * (kernels.k_mp * um);
        Eigen::VectorXcd um2 = kImag * (kernels.k_pm * up);
        acc.w_plus += up2;
        acc.w_minus += um2;
        inc = std::max(up2.cwiseAbs().maxCoeff(), um2.cwiseAbs().maxCoeff());
        local.increments.push_back(inc);
        local.terms = j;
        up = std::move(up2);
        um = std::move(um2);
        if (inc < tol) break;
    }
    local.last_increment = inc;
    if (local.terms == m0 && inc > 100.0 * tol)
        throw std::runtime_error("solve_series: series not converged");
    if (diag) *diag = local;
    return acc;
}

DualState solve_direct(const KernelMatrices& kernels, const DualState& state0,
                       DirectBlock block) {
    const Eigen::VectorXcd w2p = kImag * (kernels.k_mp * state0.w_minus);
    const Eigen::VectorXcd w2m = -kImag * (kernels.k_pm * state0.w_plus);
    const Eigen::VectorXcd rhs_p = w2p - state0.w_plus;
    const Eigen::VectorXcd rhs_m = w2m - state0.w_minus;

    const Eigen::MatrixXcd a_lo = kernels.k_mp * kernels.k_pm;  // lower->lower
    const Eigen::MatrixXcd a_up = kernels.k_pm * kernels.k_mp;  // upper->upper
    const Eigen::MatrixXcd id_lo =
        Eigen::MatrixXcd::Identity(a_lo.rows(), a_lo.cols());
    const Eigen::MatrixXcd id_up =
        Eigen::MatrixXcd::Identity(a_up.rows(), a_up.cols());

    DualState out;
    if (block == DirectBlock::Invert) {
        out.w_plus = (id_lo - a_lo).inverse() * rhs_p;
        out.w_minus = (id_up - a_up).inverse() * rhs_m;
    } else {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu_lo(id_lo - a_lo);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu_up(id_up - a_up);
        out.w_plus = lu_lo.solve(rhs_p);
        out.w_minus = lu_up.solve(rhs_m);
        const double res =
            ((id_lo - a_lo) * out.w_plus - rhs_p).cwiseAbs().maxCoeff();
        if (!std::isfinite(res) || res > 1e-6)
            throw std::runtime_error("solve_direct: singular system");
    }
    return out;
}

double composed_spectral_radius(const KernelMatrices& kernels, int iters) {
    const Eigen::MatrixXcd a = kernels.k_mp * kernels.k_pm;
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(a.rows());
    double rho = 0.0;
    for (int i = 0; i < iters; ++i) {
        Eigen::VectorXcd v2 = a * v;
        const double n2 = v2.norm();
        if (n2 == 0.0) return 0.0;
        rho = n2 / v.norm();
        v = v2 / n2;
    }
    return rho;
}

cplx evaluate_correction(const DualState& state, const FactorTables& factors,
                         const BarrierGeometry& geom, const ContourPair& pair,
                         double x) {
    if (!(x > geom.h_minus && x < geom.h_plus))
        throw std::invalid_argument("evaluate_correction: spot outside corridor");
    cplx v_plus{0.0, 0.0};
    for (int k = 0; k < pair.lower.size(); ++k) {
        const cplx xi = pair.lower.points[k];
        v_plus += state.w_plus[k] * std::exp(kImag * (x - geom.h_plus) * xi) *
                  factors.phi_plus_on_minus[k] * pair.lower.derivs[k];
    }
    v_plus *= pair.lower.zeta / (2.0 * kPi);
    cplx v_minus{0.0, 0.0};
    for (int k = 0; k < pair.upper.size(); ++k) {
        const cplx xi = pair.upper.points[k];
        v_minus += state.w_minus[k] * std::exp(kImag * (x - geom.h_minus) * xi) *
                   factors.phi_minus_on_plus[k] * pair.upper.derivs[k];
    }
    v_minus *= pair.upper.zeta / (2.0 * kPi);
    return v_plus + v_minus;
}

}  // namespace dblevy
