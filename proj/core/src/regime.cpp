#include "dblevy/regime.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "dblevy/parallel.hpp"

namespace dblevy {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kImag{0.0, 1.0};

Eigen::MatrixXcd cauchy(const DeformedGrid& src, const DeformedGrid& tgt) {
    Eigen::MatrixXcd k(tgt.size(), src.size());
    for (int j = 0; j < tgt.size(); ++j)
        for (int i = 0; i < src.size(); ++i) {
            const cplx gap = src.points[i] - tgt.points[j];
            if (std::abs(gap) < 1e-8)
                throw std::runtime_error("regime: contour collision");
            k(j, i) = 1.0 / gap;
        }
    return k;
}

Eigen::VectorXcd to_vec(const std::vector<cplx>& v) {
    return Eigen::Map<const Eigen::VectorXcd>(v.data(), v.size());
}

double sup(const WaveField& f) {
    double m = 0.0;
    for (const auto& s : f)
        for (const auto& v : s)
            if (v.size()) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
}

struct NodeContext {
    const RegimeModel& model;
    const SpiralGrids& grids;
    const RegimeKernels& kernels;
    const BarrierGeometry& geom;
    std::vector<StateFactorTables> tables;
    Eigen::VectorXd v0;
};

// Analytic s=1 barrier terms: the constant-seed restriction is known in
// closed form, w = +-i phi^{+-} V0_j / xi.
WaveField seed_barrier_plus(const NodeContext& c) {
    const int m = c.model.size();
    WaveField out(m);
    for (int j = 0; j < m; ++j) {
        out[j][0] = -kImag * c.v0[j] *
                    c.tables[j].phi_plus[0].cwiseQuotient(
                        to_vec(c.grids.lower1.points));
        out[j][1] = -kImag * c.v0[j] *
                    c.tables[j].phi_plus[1].cwiseQuotient(
                        to_vec(c.grids.lower2.points));
    }
    return out;
}

WaveField seed_barrier_minus(const NodeContext& c) {
    const int m = c.model.size();
    WaveField out(m);
    for (int j = 0; j < m; ++j) {
        out[j][0] = kImag * c.v0[j] *
                    c.tables[j].phi_minus[2].cwiseQuotient(
                        to_vec(c.grids.upper1.points));
        out[j][1] = kImag * c.v0[j] *
                    c.tables[j].phi_minus[3].cwiseQuotient(
                        to_vec(c.grids.upper2.points));
    }
    return out;
}

// s >= 2 barrier terms: integrate the prior minus state over U1 (plus side)
// or the prior plus state over L1 (minus side).
WaveField barrier_plus(const NodeContext& c, const WaveField& minus_prev) {
    const int m = c.model.size();
    const double w = c.geom.width();
    const DeformedGrid& u1 = c.grids.upper1;
    WaveField out(m);
    for (int j = 0; j < m; ++j) {
        const double mu = c.model.states[j].mu;
        const double q = c.tables[j].big_q;
        Eigen::VectorXcd fac(u1.size());
        for (int k = 0; k < u1.size(); ++k) {
            const cplx xi = u1.points[k];
            fac[k] = std::exp(kImag * w * xi) * (1.0 - kImag * mu * xi / q) /
                     c.tables[j].phi_plus0[2][k] * minus_prev[j][0][k] *
                     u1.derivs[k];
        }
        const cplx pref = u1.zeta / (2.0 * kPi * kImag);
        out[j][0] = -c.tables[j].phi_plus[0].cwiseProduct(
            (pref * (c.kernels.u1_to_l1 * fac)).eval());
        out[j][1] = -c.tables[j].phi_plus[1].cwiseProduct(
            (pref * (c.kernels.u1_to_l2 * fac)).eval());
    }
    return out;
}

WaveField barrier_minus(const NodeContext& c, const WaveField& plus_prev) {
    const int m = c.model.size();
    const double w = c.geom.width();
    const DeformedGrid& l1 = c.grids.lower1;
    WaveField out(m);
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXcd fac(l1.size());
        for (int k = 0; k < l1.size(); ++k) {
            const cplx xi = l1.points[k];
            fac[k] = std::exp(-kImag * w * xi) / c.tables[j].phi_minus[0][k] *
                     plus_prev[j][0][k] * l1.derivs[k];
        }
        const cplx pref = l1.zeta / (2.0 * kPi * kImag);
        out[j][0] = c.tables[j].phi_minus[2].cwiseProduct(
            (pref * (c.kernels.l1_to_u1 * fac)).eval());
        out[j][1] = c.tables[j].phi_minus[3].cwiseProduct(
            (pref * (c.kernels.l1_to_u2 * fac)).eval());
    }
    return out;
}

WaveField zero_field(int m, int n) {
    WaveField f(m);
    for (auto& s : f) {
        s[0] = Eigen::VectorXcd::Zero(n);
        s[1] = Eigen::VectorXcd::Zero(n);
    }
    return f;
}
}  // namespace

double RegimeModel::total_rate(int j) const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k)
        if (k != j) s += rates(j, k);
    return s;
}

void validate_regime(const RegimeModel& model) {
    const int m = model.size();
    if (m < 1) throw std::invalid_argument("regime: need at least one state");
    if (model.rates.rows() != m || model.rates.cols() != m)
        throw std::invalid_argument("regime: rate matrix must be m x m");
    if (static_cast<int>(model.r.size()) != m ||
        static_cast<int>(model.payoff.size()) != m)
        throw std::invalid_argument("regime: r and payoff must have m entries");
    for (int j = 0; j < m; ++j) {
        if (!(model.r[j] >= 0.0))
            throw std::invalid_argument("regime: rates r_j must be >= 0");
        if (!(model.payoff[j] > 0.0))
            throw std::invalid_argument("regime: payoffs G_j must be > 0");
        for (int k = 0; k < m; ++k)
            if (k != j && !(model.rates(j, k) >= 0.0))
                throw std::invalid_argument(
                    "regime: switching rates must be >= 0");
    }
    int pos = 0, neg = 0;
    for (const auto& s : model.states) (s.mu > 0.0 ? pos : neg)++;
    if (pos && neg)
        throw std::domain_error(
            "regime: mixed drift signs are out of scope for this contour "
            "configuration");
    for (const auto& s : model.states) validate(s.mu > 0.0 ? s : mirror(s));
}

SpiralGrids make_spiral_grids(const RegimeModel& model,
                              const BarrierGeometry& geom, double x,
                              const RegimeNumerics& num) {
    const double om1 = num.angle1 > 0.0 ? num.angle1 : kPi / 6.0;
    const double om2 = num.angle2 > 0.0 ? num.angle2 : kPi / 3.0;
    double lam_min = std::numeric_limits<double>::infinity();
    double nu_max = 0.0;
    for (const auto& s : model.states) {
        lam_min = std::min({lam_min, s.lambda_plus, -s.lambda_minus});
        nu_max = std::max(nu_max, s.nu);
    }
    const double scale = std::min(1.0, 0.35 * lam_min / num.crossing2);
    const double a1 = num.crossing1 * scale;
    const double a2 = num.crossing2 * scale;
    const double b1 = a1 / std::sin(om1);
    const double b2 = a2 / std::sin(om2);
    const double bf = 1.1 * b2;

    // Coupling integrands decay like exp(-2|y|); the evaluation factors decay
    // double-exponentially with the spot-to-barrier offsets.
    const double off = std::min(geom.h_plus - x, x - geom.h_minus);
    double lam_main = num.lambda_main;
    if (off > 0.0) {
        const double rule =
            std::log(std::log(1.0 / num.eps_eval) / (off * a1 * num.kappa));
        lam_main = std::max(lam_main, rule);
    }
    const double zc = lam_main / num.n_main;
    const double lam_fine = std::log(1.0 / num.eps_fine) / (2.0 - nu_max);
    const double zf = lam_fine / num.n_fine;

    SpiralGrids g;
    g.lower1 = build_grid(build_contour(0.0, b1, -om1), zc, num.n_main);
    g.lower2 = build_grid(build_contour(0.0, b2, -om2), zc, num.n_main);
    g.upper1 = build_grid(build_contour(0.0, b1, om1), zc, num.n_main);
    g.upper2 = build_grid(build_contour(0.0, b2, om2), zc, num.n_main);
    g.fine_lo = build_grid(build_contour(0.0, bf, -om2), zf, num.n_fine);
    g.fine_hi = build_grid(build_contour(0.0, bf, om2), zf, num.n_fine);
    return g;
}

RegimeKernels make_regime_kernels(const SpiralGrids& g) {
    RegimeKernels k;
    k.l2_to_l1 = cauchy(g.lower2, g.lower1);
    k.l1_to_l2 = cauchy(g.lower1, g.lower2);
    k.u2_to_u1 = cauchy(g.upper2, g.upper1);
    k.u1_to_u2 = cauchy(g.upper1, g.upper2);
    k.u1_to_l1 = cauchy(g.upper1, g.lower1);
    k.u1_to_l2 = cauchy(g.upper1, g.lower2);
    k.l1_to_u1 = cauchy(g.lower1, g.upper1);
    k.l1_to_u2 = cauchy(g.lower1, g.upper2);
    return k;
}

StateFactorTables compute_state_factors(const KoBoLParams& p, double big_q,
                                        const SpiralGrids& grids) {
    StateFactorTables t;
    t.big_q = big_q;
    const std::array<const DeformedGrid*, 4> contours{
        &grids.lower1, &grids.lower2, &grids.upper1, &grids.upper2};
    for (int c = 0; c < 4; ++c) {
        const auto& pts = contours[c]->points;
        const int n = contours[c]->size();
        Eigen::VectorXcd p0(n), pm(n);
        if (c >= 2) {
            // Upper targets: direct phi^{+,0}, cross-fill phi^-.
            const auto direct =
                phi_plus0_direct(p, big_q, pts, grids.fine_lo);
            for (int k = 0; k < n; ++k) {
                const cplx phi_c =
                    1.0 + psi0(p, pts[k]) / (big_q - kImag * p.mu * pts[k]);
                p0[k] = direct[k];
                pm[k] = 1.0 / (phi_c * direct[k]);
            }
        } else {
            // Lower targets: direct phi^-, cross-fill phi^{+,0}.
            const auto direct = phi_minus_direct(p, big_q, pts, grids.fine_hi);
            for (int k = 0; k < n; ++k) {
                const cplx phi_c =
                    1.0 + psi0(p, pts[k]) / (big_q - kImag * p.mu * pts[k]);
                pm[k] = direct[k];
                p0[k] = 1.0 / (phi_c * direct[k]);
            }
        }
        Eigen::VectorXcd pp(n);
        for (int k = 0; k < n; ++k)
            pp[k] = big_q / (big_q - kImag * p.mu * pts[k]) * p0[k];
        t.phi_plus0[c] = std::move(p0);
        t.phi_plus[c] = std::move(pp);
        t.phi_minus[c] = std::move(pm);
    }
    t.resolvent_l2.resize(grids.lower2.size());
    for (int k = 0; k < grids.lower2.size(); ++k)
        t.resolvent_l2[k] = 1.0 / (big_q + psi(p, grids.lower2.points[k]));
    t.resolvent_u2.resize(grids.upper2.size());
    for (int k = 0; k < grids.upper2.size(); ++k)
        t.resolvent_u2[k] = 1.0 / (big_q + psi(p, grids.upper2.points[k]));
    return t;
}

Eigen::VectorXd solve_v0(const RegimeModel& model, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("solve_v0: q must be > 0");
    const int m = model.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd g(m);
    for (int j = 0; j < m; ++j) {
        a(j, j) = q + model.total_rate(j) + model.r[j];
        for (int k = 0; k < m; ++k)
            if (k != j) a(j, k) = -model.rates(j, k);
        g[j] = model.payoff[j];
    }
    const Eigen::VectorXd v0 = a.partialPivLu().solve(g);
    if ((a * v0 - g).cwiseAbs().maxCoeff() > 1e-10 * g.cwiseAbs().maxCoeff())
        throw std::runtime_error("solve_v0: singular system");
    return v0;
}

WaveField inner_step_plus(const RegimeModel& model,
                          const std::vector<StateFactorTables>& tables,
                          const RegimeKernels& kernels, const SpiralGrids& grids,
                          const WaveField& barrier, const WaveField& prev) {
    const int m = model.size();
    const int n = grids.lower1.size();
    WaveField out(m);
    const cplx pref = grids.lower1.zeta / (2.0 * kPi * kImag);
    const Eigen::VectorXcd der_l1 = to_vec(grids.lower1.derivs);
    const Eigen::VectorXcd der_l2 = to_vec(grids.lower2.derivs);
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXcd g1 = Eigen::VectorXcd::Zero(n);
        Eigen::VectorXcd g2 = Eigen::VectorXcd::Zero(n);
        for (int k = 0; k < m; ++k) {
            if (k == j) continue;
            g1 += model.rates(j, k) * prev[k][0];
            g2 += model.rates(j, k) * prev[k][1];
        }
        const double q = tables[j].big_q;
        const Eigen::VectorXcd fac2 =
            tables[j].phi_minus[1].cwiseProduct(g2).cwiseProduct(der_l2);
        const Eigen::VectorXcd c1 =
            (tables[j].phi_plus[0] / q).cwiseProduct(
                (pref * (kernels.l2_to_l1 * fac2)).eval());
        const Eigen::VectorXcd fac1 =
            tables[j].phi_minus[0].cwiseProduct(g1).cwiseProduct(der_l1);
        const Eigen::VectorXcd c2 =
            (tables[j].phi_plus[1] / q).cwiseProduct(
                (pref * (kernels.l1_to_l2 * fac1)).eval()) +
            tables[j].resolvent_l2.cwiseProduct(g2);
        out[j][0] = barrier[j][0] + c1;
        out[j][1] = barrier[j][1] + c2;
    }
    return out;
}

WaveField inner_step_minus(const RegimeModel& model,
                           const std::vector<StateFactorTables>& tables,
                           const RegimeKernels& kernels, const SpiralGrids& grids,
                           const WaveField& barrier, const WaveField& prev) {
    const int m = model.size();
    const int n = grids.upper1.size();
    WaveField out(m);
    const cplx pref = grids.upper1.zeta / (2.0 * kPi * kImag);
    const Eigen::VectorXcd der_u1 = to_vec(grids.upper1.derivs);
    const Eigen::VectorXcd der_u2 = to_vec(grids.upper2.derivs);
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXcd g1 = Eigen::VectorXcd::Zero(n);
        Eigen::VectorXcd g2 = Eigen::VectorXcd::Zero(n);
        for (int k = 0; k < m; ++k) {
            if (k == j) continue;
            g1 += model.rates(j, k) * prev[k][0];
            g2 += model.rates(j, k) * prev[k][1];
        }
        const double q = tables[j].big_q;
        const Eigen::VectorXcd fac2 =
            tables[j].phi_plus[3].cwiseProduct(g2).cwiseProduct(der_u2);
        const Eigen::VectorXcd c1 =
            -(tables[j].phi_minus[2] / q).cwiseProduct(
                (pref * (kernels.u2_to_u1 * fac2)).eval());
        const Eigen::VectorXcd fac1 =
            tables[j].phi_plus[2].cwiseProduct(g1).cwiseProduct(der_u1);
        const Eigen::VectorXcd c2 =
            -(tables[j].phi_minus[3] / q).cwiseProduct(
                (pref * (kernels.u1_to_u2 * fac1)).eval()) +
            tables[j].resolvent_u2.cwiseProduct(g2);
        out[j][0] = barrier[j][0] + c1;
        out[j][1] = barrier[j][1] + c2;
    }
    return out;
}

std::vector<double> price_regime_dnt_all(const RegimeModel& model,
                                         const BarrierGeometry& geom, double t,
                                         double x, const RegimeNumerics& num,
                                         RegimeDiagnostics* diag) {
    validate_regime(model);
    if (!(t > 0.0))
        throw std::invalid_argument("price_regime_dnt: maturity must be > 0");
    const int m = model.size();
    if (!model.states.empty() && model.states.front().mu < 0.0) {
        RegimeModel mir = model;
        for (auto& s : mir.states) s = mirror(s);
        return price_regime_dnt_all(mir, BarrierGeometry(-geom.h_plus, -geom.h_minus),
                                    t, -x, num, diag);
    }
    if (!(x > geom.h_minus && x < geom.h_plus))
        return std::vector<double>(m, 0.0);

    const SpiralGrids grids = make_spiral_grids(model, geom, x, num);
    const RegimeKernels kernels = make_regime_kernels(grids);

    GwrConfig gwr;
    gwr.m = num.gwr_m;
    gwr.r0 = num.r0;
    gwr.maturity = t;
    const auto nodes = gwr_nodes(gwr);
    const int n_nodes = static_cast<int>(nodes.size());

    // Admissibility of every contour for the smallest per-state spectral value.
    for (int j = 0; j < m; ++j) {
        const double q0 =
            num.r0 + nodes.front() + model.total_rate(j) + model.r[j];
        const auto& p = model.states[j];
        for (const DeformedGrid* g :
             {&grids.lower1, &grids.lower2, &grids.upper1, &grids.upper2,
              &grids.fine_lo, &grids.fine_hi}) {
            const double cross = g->contour.crossing();
            if (!(q0 + psi(p, cplx(0.0, cross)).real() > 0.0) ||
                !(q0 + std::min(cross, 0.0) * p.mu > 0.0))
                throw std::runtime_error(
                    "regime: inadmissible contour for state " + std::to_string(j));
        }
        for (const DeformedGrid* g : {&grids.fine_lo, &grids.fine_hi})
            for (const cplx& eta : g->points) {
                const cplx w = 1.0 + psi(p, eta) / q0;
                if (w.real() <= 0.0 &&
                    std::abs(w.imag()) <= 1e-12 * (1.0 - w.real()))
                    throw std::runtime_error(
                        "regime: admissibility condition (3) violated");
            }
    }

    Eigen::MatrixXcd v1(m, n_nodes);
    std::vector<RegimeDiagnostics> node_diag(n_nodes);
    parallel_for(n_nodes, [&](int k) {
        const double q = num.r0 + nodes[k];
        NodeContext ctx{model, grids, kernels, geom, {}, solve_v0(model, q)};
        ctx.tables.reserve(m);
        for (int j = 0; j < m; ++j)
            ctx.tables.push_back(compute_state_factors(
                model.states[j], q + model.total_rate(j) + model.r[j], grids));

        const int n = grids.lower1.size();
        WaveField plus_tot = zero_field(m, n);
        WaveField minus_tot = zero_field(m, n);
        WaveField plus_prev, minus_prev;
        RegimeDiagnostics nd;
        double outer_scale = 1.0;
        for (int s = 1; s <= num.outer_max; ++s) {
            const WaveField bp = (s == 1) ? seed_barrier_plus(ctx)
                                          : barrier_plus(ctx, minus_prev);
            const WaveField bm = (s == 1) ? seed_barrier_minus(ctx)
                                          : barrier_minus(ctx, plus_prev);
            WaveField wp = zero_field(m, n);
            WaveField wm = zero_field(m, n);
            double scale = std::max(sup(bp), sup(bm));
            int l = 0;
            double inc = 0.0;
            std::vector<double> increments;
            for (l = 1; l <= num.inner_max; ++l) {
                WaveField wp2 = inner_step_plus(model, ctx.tables, kernels,
                                                grids, bp, wp);
                WaveField wm2 = inner_step_minus(model, ctx.tables, kernels,
                                                 grids, bm, wm);
                inc = 0.0;
                for (int j = 0; j < m; ++j)
                    for (int c = 0; c < 2; ++c) {
                        inc = std::max(
                            inc, (wp2[j][c] - wp[j][c]).cwiseAbs().maxCoeff());
                        inc = std::max(
                            inc, (wm2[j][c] - wm[j][c]).cwiseAbs().maxCoeff());
                    }
                increments.push_back(inc);
                wp = std::move(wp2);
                wm = std::move(wm2);
                if (m == 1 || inc < num.inner_tol * std::max(1.0, scale)) break;
            }
            if (m > 1 && l > num.inner_max && !increments.empty()) {
                const std::size_t win = std::min<std::size_t>(5, increments.size());
                bool decreasing = false;
                for (std::size_t i = increments.size() - win;
                     i + 1 < increments.size(); ++i)
                    if (increments[i + 1] < increments[i]) decreasing = true;
                if (!decreasing)
                    throw std::runtime_error(
                        "regime: inner iteration not converging");
            }
            nd.inner_iters_max = std::max(nd.inner_iters_max, l);
            if (s == 1) nd.inner_increments = increments;
            const double sgn = (s % 2 == 0) ? 1.0 : -1.0;
            for (int j = 0; j < m; ++j)
                for (int c = 0; c < 2; ++c) {
                    plus_tot[j][c] += sgn * wp[j][c];
                    minus_tot[j][c] += sgn * wm[j][c];
                }
            plus_prev = std::move(wp);
            minus_prev = std::move(wm);
            nd.outer_terms = s;
            nd.last_outer_term = std::max(sup(plus_prev), sup(minus_prev));
            if (s == 1) outer_scale = std::max(1.0, nd.last_outer_term);
            if (nd.last_outer_term < num.outer_tol * outer_scale) break;
        }
        // Evaluate on the first contour of each half-plane.
        for (int j = 0; j < m; ++j) {
            cplx acc{0.0, 0.0};
            for (int i = 0; i < grids.lower1.size(); ++i)
                acc += plus_tot[j][0][i] *
                       std::exp(kImag * (x - geom.h_plus) *
                                grids.lower1.points[i]) *
                       grids.lower1.derivs[i];
            cplx v = grids.lower1.zeta / (2.0 * kPi) * acc;
            acc = cplx{0.0, 0.0};
            for (int i = 0; i < grids.upper1.size(); ++i)
                acc += minus_tot[j][0][i] *
                       std::exp(kImag * (x - geom.h_minus) *
                                grids.upper1.points[i]) *
                       grids.upper1.derivs[i];
            v += grids.upper1.zeta / (2.0 * kPi) * acc;
            v1(j, k) = v;
        }
        node_diag[k] = std::move(nd);
    });

    // Barrier-free part: matrix exponential of the rate generator less
    // discounting, applied to the payoff vector.
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd g(m);
    for (int j = 0; j < m; ++j) {
        gen(j, j) = -model.total_rate(j) - model.r[j];
        for (int k = 0; k < m; ++k)
            if (k != j) gen(j, k) = model.rates(j, k);
        g[j] = model.payoff[j];
    }
    const Eigen::VectorXd v0t = (t * gen).exp() * g;

    std::vector<double> prices(m);
    for (int j = 0; j < m; ++j) {
        std::vector<cplx> samples(n_nodes);
        for (int k = 0; k < n_nodes; ++k) samples[k] = v1(j, k);
        const double corr = gwr_invert(samples, gwr);
        prices[j] = v0t[j] + std::exp(num.r0 * t) * corr;
    }
    if (diag) *diag = node_diag.front();
    return prices;
}

double price_regime_dnt(const RegimeModel& model, const BarrierGeometry& geom,
                        double t, double x, int initial_state,
                        const RegimeNumerics& num, RegimeDiagnostics* diag) {
    if (initial_state < 0 || initial_state >= model.size())
        throw std::invalid_argument("price_regime_dnt: bad initial state");
    return price_regime_dnt_all(model, geom, t, x, num, diag)[initial_state];
}

}  // namespace dblevy
