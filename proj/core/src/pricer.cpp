#include "dblevy/pricer.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dblevy/parallel.hpp"

namespace dblevy {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0)
        .count();
}

PricingRequest mirrored(const PricingRequest& req) {
    PricingRequest m = req;
    m.model = mirror(req.model);
    m.h_minus = -req.h_plus;
    m.h_plus = -req.h_minus;
    for (double& x : m.spots) x = -x;
    return m;
}

ContourConfig contour_config(const Numerics& n) {
    ContourConfig cfg;
    cfg.b = n.b;
    cfg.omega = n.omega;
    cfg.omega1 = n.omega1;
    cfg.main_points = n.main_points;
    cfg.whf_points = n.whf_points;
    cfg.kappa = n.kappa;
    cfg.eps_trunc = n.eps_trunc;
    cfg.eps_whf = n.eps_whf;
    return cfg;
}

}  // namespace

std::vector<PricingResult> price_curve(const PricingRequest& req) {
    if (!(req.maturity > 0.0))
        throw std::invalid_argument("price_curve: maturity must be > 0");
    if (req.model.mu < 0.0) return price_curve(mirrored(req));
    if (req.h_minus != 0.0) {
        // The price depends only on x - h_minus and the corridor width;
        // canonicalizing here makes translated requests bit-identical.
        PricingRequest shifted = req;
        shifted.h_plus = req.h_plus - req.h_minus;
        shifted.h_minus = 0.0;
        for (double& x : shifted.spots) x -= req.h_minus;
        return price_curve(shifted);
    }
    validate(req.model);
    const auto t_start = clock_type::now();

    const BarrierGeometry geom(req.h_minus, req.h_plus);
    std::vector<PricingResult> results(req.spots.size());
    std::vector<int> live;
    double off_up = geom.width();
    double off_lo = geom.width();
    for (std::size_t i = 0; i < req.spots.size(); ++i) {
        const double x = req.spots[i];
        if (x <= geom.h_minus || x >= geom.h_plus) {
            results[i].knocked_out = true;  // price 0 without running the pipeline
            continue;
        }
        live.push_back(static_cast<int>(i));
        off_up = std::min(off_up, geom.h_plus - x);
        off_lo = std::min(off_lo, x - geom.h_minus);
    }
    if (live.empty()) return results;

    const ContourPair pair =
        make_contour_pair(req.model, off_up, off_lo, contour_config(req.numerics));

    GwrConfig gwr;
    gwr.m = req.numerics.gwr_m;
    gwr.r0 = req.numerics.r0;
    gwr.maturity = req.maturity;
    const auto nodes = gwr_nodes(gwr);
    const double q0 = req.rate + gwr.r0 + nodes.front();
    const AdmissibilityReport adm = check_admissibility(req.model, q0, pair);
    if (!adm.ok)
        throw std::runtime_error("price_curve: inadmissible contour: " +
                                 adm.violation);

    const int n_nodes = static_cast<int>(nodes.size());
    const int n_live = static_cast<int>(live.size());
    // samples[s][k] = Vtilde^1(q_k, x_s)
    std::vector<std::vector<cplx>> samples(n_live, std::vector<cplx>(n_nodes));
    std::vector<double> node_ms(n_nodes, 0.0);
    std::vector<double> node_residual(n_nodes, 0.0);
    std::vector<int> node_terms(n_nodes, 0);
    std::vector<double> node_increment(n_nodes, 0.0);
    std::vector<double> node_im(n_nodes, 0.0);

    const DualState w1 = seed(geom, pair);
    parallel_for(n_nodes, [&](int k) {
        const auto t0 = clock_type::now();
        const double q = req.rate + gwr.r0 + nodes[k];
        const FactorTables factors = compute_factors(req.model, q, pair);
        const KernelMatrices kernels =
            build_kernels(req.model, q, factors, geom, pair);
        DualState w;
        if (req.numerics.solver_block == 1) {
            SolveDiagnostics sd;
            w = solve_series(kernels, w1, req.numerics.m0,
                             req.numerics.series_tol, &sd);
            node_terms[k] = sd.terms;
            node_increment[k] = sd.last_increment;
        } else {
            w = solve_direct(kernels, w1,
                             req.numerics.solver_block == 2
                                 ? DirectBlock::Invert
                                 : DirectBlock::LinearSolve);
        }
        double im = 0.0;
        for (int s = 0; s < n_live; ++s) {
            const cplx corr =
                evaluate_correction(w, factors, geom, pair, req.spots[live[s]]);
            samples[s][k] = corr / q;
            im = std::max(im, std::abs(corr.imag()));
        }
        node_residual[k] = factors.identity_residual;
        node_im[k] = im;
        node_ms[k] = ms_since(t0);
    });

    double whf_max = 0.0, inc_max = 0.0, im_max = 0.0;
    int terms_max = 0;
    for (int k = 0; k < n_nodes; ++k) {
        whf_max = std::max(whf_max, node_residual[k]);
        inc_max = std::max(inc_max, node_increment[k]);
        im_max = std::max(im_max, node_im[k]);
        terms_max = std::max(terms_max, node_terms[k]);
    }

    for (int s = 0; s < n_live; ++s) {
        PricingResult& r = results[live[s]];
        GwrDiagnostics gd;
        const double v1 = gwr_invert(samples[s], gwr, &gd);
        r.price = std::exp(-req.rate * req.maturity) +
                  std::exp(gwr.r0 * req.maturity) * v1;
        r.im_residual = im_max;
        r.whf_residual = whf_max;
        r.series_terms = terms_max;
        r.last_increment = inc_max;
        r.gwr_max_imag = gd.max_imag;
        r.node_ms = node_ms;
        r.total_ms = ms_since(t_start);
    }
    return results;
}

PricingResult price(const PricingRequest& req) {
    if (req.spots.size() != 1)
        throw std::invalid_argument("price: expected exactly one spot");
    return price_curve(req).front();
}

SelfConsistencyReport self_consistency(const PricingRequest& req) {
    auto run = [&](double r0, int main_pts, int whf_pts, double omega,
                   double b) {
        PricingRequest r = req;
        r.numerics.r0 = r0;
        r.numerics.main_points = main_pts;
        r.numerics.whf_points = whf_pts;
        if (omega > 0.0) {
            r.numerics.omega = omega;
            r.numerics.b = b;
        }
        std::vector<double> out;
        for (const auto& pr : price_curve(r)) out.push_back(pr.price);
        return out;
    };

    SelfConsistencyReport rep;
    rep.base = run(0.0, kGridDefault.main_points, kGridDefault.whf_points, 0.0,
                   0.0);
    // Contour change: wider grids, different wing angle, same axis crossing.
    const double om0 = 0.22 * std::numbers::pi;
    const double b0 = 0.9 * std::sin(std::numbers::pi / 4.0) / std::sin(om0);
    rep.eps0 = run(0.0, kGridWide.main_points, kGridWide.whf_points, om0, b0);
    rep.eps1 = run(5.0, kGridDefault.main_points, kGridDefault.whf_points, 0.0,
                   0.0);
    rep.eps2 = run(0.0, kGridCoarse.main_points, kGridCoarse.whf_points, 0.0,
                   0.0);
    rep.eps3 = run(0.5, kGridCoarser.main_points, kGridCoarser.whf_points, 0.0,
                   0.0);
    rep.eps4 = run(-0.5, kGridCoarsest.main_points, kGridCoarsest.whf_points,
                   0.0, 0.0);

    for (std::size_t i = 0; i < rep.base.size(); ++i) {
        rep.max_eps0 = std::max(rep.max_eps0, std::abs(rep.eps0[i] - rep.base[i]));
        rep.max_r0_family =
            std::max({rep.max_r0_family, std::abs(rep.eps1[i] - rep.base[i]),
                      std::abs(rep.eps3[i] - rep.base[i]),
                      std::abs(rep.eps4[i] - rep.base[i])});
        rep.max_grid = std::max(rep.max_grid, std::abs(rep.eps2[i] - rep.base[i]));
    }
    return rep;
}

}  // namespace dblevy
