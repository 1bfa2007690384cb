#include <benchmark/benchmark.h>

#include <cmath>

#include "dblevy/pricer.hpp"
#include "dblevy/regime.hpp"

using namespace dblevy;

namespace {
PricingRequest reference_curve() {
    PricingRequest req{*preset("MB"), std::log(0.95), std::log(1.05), {},
                       0.25,          0.01571,        Numerics{}};
    for (double s : {0.96, 0.98, 1.0, 1.02, 1.04})
        req.spots.push_back(std::log(s));
    return req;
}
}  // namespace

static void BM_FiveSpotCurve(benchmark::State& state) {
    const auto req = reference_curve();
    for (auto _ : state) benchmark::DoNotOptimize(price_curve(req));
}
BENCHMARK(BM_FiveSpotCurve)->Unit(benchmark::kMillisecond);

static void BM_SingleSpot(benchmark::State& state) {
    auto req = reference_curve();
    req.spots = {0.0};
    req.numerics.main_points = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(price(req));
}
BENCHMARK(BM_SingleSpot)->Arg(55)->Arg(108)->Arg(276)->Unit(benchmark::kMillisecond);

static void BM_FactorTables(benchmark::State& state) {
    const auto p = *preset("MB");
    const auto pair = make_contour_pair(p, 0.01, 0.01, ContourConfig{});
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_factors(p, 44.4, pair));
}
BENCHMARK(BM_FactorTables)->Unit(benchmark::kMillisecond);

static void BM_GwrInvert(benchmark::State& state) {
    GwrConfig cfg{8, 0.0, 0.25};
    std::vector<cplx> samples;
    for (double q : gwr_nodes(cfg)) samples.emplace_back(1.0 / (q + 3.0), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(gwr_invert(samples, cfg));
}
BENCHMARK(BM_GwrInvert);

static void BM_RegimeTwoState(benchmark::State& state) {
    const auto p = *preset("MB");
    RegimeModel m;
    m.states = {p, KoBoLParams(2.0 * p.c, p.nu, p.lambda_minus, p.lambda_plus,
                               p.mu)};
    m.rates = Eigen::MatrixXd::Zero(2, 2);
    m.rates(0, 1) = 0.5;
    m.rates(1, 0) = 0.5;
    m.r = {0.01571, 0.01571};
    m.payoff = {1.0, 1.0};
    const BarrierGeometry geom(std::log(0.95), std::log(1.05));
    RegimeNumerics num;
    for (auto _ : state)
        benchmark::DoNotOptimize(price_regime_dnt_all(m, geom, 0.25, 0.0, num));
}
BENCHMARK(BM_RegimeTwoState)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
