#include "dblevy/mc.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "dblevy/parallel.hpp"

namespace dblevy {

namespace {

// One tempered power-law tail e^{-temper*x} x^{-nu-1} on (eps, inf), sampled
// through a tabulated inverse CDF on a log-spaced grid.
class TailSampler {
  public:
    TailSampler(double c, double nu, double temper, double eps) {
        const int n = 10000;
        const double x_max = eps + 80.0 / temper;
        grid_.resize(n);
        cdf_.resize(n);
        const double du = std::log(x_max / eps) / (n - 1);
        double acc = 0.0;
        double prev_x = eps;
        double prev_f = density(c, nu, temper, eps);
        grid_[0] = eps;
        cdf_[0] = 0.0;
        for (int i = 1; i < n; ++i) {
            const double xx = eps * std::exp(du * i);
            const double f = density(c, nu, temper, xx);
            acc += 0.5 * (prev_f + f) * (xx - prev_x);
            grid_[i] = xx;
            cdf_[i] = acc;
            prev_x = xx;
            prev_f = f;
        }
        intensity_ = acc;
        for (double& v : cdf_) v /= intensity_;
    }

    double intensity() const { return intensity_; }

    double sample(double u) const {
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.begin()) return grid_.front();
        if (it == cdf_.end()) return grid_.back();
        const std::size_t i = it - cdf_.begin();
        const double c0 = cdf_[i - 1], c1 = cdf_[i];
        const double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
        return grid_[i - 1] + w * (grid_[i] - grid_[i - 1]);
    }

  private:
    static double density(double c, double nu, double temper, double x) {
        return c * std::exp(-temper * x) * std::pow(x, -nu - 1.0);
    }
    std::vector<double> grid_, cdf_;
    double intensity_ = 0.0;
};

// int_0^eps x * e^{-temper*x} x^{-nu-1} dx via the substitution t = x^{1-nu},
// which makes the integrand bounded and smooth.
double small_jump_first_moment(double c, double nu, double temper, double eps) {
    const int n = 2000;
    const double t_max = std::pow(eps, 1.0 - nu);
    const double dt = t_max / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = dt * i;
        const double x = std::pow(t, 1.0 / (1.0 - nu));
        const double f = std::exp(-temper * x) / (1.0 - nu);
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    return c * acc * dt;
}

// int_0^eps x^2 * e^{-temper*x} x^{-nu-1} dx, same substitution.
double small_jump_second_moment(double c, double nu, double temper, double eps) {
    const int n = 2000;
    const double t_max = std::pow(eps, 1.0 - nu);
    const double dt = t_max / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = dt * i;
        const double x = std::pow(t, 1.0 / (1.0 - nu));
        const double f = x * std::exp(-temper * x) / (1.0 - nu);
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    return c * acc * dt;
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

McResult simulate_dnt(const KoBoLParams& p, const BarrierGeometry& geom,
                      double t, double x, double r, const McConfig& cfg) {
    if (!(cfg.eps > 0.0) || cfg.n_paths < 1 || cfg.n_steps < 1)
        throw std::invalid_argument("simulate_dnt: bad config");
    if (!(x > geom.h_minus && x < geom.h_plus))
        throw std::invalid_argument("simulate_dnt: spot outside corridor");

    // Instantaneous variance of the full jump part; guards the truncation.
    const double m2 =
        p.c * std::tgamma(2.0 - p.nu) *
        (std::pow(p.lambda_plus, p.nu - 2.0) + std::pow(-p.lambda_minus, p.nu - 2.0));
    const double sigma2_small =
        small_jump_second_moment(p.c, p.nu, -p.lambda_minus, cfg.eps) +
        small_jump_second_moment(p.c, p.nu, p.lambda_plus, cfg.eps);
    if (sigma2_small > 0.5 * m2)
        throw std::invalid_argument(
            "simulate_dnt: eps too large (truncated quadratic mass exceeds "
            "half the instantaneous variance)");

    // Positive jumps tempered by -lambda_minus, negative by lambda_plus.
    const TailSampler up(p.c, p.nu, -p.lambda_minus, cfg.eps);
    const TailSampler down(p.c, p.nu, p.lambda_plus, cfg.eps);
    const double lam_up = up.intensity();
    const double lam_total = lam_up + down.intensity();
    const double mean_small =
        small_jump_first_moment(p.c, p.nu, -p.lambda_minus, cfg.eps) -
        small_jump_first_moment(p.c, p.nu, p.lambda_plus, cfg.eps);

    const double dt = t / cfg.n_steps;
    const double drift_step = (p.mu + mean_small) * dt;
    const double lam_dt = lam_total * dt;
    const double p_up = lam_up / lam_total;

    std::atomic<long> survivors{0};
    const int chunks = std::min<long>(64, cfg.n_paths);
    const long per_chunk = (cfg.n_paths + chunks - 1) / chunks;
    parallel_for(chunks, [&](int chunk) {
        const long lo = chunk * per_chunk;
        const long hi = std::min<long>(lo + per_chunk, cfg.n_paths);
        long alive_count = 0;
        for (long path = lo; path < hi; ++path) {
            std::mt19937_64 rng(splitmix64(cfg.seed + 0x100000001ULL * path));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            std::poisson_distribution<int> poisson(lam_dt);
            double pos = x;
            bool alive = true;
            for (int step = 0; step < cfg.n_steps; ++step) {
                pos += drift_step;
                const int jumps = poisson(rng);
                for (int j = 0; j < jumps; ++j) {
                    const double side = unif(rng);
                    const double u = unif(rng);
                    pos += (side < p_up) ? up.sample(u) : -down.sample(u);
                }
                if (pos <= geom.h_minus || pos >= geom.h_plus) {
                    alive = false;
                    break;
                }
            }
            if (alive) ++alive_count;
        }
        survivors += alive_count;
    });

    McResult res;
    res.survivors = survivors.load();
    const double disc = std::exp(-r * t);
    const double frac = static_cast<double>(res.survivors) / cfg.n_paths;
    res.price = disc * frac;
    res.stderr_ = disc * std::sqrt(std::max(frac * (1.0 - frac), 0.0) /
                                   cfg.n_paths);
    res.jump_intensity = lam_total;
    res.small_jump_mean = mean_small;
    return res;
}

McComparison compare(double analytic_price, const McResult& mc) {
    McComparison c;
    c.gap = analytic_price - mc.price;
    c.gap_in_sigma = mc.stderr_ > 0.0 ? c.gap / mc.stderr_ : 0.0;
    c.flagged = std::abs(c.gap) > 3.0 * mc.stderr_ + 0.02;
    return c;
}

}  // namespace dblevy
