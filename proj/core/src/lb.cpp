#include "trunc/lb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trunc/constants.hpp"
#include "trunc/errors.hpp"
#include "trunc/gauss.hpp"
#include "trunc/parallel.hpp"
#include "trunc/quad.hpp"
#include "trunc/samplers.hpp"
#include "trunc/special.hpp"

namespace trunctest {

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct MeanAcc {
    double sum = 0.0;
    double sumsq = 0.0;
    std::size_t count = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++count;
    }
    double mean() const { return sum / static_cast<double>(count); }
    double stddev() const {
        const auto t = static_cast<double>(count);
        if (count < 2) return 0.0;
        return std::sqrt(std::max(0.0, (sumsq - sum * sum / t) / (t - 1.0)));
    }
    double stderr_() const { return stddev() / std::sqrt(static_cast<double>(count)); }
};

void check_wishart(const WishartParams& p) {
    if (p.p < 1 || p.n < p.p) throw InvalidArgument("wishart: need 1 <= p <= n");
}

}  // namespace

PsdMatrix wishart_sample(const WishartParams& params, const RngStream& rng) {
    check_wishart(params);
    RngStream local = rng;
    Eigen::MatrixXd g(params.p, params.n);
    for (int j = 0; j < params.n; ++j)
        for (int i = 0; i < params.p; ++i) g(i, j) = local.normal();
    PsdMatrix s;
    s.entries.noalias() = g * g.transpose();
    return s;
}

double wishart_log_density(PsdMatrix& a, const WishartParams& params) {
    check_wishart(params);
    const int p = params.p;
    const int n = params.n;
    if (a.size() != p) throw DimensionMismatch("wishart_log_density: matrix size");
    const CholResult ch = chol_logdet(a);  // throws NotPositiveDefinite
    double log_gamma_terms = 0.0;
    for (int i = 1; i <= p; ++i) log_gamma_terms += std::lgamma(0.5 * (n + 1 - i));
    return 0.5 * (n - p - 1) * ch.logdet - 0.5 * a.entries.trace() -
           0.5 * n * p * kLn2 - 0.25 * p * (p - 1) * std::log(M_PI) - log_gamma_terms;
}

double alpha_pn(PsdMatrix& a, int p, int n) {
    if (p < 1 || n <= p) throw InvalidArgument("alpha_pn: need 1 <= p < n");
    if (a.size() != p) throw DimensionMismatch("alpha_pn: matrix size");
    const CholResult ch = chol_logdet(a);
    if (p % 2 == 0) {
        double sum = 0.0;
        for (int i = 1; i <= p / 2; ++i)
            sum += std::log(static_cast<double>(n - p + 2 * (i - 1)));
        return 0.5 * ch.logdet - sum;
    }
    return 0.5 * ch.logdet - 0.5 * p * kLn2 - std::lgamma(0.5 * n) +
           std::lgamma(0.5 * (n - p));
}

TvEstimate estimate_tv_wishart(int p, int n, std::size_t draws, const RngStream& rng,
                               int workers) {
    if (draws < 1000) throw InvalidArgument("estimate_tv_wishart: draws must be >= 1000");
    if (p < 1 || p > n - 1) throw InvalidArgument("estimate_tv_wishart: need 1 <= p <= n-1");
    const WishartParams null_params{p, n - 1};
    std::vector<double> vals(draws);
    parallel_for(draws, workers, [&](std::size_t i) {
        PsdMatrix w = wishart_sample(null_params, rng.substream(i));
        vals[i] = std::max(0.0, -std::expm1(alpha_pn(w, p, n)));
    });
    MeanAcc acc;
    for (const double v : vals) acc.add(v);
    return TvEstimate{acc.mean(), acc.stderr_(), draws};
}

CltCheck logdet_clt_check(int p, int n, std::size_t trials, const RngStream& rng) {
    if (p < 1 || p >= n) throw InvalidArgument("logdet_clt_check: need p/n in (0,1)");
    if (trials < 2) throw InvalidArgument("logdet_clt_check: trials must be >= 2");
    double log_ref = 0.0;
    for (int i = 1; i <= p; ++i) log_ref += std::log(static_cast<double>(n - i));
    MeanAcc acc;
    const WishartParams params{p, n};
    for (std::size_t i = 0; i < trials; ++i) {
        PsdMatrix w = wishart_sample(params, rng.substream(i));
        acc.add(chol_logdet(w).logdet - log_ref);
    }
    const double y = static_cast<double>(p) / n;
    return CltCheck{acc.mean(), acc.stddev(), std::sqrt(-2.0 * std::log1p(-y))};
}

PsdMatrix gram_matrix(const SampleBatch& batch) {
    PsdMatrix g;
    g.entries.noalias() = batch.data * batch.data.transpose();
    return g;
}

double gaussian_tv_bound(PsdMatrix& sigma1, const PsdMatrix& sigma2) {
    if (sigma1.size() != sigma2.size()) throw DimensionMismatch("gaussian_tv_bound: sizes");
    const CholResult c1 = chol_logdet(sigma1);
    chol_logdet(sigma2.entries);  // PD check only
    // similar to Sigma1^{-1} Sigma2 but symmetric: L^{-1} Sigma2 L^{-T}
    Eigen::MatrixXd b = c1.factor.triangularView<Eigen::Lower>().solve(sigma2.entries);
    b = c1.factor.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(b.transpose()));
    b.diagonal().array() -= 1.0;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
    const double norm = es.eigenvalues().norm();
    return 1.5 * std::min(1.0, norm);
}

double hellinger_sq_gaussians(int n, double delta) {
    if (n < 1) throw InvalidArgument("hellinger_sq_gaussians: n must be >= 1");
    if (!(delta >= 0.0 && delta < 1.0))
        throw InvalidArgument("hellinger_sq_gaussians: delta must be in [0,1)");
    return -std::expm1(0.25 * n * std::log1p(-delta) - 0.5 * n * std::log1p(-0.5 * delta));
}

MixtureLbParams MixtureLbParams::for_n(int n) {
    if (n < 20) throw InvalidArgument("MixtureLbParams: n must be >= 20");
    MixtureLbParams p;
    p.n = n;
    p.delta_prime = 20.0 / n;
    p.delta = p.delta_prime / (1.0 + p.delta_prime);
    return p;
}

MixtureLbParams MixtureLbParams::with_delta(int n, double delta) {
    if (n < 20) throw InvalidArgument("MixtureLbParams: n must be >= 20");
    if (!(delta > 0.0 && delta < 1.0))
        throw InvalidArgument("MixtureLbParams: delta must be in (0,1)");
    MixtureLbParams p;
    p.n = n;
    p.delta = delta;
    p.delta_prime = delta / (1.0 - delta);
    return p;
}

namespace {

// Signed cumulative mass of the un-truncated lambda compared in log space:
// G(a) = F_p(a) - c sqrt(a) e^{-d'a/2} psi(a); returns log F_p - log(term),
// positive iff G(a) > 0. Both pieces live deep in the chi^2 left tail near
// the root, hence the log forms.
double balance_log_gap(const MixtureLbParams& p, double log_c, double a) {
    const double log_fp = log_gamma_p(0.5 * p.n, 0.5 * (1.0 + p.delta_prime) * a);
    const double log_term = log_c + 0.5 * std::log(a) - 0.5 * p.delta_prime * a +
                            log_gamma_p(0.5 * (p.n - 1), 0.5 * a);
    return log_fp - log_term;
}

}  // namespace

double MixtureLbWeights::lambda_untruncated(double R) const {
    if (!(R > 0.0)) return 0.0;
    const double dp = params.delta_prime;
    const double lin = dp * R - 1.0;
    if (lin == 0.0) return 0.0;
    const double log_mag = log_c - 0.5 * dp * R + std::log(std::fabs(lin)) -
                           std::log(2.0 * std::sqrt(R)) +
                           log_gamma_p(0.5 * (params.n - 1), 0.5 * R);
    return std::copysign(std::exp(log_mag), lin);
}

double MixtureLbWeights::lambda(double R) const {
    return R < a_star ? 0.0 : lambda_untruncated(R);
}

MixtureLbWeights mixture_lb_weights(const MixtureLbParams& params) {
    if (params.n < 20) throw InvalidArgument("mixture_lb_weights: n must be >= 20");
    if (std::fabs(params.delta_prime - params.delta / (1.0 - params.delta)) >
        1e-14 * std::max(1.0, params.delta_prime))
        throw InvalidArgument("mixture_lb_weights: delta/delta' mismatch");

    MixtureLbWeights w;
    w.params = params;
    const double n = params.n;
    const double dp = params.delta_prime;
    w.log_c = std::lgamma(0.5 * (n - 1.0)) - std::lgamma(0.5 * n) - 0.5 * kLn2 +
              0.5 * n * std::log1p(dp);

    // a* solves the signed-mass balance; by parts the cumulative integral of
    // the un-truncated lambda collapses to a closed form, so bisection needs
    // no quadrature.
    double lo = 1.0 / dp;
    double hi = 50.0 * n;
    if (!(balance_log_gap(params, w.log_c, lo * (1.0 + 1e-12)) < 0.0 &&
          balance_log_gap(params, w.log_c, hi) > 0.0))
        throw RootNotBracketed("mixture_lb_weights: balance has no root in (1/delta', 50n]");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (balance_log_gap(params, w.log_c, mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * hi) break;
    }
    w.a_star = 0.5 * (lo + hi);
    return w;
}

double mixture_lb_log_s(const MixtureLbWeights& w, double x) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    const double dp = w.params.delta_prime;
    const double a = std::max(w.a_star, x);
    // inner integral of lambda/psi over [a, inf), exponential factored out so
    // the quadrature works at O(1) scale
    const double j = integrate_upper(
        [&](double r) {
            return std::exp(-0.5 * dp * (r - a)) * (dp * r - 1.0) / (2.0 * std::sqrt(r));
        },
        a, defaults().quad_rel_tol);
    return chi2_logpdf(w.params.n - 1, x) + w.log_c - 0.5 * dp * a + std::log(j);
}

double mixture_lb_log_p(const MixtureLbWeights& w, double x) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    const double n = w.params.n;
    const double dp = w.params.delta_prime;
    return 0.5 * n * std::log1p(dp) + (0.5 * n - 1.0) * std::log(x) -
           0.5 * (1.0 + dp) * x - 0.5 * n * kLn2 - std::lgamma(0.5 * n);
}

DensityCheck mixture_lb_density_check(const MixtureLbWeights& w,
                                      const std::vector<double>& x_grid) {
    if (x_grid.empty()) throw InvalidArgument("mixture_lb_density_check: empty grid");
    double worst = 0.0;
    for (const double x : x_grid) {
        if (x < w.a_star) continue;  // S < p below a*, only the match region counts
        const double rel = std::fabs(std::expm1(mixture_lb_log_s(w, x) -
                                                mixture_lb_log_p(w, x)));
        worst = std::max(worst, rel);
    }
    const double tail = std::exp(
        log_gamma_p(0.5 * w.params.n, 0.5 * (1.0 + w.params.delta_prime) * w.a_star));
    return DensityCheck{worst, tail};
}

BirthdayResult grid_birthday_demo(int n, std::uint64_t cell_count, double eps, int sample_size,
                                  std::size_t trials, const RngStream& rng) {
    if (sample_size < 1) throw InvalidArgument("grid_birthday_demo: N must be >= 1");
    if (trials < 1) throw InvalidArgument("grid_birthday_demo: trials must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("grid_birthday_demo: eps in (0,1)");
    const double keep = 1.0 - eps;
    const double kept_mass = keep * static_cast<double>(cell_count);
    if (static_cast<double>(sample_size) * sample_size > kept_mass)
        throw InvalidArgument("grid_birthday_demo: need N^2 <= (1-eps) M");

    std::size_t distinct = 0;
    MeanAcc cond;
    std::vector<std::uint64_t> ids(sample_size);
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream local = rng.substream(t);
        const ConvexBody body = grid_union_random(n, cell_count, keep, local);
        const SampleBatch batch = sample_truncated(body, sample_size, local);
        const auto& grid = std::get<GridUnion>(body.shape);
        for (int i = 0; i < sample_size; ++i)
            ids[i] = grid_cell_index(grid, n, batch.data.row(i).transpose());
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) == ids.end()) {
            ++distinct;
            cond.add(statistic_M(batch));
        }
    }
    BirthdayResult r;
    r.distinct_frequency = static_cast<double>(distinct) / static_cast<double>(trials);
    r.birthday_bound = 1.0 - static_cast<double>(sample_size) * sample_size / kept_mass;
    r.conditional_m_mean = cond.count > 0 ? cond.mean() : 0.0;
    r.conditional_m_stderr = cond.count > 0 ? cond.stderr_() : 0.0;
    r.distinct_trials = distinct;
    return r;
}

double slab_lb_typicality_probe(int n, int m, double c1, std::size_t trials,
                                const RngStream& rng) {
    if (n < 2 || m < 1 || m > n) throw InvalidArgument("typicality_probe: need 1 <= m <= n");
    if (trials < 1) throw InvalidArgument("typicality_probe: trials must be >= 1");
    if (c1 < 0.0) throw InvalidArgument("typicality_probe: c1 must be >= 0");
    const double tol = c1 * std::sqrt(std::log(static_cast<double>(n)) / n);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    std::size_t atypical = 0;
    Eigen::MatrixXd g(m, n);
    for (std::size_t t = 0; t < trials; ++t) {
        RngStream local = rng.substream(t);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = local.normal();
        bool bad = false;
        for (int i = 0; i < m && !bad; ++i)
            bad = std::fabs(g.row(i).norm() / sqrt_n - 1.0) > tol;
        for (int i = 0; i < m && !bad; ++i)
            for (int j = i + 1; j < m && !bad; ++j)
                bad = std::fabs(g.row(i).dot(g.row(j))) / n > tol;
        if (bad) ++atypical;
    }
    return static_cast<double>(atypical) / static_cast<double>(trials);
}

PowerResult empirical_power_at_budget(const TruncationSpec& spec, Algorithm alg, int T,
                                      std::size_t trials, const RngStream& rng, int workers) {
    if (trials < 100) throw InvalidArgument("empirical_power_at_budget: trials >= 100");
    if (T < 1) throw InvalidArgument("empirical_power_at_budget: T must be >= 1");
    validate(spec);
    const int n = spec.dim();
    const double eps = 0.5;  // only fixes the constant's parametrization

    // thresholds come from the null at the same budget, so power is measured
    // against a fixed type-I error rather than the default constants
    const RngStream calib_rng = rng.substream(0x8000000000000000ull);
    const double c = calibrate_threshold(alg, n, eps, T, defaults().calibration_alpha, 500,
                                         calib_rng);
    TestConfig config(n, eps, T);
    if (alg == Algorithm::Ltf)
        config.n_threshold_c = c;
    else
        config.c_sym = c;

    const SamplerPlan plan = SamplerPlan::automatic(spec);
    std::vector<unsigned char> verdicts(trials, 0);
    parallel_for(trials, workers, [&](std::size_t i) {
        const SampleBatch batch = sample_truncated(plan, T, rng.substream(i));
        TestReport r;
        switch (alg) {
            case Algorithm::SymmConvex: r = symm_convex_distinguisher(batch, config); break;
            case Algorithm::Convex: r = convex_distinguisher(batch, config); break;
            case Algorithm::Ltf: r = ltf_distinguisher(batch, config); break;
        }
        verdicts[i] = r.truncated ? 1 : 0;
    });
    std::size_t detected = 0;
    for (const unsigned char v : verdicts) detected += v;
    return PowerResult{static_cast<double>(detected) / static_cast<double>(trials), c, trials};
}

}  // namespace trunctest
