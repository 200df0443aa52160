#pragma once

#include <cstdint>
#include <vector>

#include "trunc/batch.hpp"
#include "trunc/bodies.hpp"
#include "trunc/linalg.hpp"
#include "trunc/rng.hpp"
#include "trunc/testers.hpp"

namespace trunctest {

struct WishartParams {
    int p = 1;
    int n = 1;  // degrees of freedom, n >= p
};

/// S = sum of n outer products g g^T, g ~ N(0, I_p).
PsdMatrix wishart_sample(const WishartParams& params, const RngStream& rng);

/// Log density of Wis(p,n) at A (PSD required).
double wishart_log_density(PsdMatrix& a, const WishartParams& params);

/// Log-ratio log(Psi_{p,n}(A) / Psi_{p,n-1}(A)) = logdet(A)/2 minus a
/// Gamma-ratio term; sum form for even p, log-Gamma difference otherwise.
double alpha_pn(PsdMatrix& a, int p, int n);

struct TvEstimate {
    double estimate;
    double stderr_;
    std::size_t draws;
};

/// MC average of (1 - e^{alpha_{p,n}(W)})_+ over W ~ Wis(p, n-1); this is the
/// TV distance between Wis(p,n) and Wis(p,n-1). Draw i always uses substream
/// i, so the result does not depend on the worker count.
TvEstimate estimate_tv_wishart(int p, int n, std::size_t draws, const RngStream& rng,
                               int workers = 1);

struct CltCheck {
    double mean;
    double stddev;
    double reference_std;  // sqrt(-2 log(1 - p/n))
};

/// Samples log(det W / ((n-1)(n-2)...(n-p))) over W ~ Wis(p,n) draws and
/// compares the spread against the limiting normal law.
CltCheck logdet_clt_check(int p, int n, std::size_t trials, const RngStream& rng);

/// Gram matrix of the batch rows (T x T).
PsdMatrix gram_matrix(const SampleBatch& batch);

/// (3/2) min{1, || eigenvalues of Sigma1^{-1} Sigma2 - I ||_2}; an upper bound
/// on TV(N(0,Sigma1), N(0,Sigma2)).
double gaussian_tv_bound(PsdMatrix& sigma1, const PsdMatrix& sigma2);

/// Squared Hellinger distance between N(0,I_n) and N(0,(1-delta)I_n):
/// 1 - (1-delta)^{n/4} / (1-delta/2)^{n/2}, evaluated in log space.
double hellinger_sq_gaussians(int n, double delta);

struct MixtureLbParams {
    int n;
    double delta;        // shrink: covariance (1-delta) I
    double delta_prime;  // 1 - delta = (1 + delta')^{-1}

    /// delta' = 20/n by default.
    static MixtureLbParams for_n(int n);
    static MixtureLbParams with_delta(int n, double delta);
};

/// The mixture construction: lambda(R) supported on [a_star, infinity), with
/// a_star solving the signed-mass balance so that the weights integrate to 1.
struct MixtureLbWeights {
    MixtureLbParams params;
    double a_star;
    double log_c;  // log of the constant in front of lambda

    /// Mixing weight (0 below a_star).
    double lambda(double R) const;
    /// Untruncated signed weight, negative below 1/delta'.
    double lambda_untruncated(double R) const;
};

MixtureLbWeights mixture_lb_weights(const MixtureLbParams& params);

/// log S(x) with S(x) = int lambda(R) q_R(x) dR, inner integral by
/// quadrature; log p(x) for the chi^2(n, (1+delta')^{-1}) target.
double mixture_lb_log_s(const MixtureLbWeights& w, double x);
double mixture_lb_log_p(const MixtureLbWeights& w, double x);

struct DensityCheck {
    double max_rel_discrepancy;  // sup |S - p| / p over the grid
    double tail_bound;           // Pr[chi^2(n, (1+delta')^{-1}) <= a_star]
};

DensityCheck mixture_lb_density_check(const MixtureLbWeights& w,
                                      const std::vector<double>& x_grid);

struct BirthdayResult {
    double distinct_frequency;
    double birthday_bound;  // 1 - N^2 / ((1-eps) M)
    double conditional_m_mean;
    double conditional_m_stderr;
    std::size_t distinct_trials;
};

/// Samples N points from a fresh random GridUnion truncation per trial and
/// reports how often all N land in distinct kept cells, plus the statistic M
/// of the distinct (conditioned) trials.
BirthdayResult grid_birthday_demo(int n, std::uint64_t cell_count, double eps, int sample_size,
                                  std::size_t trials, const RngStream& rng);

/// Frequency of m-tuples of N(0,I_n) draws violating the norm-window or
/// pairwise inner-product typicality conditions at constant c1.
double slab_lb_typicality_probe(int n, int m, double c1, std::size_t trials,
                                const RngStream& rng);

struct PowerResult {
    double power;
    double threshold_constant;  // MC-calibrated under the null
    std::size_t trials;
};

/// Detection rate of a distinguisher at sample budget T against the given
/// truncation, with the threshold calibrated under the null to type-I 0.1.
/// Trial i always uses substream i; workers changes wall time only.
PowerResult empirical_power_at_budget(const TruncationSpec& spec, Algorithm alg, int T,
                                      std::size_t trials, const RngStream& rng,
                                      int workers = 1);

}  // namespace trunctest
