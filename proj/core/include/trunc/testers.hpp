#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "trunc/batch.hpp"
#include "trunc/rng.hpp"

namespace trunctest {

enum class Algorithm { SymmConvex, Convex, Ltf };

const char* algorithm_name(Algorithm alg);
Algorithm algorithm_from_name(const std::string& name);

struct TestConfig {
    int n = 1;
    double eps = 0.5;
    int T = 0;  // 0 = auto-size from (n, eps)
    double c_sym;
    double c_sample;
    double l_threshold;
    // Alg 3 threshold constant c in N >= n/T + c*eps^2; when unset it is set
    // from the normal approximation of the null law of N.
    std::optional<double> n_threshold_c;

    TestConfig();
    TestConfig(int n, double eps, int T = 0);

    /// ceil(C n / eps^2) for Algorithms 1-2, the sqrt(n) formula for 3.
    int auto_samples(Algorithm alg) const;
    int samples(Algorithm alg) const { return T > 0 ? T : auto_samples(alg); }
};

struct TestReport {
    bool truncated = false;
    double statistic_M = 0.0;
    std::optional<double> statistic_L_normsq;
    std::optional<double> statistic_N;
    double m_threshold = 0.0;
    std::optional<double> l_threshold;
    std::optional<double> n_threshold;
    int T = 0;
    int n = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    bool underpowered = false;

    const char* verdict() const { return truncated ? "truncated" : "untruncated"; }
};

/// (1/T) sum ||x_i||^2.
double statistic_M(const SampleBatch& batch);

/// Robust mean: geometric median of ceil(8 log(1/delta)) block means
/// (Weiszfeld iteration). Requires T >= 8 ceil(log(1/delta)).
Eigen::VectorXd mean_estimator(const SampleBatch& batch, double delta);

/// Algorithm 1: truncated iff M < n - c_sym*eps/2 (ties -> untruncated).
TestReport symm_convex_distinguisher(const SampleBatch& batch, const TestConfig& config);

/// Algorithm 2: Algorithm 1's M branch, or ||L||^2 >= l_threshold.
TestReport convex_distinguisher(const SampleBatch& batch, const TestConfig& config);

/// Algorithm 3: N = ||(1/T) sum x||^2, truncated iff N >= n/T + c*eps^2.
TestReport ltf_distinguisher(const SampleBatch& batch, const TestConfig& config);

/// Empirical null quantile of the relevant statistic, mapped back to the
/// constant's parametrization (c_sym for Algorithms 1-2, c for Algorithm 3).
double calibrate_threshold(Algorithm alg, int n, double eps, int T, double alpha0,
                           std::size_t trials, const RngStream& rng);

}  // namespace trunctest
