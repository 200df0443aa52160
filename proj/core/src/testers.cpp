#include "trunc/testers.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "trunc/constants.hpp"
#include "trunc/errors.hpp"
#include "trunc/gauss.hpp"
#include "trunc/special.hpp"

namespace trunctest {

namespace {

void check_config(const TestConfig& c) {
    if (c.n < 1) throw InvalidArgument("TestConfig: n must be >= 1");
    if (!(c.eps > 0.0 && c.eps < 1.0)) throw InvalidArgument("TestConfig: eps must be in (0,1)");
    if (c.T < 0) throw InvalidArgument("TestConfig: T must be >= 0");
}

double default_ltf_c(const TestConfig& c, int T) {
    // place the threshold at the normal-approximation (1-alpha) null quantile
    // of N: n/T + z * sqrt(2n)/T, i.e. c = z sqrt(2n) / (T eps^2)
    const double z = inv_norm_cdf(1.0 - defaults().calibration_alpha);
    return z * std::sqrt(2.0 * c.n) / (static_cast<double>(T) * c.eps * c.eps);
}

TestReport base_report(const SampleBatch& batch, const TestConfig& config, Algorithm alg) {
    TestReport r;
    r.n = static_cast<int>(batch.dim());
    r.T = static_cast<int>(batch.count());
    r.seed = batch.master_seed;
    r.stream = batch.stream_index;
    r.statistic_M = statistic_M(batch);
    r.m_threshold = config.n - config.c_sym * config.eps / 2.0;
    r.underpowered = r.T < config.auto_samples(alg);
    if (r.n != config.n) throw DimensionMismatch("tester: batch dim differs from config n");
    return r;
}

double empirical_quantile(std::vector<double>& values, double q) {
    std::sort(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(values.size() - 1));
    return values[idx];
}

}  // namespace

const char* algorithm_name(Algorithm alg) {
    switch (alg) {
        case Algorithm::SymmConvex: return "symm";
        case Algorithm::Convex: return "convex";
        case Algorithm::Ltf: return "ltf";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "symm") return Algorithm::SymmConvex;
    if (name == "convex") return Algorithm::Convex;
    if (name == "ltf") return Algorithm::Ltf;
    throw InvalidArgument("unknown algorithm: " + name);
}

TestConfig::TestConfig()
    : c_sym(defaults().c_sym),
      c_sample(defaults().c_sample),
      l_threshold(defaults().l_threshold) {}

TestConfig::TestConfig(int n_, double eps_, int T_) : TestConfig() {
    n = n_;
    eps = eps_;
    T = T_;
}

int TestConfig::auto_samples(Algorithm alg) const {
    check_config(*this);
    const double e2 = eps * eps;
    double t;
    if (alg == Algorithm::Ltf) {
        const double lg = std::log(1.0 / eps);
        t = c_sample * std::sqrt(static_cast<double>(n)) / e2 +
            c_sample * lg * lg / (e2 * e2);
    } else {
        t = c_sample * static_cast<double>(n) / e2;
    }
    return static_cast<int>(std::ceil(t));
}

double statistic_M(const SampleBatch& batch) {
    if (batch.count() < 1) throw InvalidArgument("statistic_M: empty batch");
    return batch.data.rowwise().squaredNorm().mean();
}

Eigen::VectorXd mean_estimator(const SampleBatch& batch, double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw InvalidArgument("mean_estimator: delta must be in (0,1)");
    const auto T = batch.count();
    const auto k = static_cast<Eigen::Index>(std::ceil(8.0 * std::log(1.0 / delta)));
    if (T < 8 * static_cast<Eigen::Index>(std::ceil(std::log(1.0 / delta))) || T < k)
        throw TooFewSamples("mean_estimator: need T >= 8 ceil(log(1/delta))");

    Eigen::MatrixXd blocks(k, batch.dim());
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index lo = j * T / k;
        const Eigen::Index hi = (j + 1) * T / k;
        blocks.row(j) = batch.data.middleRows(lo, hi - lo).colwise().mean();
    }

    // Weiszfeld iteration for the geometric median of the block means
    Eigen::VectorXd m = blocks.colwise().mean();
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::VectorXd num = Eigen::VectorXd::Zero(batch.dim());
        double denom = 0.0;
        bool at_point = false;
        for (Eigen::Index j = 0; j < k; ++j) {
            const double d = (blocks.row(j).transpose() - m).norm();
            if (d < 1e-14) {
                at_point = true;
                continue;
            }
            num += blocks.row(j).transpose() / d;
            denom += 1.0 / d;
        }
        if (denom == 0.0) break;  // all block means coincide with m
        Eigen::VectorXd next = num / denom;
        if (at_point && (next - m).norm() < 1e-14) break;
        const double step = (next - m).norm();
        m = next;
        if (step < 1e-10) break;
    }
    return m;
}

TestReport symm_convex_distinguisher(const SampleBatch& batch, const TestConfig& config) {
    check_config(config);
    TestReport r = base_report(batch, config, Algorithm::SymmConvex);
    r.truncated = r.statistic_M < r.m_threshold;
    return r;
}

TestReport convex_distinguisher(const SampleBatch& batch, const TestConfig& config) {
    check_config(config);
    TestReport r = base_report(batch, config, Algorithm::Convex);
    const Eigen::VectorXd L = mean_estimator(batch, defaults().mean_estimator_delta);
    r.statistic_L_normsq = L.squaredNorm();
    r.l_threshold = config.l_threshold;
    r.truncated = r.statistic_M < r.m_threshold || *r.statistic_L_normsq >= config.l_threshold;
    return r;
}

TestReport ltf_distinguisher(const SampleBatch& batch, const TestConfig& config) {
    check_config(config);
    TestReport r = base_report(batch, config, Algorithm::Ltf);
    const auto T = static_cast<double>(batch.count());
    r.statistic_N = (batch.data.colwise().mean()).squaredNorm();
    const double c = config.n_threshold_c ? *config.n_threshold_c
                                          : default_ltf_c(config, static_cast<int>(T));
    r.n_threshold = config.n / T + c * config.eps * config.eps;
    r.truncated = *r.statistic_N >= *r.n_threshold;
    return r;
}

double calibrate_threshold(Algorithm alg, int n, double eps, int T, double alpha0,
                           std::size_t trials, const RngStream& rng) {
    if (trials < 500) throw InvalidArgument("calibrate_threshold: trials must be >= 500");
    if (!(alpha0 > 0.0 && alpha0 < 1.0))
        throw InvalidArgument("calibrate_threshold: alpha0 must be in (0,1)");
    if (T < 1) throw InvalidArgument("calibrate_threshold: T must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("calibrate_threshold: eps in (0,1)");

    std::vector<double> stats(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        const SampleBatch batch = gaussian_batch(n, T, rng.substream(i));
        if (alg == Algorithm::Ltf) {
            stats[i] = (batch.data.colwise().mean()).squaredNorm();
        } else {
            stats[i] = statistic_M(batch);
        }
    }
    if (alg == Algorithm::Ltf) {
        // reject above: threshold at the upper (1-alpha0) quantile of N
        const double q = empirical_quantile(stats, 1.0 - alpha0);
        return (q - static_cast<double>(n) / T) / (eps * eps);
    }
    // reject below: threshold at the lower alpha0 quantile of M
    const double q = empirical_quantile(stats, alpha0);
    return 2.0 * (n - q) / eps;
}

}  // namespace trunctest
