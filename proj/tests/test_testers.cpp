#include <doctest.h>

#include <cmath>

#include "trunc/errors.hpp"
#include "trunc/gauss.hpp"
#include "trunc/samplers.hpp"
#include "trunc/special.hpp"
#include "trunc/testers.hpp"

using namespace trunctest;

namespace {

Eigen::VectorXd axis(int n, int j) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[j] = 1.0;
    return v;
}

ConvexBody slab_of_volume(int n, double vol) {
    ConvexBody body;
    body.n = n;
    body.shape = Slab{axis(n, 0), inv_norm_cdf(0.5 + 0.5 * vol)};
    return body;
}

ConvexBody ball_of_volume(int n, double vol) {
    ConvexBody body;
    body.n = n;
    body.shape = Ball{std::sqrt(chi2_quantile(n, vol))};
    return body;
}

SampleBatch batch_from_rows(const Eigen::MatrixXd& rows) {
    SampleBatch b;
    b.data = rows;
    return b;
}

}  // namespace

TEST_SUITE_BEGIN("testers");

TEST_CASE("algorithm names round trip") {
    for (const Algorithm alg : {Algorithm::SymmConvex, Algorithm::Convex, Algorithm::Ltf}) {
        CHECK(algorithm_from_name(algorithm_name(alg)) == alg);
    }
    CHECK_THROWS_AS(algorithm_from_name("bogus"), InvalidArgument);
}

TEST_CASE("statistic_M on hand-built batches") {
    CHECK(statistic_M(batch_from_rows(Eigen::MatrixXd::Zero(7, 3))) == 0.0);
    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(4, 5);
    rows.col(0).setOnes();
    CHECK(statistic_M(batch_from_rows(rows)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(statistic_M(batch_from_rows(Eigen::MatrixXd(0, 3))), InvalidArgument);
}

TEST_CASE("auto sample sizes follow the two formulas") {
    TestConfig c(100, 0.5);
    CHECK(c.auto_samples(Algorithm::SymmConvex) == 3200);  // ceil(8 * 100 / 0.25)
    CHECK(c.auto_samples(Algorithm::Convex) == 3200);
    const double lg = std::log(2.0);
    const int ltf = static_cast<int>(std::ceil(8.0 * 10.0 / 0.25 + 8.0 * lg * lg / 0.0625));
    CHECK(c.auto_samples(Algorithm::Ltf) == ltf);
    CHECK(c.auto_samples(Algorithm::Ltf) < c.auto_samples(Algorithm::SymmConvex));
}

TEST_CASE("mean estimator is exact on constant batches and guards small T") {
    Eigen::MatrixXd rows(200, 4);
    Eigen::VectorXd target(4);
    target << 1.0, -2.0, 0.5, 3.0;
    rows.rowwise() = target.transpose();
    const Eigen::VectorXd m = mean_estimator(batch_from_rows(rows), 0.01);
    CHECK((m - target).norm() < 1e-9);

    CHECK_THROWS_AS(mean_estimator(batch_from_rows(Eigen::MatrixXd::Zero(10, 4)), 0.01),
                    TooFewSamples);
    CHECK_THROWS_AS(mean_estimator(batch_from_rows(rows), 1.5), InvalidArgument);
}

TEST_CASE("mean estimator recovers the halfspace shift") {
    const int n = 20;
    ConvexBody body;
    body.n = n;
    body.shape = Halfspace{axis(n, 0), 0.0};
    const SampleBatch batch = sample_truncated(body, 20000, RngStream(41, 0));
    const Eigen::VectorXd L = mean_estimator(batch, 0.01);
    CHECK(L[0] == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(0.03));
    CHECK(L.tail(n - 1).norm() < 0.1);
}

TEST_CASE("mean estimator stays small under the null") {
    int ok = 0;
    for (int rep = 0; rep < 30; ++rep) {
        const SampleBatch batch = gaussian_batch(50, 5000, RngStream(42, rep));
        if (mean_estimator(batch, 0.01).squaredNorm() <= 0.05) ++ok;
    }
    CHECK(ok >= 29);
}

TEST_CASE("ties at the M threshold resolve to untruncated") {
    TestConfig config(1, 0.5);
    config.c_sym = 3.0;  // threshold = 1 - 3*0.25 = 0.25, exactly representable
    Eigen::MatrixXd row(1, 1);
    row << 0.5;  // M = 0.25 exactly
    CHECK_FALSE(symm_convex_distinguisher(batch_from_rows(row), config).truncated);
    row << 0.49;
    CHECK(symm_convex_distinguisher(batch_from_rows(row), config).truncated);
}

TEST_CASE("symmetric distinguisher holds its type-I error on null data") {
    const TestConfig config(100, 0.5);
    const int trials = 100;
    int false_alarms = 0;
    for (int i = 0; i < trials; ++i) {
        const SampleBatch batch = gaussian_batch(100, 3200, RngStream(43, i));
        if (symm_convex_distinguisher(batch, config).truncated) ++false_alarms;
    }
    CHECK(false_alarms <= 15);
}

TEST_CASE("symmetric distinguisher detects a half-volume ball") {
    const TestConfig config(50, 0.5);
    int detected = 0;
    for (int i = 0; i < 30; ++i) {
        const SampleBatch batch =
            sample_truncated(ball_of_volume(50, 0.5), 1600, RngStream(44, i));
        if (symm_convex_distinguisher(batch, config).truncated) ++detected;
    }
    CHECK(detected >= 28);
}

TEST_CASE("convex distinguisher catches the mean-shifted halfspace via L") {
    const int n = 50;
    const TestConfig config(n, 0.5);
    ConvexBody body;
    body.n = n;
    body.shape = Halfspace{axis(n, 0), 0.0};
    const SampleBatch batch = sample_truncated(body, 1600, RngStream(45, 0));
    const TestReport r = convex_distinguisher(batch, config);
    CHECK(r.truncated);
    REQUIRE(r.statistic_L_normsq.has_value());
    CHECK(*r.statistic_L_normsq == doctest::Approx(2.0 / M_PI).epsilon(0.15));
    // M alone does not flag this body: the mean shift keeps ||x||^2 near n
    CHECK(r.statistic_M >= r.m_threshold);

    const SampleBatch null_batch = gaussian_batch(n, 1600, RngStream(45, 1));
    CHECK_FALSE(convex_distinguisher(null_batch, config).truncated);
}

TEST_CASE("ltf statistic follows its null law and halfspace mean law") {
    const int n = 100;
    const TestConfig config(n, 0.5);
    const int T = config.auto_samples(Algorithm::Ltf);
    const int trials = 400;

    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < trials; ++i) {
        const SampleBatch batch = gaussian_batch(n, T, RngStream(46, i));
        const TestReport r = ltf_distinguisher(batch, config);
        REQUIRE(r.statistic_N.has_value());
        sum += *r.statistic_N;
        sumsq += *r.statistic_N * *r.statistic_N;
    }
    const double mean = sum / trials;
    const double var = sumsq / trials - mean * mean;
    const double null_mean = static_cast<double>(n) / T;
    const double null_var = 2.0 * n / (static_cast<double>(T) * T);
    CHECK(std::fabs(mean - null_mean) < 4.0 * std::sqrt(null_var / trials));
    CHECK(var == doctest::Approx(null_var).epsilon(0.35));

    // halfspace through the origin: E[N] = n/T + 2/pi - (2/pi)/T
    ConvexBody body;
    body.n = n;
    body.shape = Halfspace{axis(n, 0), 0.0};
    double hsum = 0.0, hsumsq = 0.0;
    for (int i = 0; i < trials; ++i) {
        const SampleBatch batch = sample_truncated(body, T, RngStream(47, i));
        const double v = (batch.data.colwise().mean()).squaredNorm();
        hsum += v;
        hsumsq += v * v;
    }
    const double hmean = hsum / trials;
    const double hse = std::sqrt((hsumsq / trials - hmean * hmean) / trials);
    const double expected = null_mean + 2.0 / M_PI - (2.0 / M_PI) / T;
    CHECK(std::fabs(hmean - expected) < 4.0 * hse);
}

TEST_CASE("calibration matches the normal approximation of the null") {
    const int n = 100;
    const int T = 3200;
    const double eps = 0.5;
    const double c =
        calibrate_threshold(Algorithm::SymmConvex, n, eps, T, 0.1, 1000, RngStream(48, 0));
    const double z = inv_norm_cdf(0.9);
    const double expected = 2.0 * z * std::sqrt(2.0 * n / T) / eps;
    CHECK(c == doctest::Approx(expected).epsilon(0.12));

    const double c_median =
        calibrate_threshold(Algorithm::SymmConvex, n, eps, T, 0.5, 1000, RngStream(48, 1));
    CHECK(std::fabs(c_median) < 0.15);

    const double c_ltf =
        calibrate_threshold(Algorithm::Ltf, 50, eps, 500, 0.1, 2000, RngStream(48, 2));
    const double expected_ltf = z * std::sqrt(2.0 * 50.0) / (500.0 * eps * eps);
    CHECK(c_ltf == doctest::Approx(expected_ltf).epsilon(0.3));

    CHECK_THROWS_AS(
        calibrate_threshold(Algorithm::SymmConvex, n, eps, T, 0.1, 100, RngStream(48, 3)),
        InvalidArgument);
}

TEST_CASE("a threshold calibrated at n transfers to 2n with stable type-I") {
    const double eps = 0.5;
    const int T = 1600;
    const double c =
        calibrate_threshold(Algorithm::SymmConvex, 50, eps, T, 0.1, 1000, RngStream(49, 0));
    TestConfig config(100, eps, T);
    config.c_sym = c * std::sqrt(2.0);  // threshold gap scales like sqrt(n)
    int false_alarms = 0;
    const int trials = 400;
    for (int i = 0; i < trials; ++i) {
        const SampleBatch batch = gaussian_batch(100, T, RngStream(49, i + 1));
        if (symm_convex_distinguisher(batch, config).truncated) ++false_alarms;
    }
    CHECK(static_cast<double>(false_alarms) / trials <= 0.15);
}

TEST_CASE("detection power decreases with truncation volume") {
    const TestConfig config(30, 0.5, 3000);
    double prev = 1.1;
    int stream = 0;
    for (const double vol : {0.3, 0.5, 0.7, 0.9}) {
        const ConvexBody body = slab_of_volume(30, vol);
        int detected = 0;
        const int trials = 100;
        for (int i = 0; i < trials; ++i) {
            const SampleBatch batch = sample_truncated(body, 3000, RngStream(50, stream++));
            if (symm_convex_distinguisher(batch, config).truncated) ++detected;
        }
        const double rate = static_cast<double>(detected) / trials;
        CHECK(rate <= prev);
        prev = rate;
    }
    CHECK(prev < 0.9);  // the 0.9-volume slab is genuinely harder
}

TEST_CASE("squared-norm variance stays below 4n under convex truncation") {
    for (const int n : {10, 50}) {
        for (int which = 0; which < 2; ++which) {
            const ConvexBody body =
                which == 0 ? slab_of_volume(n, 0.5) : ball_of_volume(n, 0.5);
            const SampleBatch batch =
                sample_truncated(body, 20000, RngStream(51, 2 * n + which));
            const Eigen::VectorXd sq = batch.data.rowwise().squaredNorm();
            const double mean = sq.mean();
            const double var = sq.array().square().mean() - mean * mean;
            CHECK(var <= 4.0 * n);
        }
    }
}

TEST_CASE("directional variance stays below one plus noise") {
    const int n = 10;
    const int trials = 40000;
    RngStream dir_rng(52, 7);
    const Eigen::VectorXd v = unit_sphere(n, dir_rng);
    const SampleBatch batch =
        sample_truncated(slab_of_volume(n, 0.5), trials, RngStream(52, 0));
    const Eigen::VectorXd proj = batch.data * v;
    const double mean = proj.mean();
    const double var = proj.array().square().mean() - mean * mean;
    const double se = var * std::sqrt(2.0 / trials);
    CHECK(var <= 1.0 + 4.0 * se);
}

TEST_CASE("symmetric truncation at volume 1-eps drops the mean of ||x||^2") {
    const int n = 20;
    const double eps = 0.5;
    for (int which = 0; which < 2; ++which) {
        const ConvexBody body =
            which == 0 ? slab_of_volume(n, 1.0 - eps) : ball_of_volume(n, 1.0 - eps);
        const SampleBatch batch = sample_truncated(body, 20000, RngStream(53, which));
        // kappa = 0.5 is a conservative floor; the observed gaps are larger
        CHECK(statistic_M(batch) < n - 0.5 * eps);
    }
}

TEST_CASE("one-sided truncation keeps the directional second moment bounded") {
    // {x : x_1 <= 0.1}; E[x1^2] = Var + mu^2 <= 1 + mu^2 for halfline cuts
    const int n = 5;
    ConvexBody body;
    body.n = n;
    body.shape = Halfspace{-axis(n, 0), -0.1};
    const int trials = 40000;
    const SampleBatch batch = sample_truncated(body, trials, RngStream(54, 0));
    const double mu = batch.data.col(0).mean();
    const double second = batch.data.col(0).array().square().mean();
    const double se = std::sqrt(3.0 / trials);
    CHECK(second <= 1.0 + mu * mu + 4.0 * se);
}

TEST_CASE("reports flag underpowered sample sizes") {
    const TestConfig small(100, 0.5, 100);
    const SampleBatch batch = gaussian_batch(100, 100, RngStream(55, 0));
    CHECK(symm_convex_distinguisher(batch, small).truncated ==
          symm_convex_distinguisher(batch, small).truncated);
    CHECK(symm_convex_distinguisher(batch, small).underpowered);

    const TestConfig sized(100, 0.5, 3200);
    const SampleBatch full = gaussian_batch(100, 3200, RngStream(55, 1));
    CHECK_FALSE(symm_convex_distinguisher(full, sized).underpowered);
}

TEST_SUITE_END();
