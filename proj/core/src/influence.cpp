#include "trunc/influence.hpp"

#include <cmath>
#include <vector>

#include "trunc/constants.hpp"
#include "trunc/errors.hpp"
#include "trunc/special.hpp"

namespace trunctest {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct MeanAcc {
    double sum = 0.0;
    double sumsq = 0.0;
    std::size_t count = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++count;
    }
    InfluenceEstimate finish() const {
        const auto t = static_cast<double>(count);
        const double mean = sum / t;
        const double var = count > 1 ? (sumsq - sum * sum / t) / (t - 1.0) : 0.0;
        return InfluenceEstimate{mean, std::sqrt(std::max(var, 0.0) / t), count};
    }
};

template <typename Fn>
InfluenceEstimate mc_mean(const ConvexBody& body, std::size_t trials, const RngStream& rng,
                          Fn&& integrand) {
    if (trials < 1000) throw InvalidArgument("influence: trials must be >= 1000");
    validate(body);
    constexpr std::size_t kChunk = 1024;
    MeanAcc acc;
    Eigen::VectorXd x(body.n);
    for (std::size_t base = 0, chunk = 0; base < trials; base += kChunk, ++chunk) {
        RngStream local = rng.substream(chunk);
        const std::size_t end = std::min(base + kChunk, trials);
        for (std::size_t i = base; i < end; ++i) {
            for (int j = 0; j < body.n; ++j) x[j] = local.normal();
            acc.add(integrand(x));
        }
    }
    return acc.finish();
}

}  // namespace

TruncatedMoments truncated_moments(double b) {
    if (!(std::fabs(b) <= 40.0)) throw InvalidArgument("truncated_moments: |b| must be <= 40");
    const double r = mills_ratio(b);
    TruncatedMoments m;
    m.b = b;
    m.M1 = 1.0 / r;
    m.M2 = 1.0 + b / r;
    m.M3 = (2.0 + b * b) / r;
    m.M4 = 3.0 + (b * b * b + 3.0 * b) / r;
    return m;
}

InfluenceEstimate convex_influence(const ConvexBody& body, const Eigen::VectorXd& v,
                                   std::size_t trials, const RngStream& rng) {
    if (v.size() != body.n) throw DimensionMismatch("convex_influence: direction size");
    if (std::fabs(v.norm() - 1.0) > defaults().unit_norm_tol)
        throw InvalidArgument("convex_influence: direction must be unit-norm");
    return mc_mean(body, trials, rng, [&](const Eigen::VectorXd& x) {
        if (!contains(body, x)) return 0.0;
        const double t = v.dot(x);
        return (1.0 - t * t) / kSqrt2;
    });
}

InfluenceEstimate total_convex_influence(const ConvexBody& body, std::size_t trials,
                                         const RngStream& rng) {
    const double n = body.n;
    return mc_mean(body, trials, rng, [&](const Eigen::VectorXd& x) {
        if (!contains(body, x)) return 0.0;
        return (n - x.squaredNorm()) / kSqrt2;
    });
}

InfluenceIdentityProbe influence_identity_probe(const ConvexBody& body, std::size_t trials,
                                                const RngStream& rng) {
    if (trials < 1000) throw InvalidArgument("influence: trials must be >= 1000");
    validate(body);
    constexpr std::size_t kChunk = 1024;
    MeanAcc vol, tinf, cond;
    const double n = body.n;
    Eigen::VectorXd x(body.n);
    for (std::size_t base = 0, chunk = 0; base < trials; base += kChunk, ++chunk) {
        RngStream local = rng.substream(chunk);
        const std::size_t end = std::min(base + kChunk, trials);
        for (std::size_t i = base; i < end; ++i) {
            for (int j = 0; j < body.n; ++j) x[j] = local.normal();
            const bool in = contains(body, x);
            const double sq = x.squaredNorm();
            vol.add(in ? 1.0 : 0.0);
            tinf.add(in ? (n - sq) / kSqrt2 : 0.0);
            if (in) cond.add(sq);
        }
    }
    if (cond.count == 0) throw TooFewSamples("influence_identity_probe: no point landed in K");
    return InfluenceIdentityProbe{vol.finish(), tinf.finish(), cond.finish()};
}

}  // namespace trunctest
