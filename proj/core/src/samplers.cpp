#include "trunc/samplers.hpp"

#include <cmath>
#include <limits>

#include "trunc/constants.hpp"
#include "trunc/errors.hpp"
#include "trunc/gauss.hpp"
#include "trunc/special.hpp"

namespace trunctest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Strategy pick_strategy(const ConvexBody& body) {
    if (std::holds_alternative<Halfspace>(body.shape) ||
        std::holds_alternative<Slab>(body.shape))
        return Strategy::ExactAxis;
    if (std::holds_alternative<Ball>(body.shape)) return Strategy::ExactRadial;
    if (std::holds_alternative<Hyperplane>(body.shape)) return Strategy::Subspace;
    return Strategy::Rejection;
}

void check_strategy(const ConvexBody& body, Strategy s) {
    const Strategy natural = pick_strategy(body);
    if (s == natural) return;
    // rejection works for anything with an indicator except hyperplanes
    if (s == Strategy::Rejection && natural != Strategy::Subspace) return;
    throw InvalidArgument(std::string("sampler strategy invalid for variant ") +
                          body.variant_name());
}

Eigen::VectorXd fill_gaussian(int n, RngStream& rng) {
    Eigen::VectorXd g(n);
    for (int j = 0; j < n; ++j) g[j] = rng.normal();
    return g;
}

Eigen::VectorXd sample_one(const ConvexBody& body, Strategy strategy,
                           std::size_t max_attempts, RngStream& rng) {
    switch (strategy) {
        case Strategy::ExactAxis: {
            const Eigen::VectorXd* v;
            double lo, hi;
            if (const auto* h = std::get_if<Halfspace>(&body.shape)) {
                v = &h->direction;
                lo = h->offset;
                hi = kInf;
            } else {
                const auto& s = std::get<Slab>(body.shape);
                v = &s.direction;
                lo = -s.half_width;
                hi = s.half_width;
            }
            const double t = truncated_normal_1d(lo, hi, rng);
            Eigen::VectorXd g = fill_gaussian(body.n, rng);
            g -= (v->dot(g) - t) * (*v);
            return g;
        }
        case Strategy::ExactRadial: {
            const auto& b = std::get<Ball>(body.shape);
            const Eigen::VectorXd u = unit_sphere(body.n, rng);
            const double mass = chi2_cdf(body.n, b.radius * b.radius);
            const double y = chi2_quantile(body.n, rng.uniform() * mass);
            return std::sqrt(y) * u;
        }
        case Strategy::Subspace: {
            const auto& p = std::get<Hyperplane>(body.shape);
            Eigen::VectorXd g = fill_gaussian(body.n, rng);
            g -= p.direction.dot(g) * p.direction;
            return g;
        }
        case Strategy::Rejection: {
            Eigen::VectorXd g(body.n);
            for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
                for (int j = 0; j < body.n; ++j) g[j] = rng.normal();
                if (contains(body, g)) return g;
            }
            throw RejectionExhausted(body.variant_name(), max_attempts);
        }
    }
    throw InvalidArgument("sample_one: unknown strategy");
}

}  // namespace

SamplerPlan SamplerPlan::automatic(TruncationSpec spec) {
    validate(spec);
    SamplerPlan plan{std::move(spec), {}, defaults().rejection_max_attempts};
    plan.strategies.reserve(plan.spec.components.size());
    for (const auto& c : plan.spec.components) plan.strategies.push_back(pick_strategy(c.body));
    return plan;
}

SampleBatch sample_truncated(const SamplerPlan& plan, int count, const RngStream& rng) {
    if (count < 1) throw InvalidArgument("sample_truncated: T must be >= 1");
    if (plan.strategies.size() != plan.spec.components.size())
        throw InvalidArgument("sample_truncated: plan strategy count mismatch");
    validate(plan.spec);
    for (std::size_t k = 0; k < plan.strategies.size(); ++k)
        check_strategy(plan.spec.components[k].body, plan.strategies[k]);

    const int n = plan.spec.dim();
    SampleBatch batch;
    batch.data.resize(count, n);
    batch.master_seed = rng.master_seed();
    batch.stream_index = rng.stream_index();
    const bool mixture = plan.spec.components.size() > 1;
    for (int i = 0; i < count; ++i) {
        RngStream row = rng.substream(static_cast<std::uint64_t>(i));
        std::size_t k = 0;
        if (mixture) {
            double u = row.uniform();
            for (; k + 1 < plan.spec.components.size(); ++k) {
                u -= plan.spec.components[k].weight;
                if (u < 0.0) break;
            }
        }
        batch.data.row(i) = sample_one(plan.spec.components[k].body, plan.strategies[k],
                                       plan.rejection_max_attempts, row);
    }
    return batch;
}

SampleBatch sample_truncated(const TruncationSpec& spec, int count, const RngStream& rng) {
    return sample_truncated(SamplerPlan::automatic(spec), count, rng);
}

SampleBatch sample_truncated(const ConvexBody& body, int count, const RngStream& rng) {
    return sample_truncated(TruncationSpec::single(body), count, rng);
}

double rejection_rate_probe(const ConvexBody& body, std::size_t trials, const RngStream& rng) {
    if (trials < 100) throw InvalidArgument("rejection_rate_probe: trials must be >= 100");
    validate(body);
    std::size_t hits = 0;
    Eigen::VectorXd x(body.n);
    for (std::size_t i = 0; i < trials; ++i) {
        RngStream local = rng.substream(i);
        for (int j = 0; j < body.n; ++j) x[j] = local.normal();
        if (contains(body, x)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

SampleBatch sample_ball_hyperplane(double R, int n, int count, const RngStream& rng,
                                   const std::optional<Eigen::VectorXd>& direction) {
    if (!(R > 0.0)) throw InvalidArgument("sample_ball_hyperplane: R must be positive");
    if (n < 2) throw InvalidArgument("sample_ball_hyperplane: n must be >= 2");
    if (count < 1) throw InvalidArgument("sample_ball_hyperplane: T must be >= 1");

    Eigen::VectorXd v;
    if (direction) {
        if (direction->size() != n)
            throw DimensionMismatch("sample_ball_hyperplane: direction size");
        if (std::fabs(direction->norm() - 1.0) > defaults().unit_norm_tol)
            throw InvalidArgument("sample_ball_hyperplane: direction must be unit-norm");
        v = *direction;
    } else {
        RngStream dir_rng = rng.substream(~std::uint64_t{0});
        v = unit_sphere(n, dir_rng);
    }

    const double mass = chi2_cdf(n - 1, R);
    SampleBatch batch;
    batch.data.resize(count, n);
    batch.master_seed = rng.master_seed();
    batch.stream_index = rng.stream_index();
    for (int i = 0; i < count; ++i) {
        RngStream row = rng.substream(static_cast<std::uint64_t>(i));
        Eigen::VectorXd g = fill_gaussian(n, row);
        g -= v.dot(g) * v;
        double norm = g.norm();
        while (norm == 0.0) {
            g = fill_gaussian(n, row);
            g -= v.dot(g) * v;
            norm = g.norm();
        }
        const double y = chi2_quantile(n - 1, row.uniform() * mass);
        batch.data.row(i) = (std::sqrt(y) / norm) * g;
    }
    return batch;
}

}  // namespace trunctest
