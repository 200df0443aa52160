#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "trunc/batch.hpp"
#include "trunc/bodies.hpp"
#include "trunc/rng.hpp"

namespace trunctest {

enum class Strategy {
    ExactAxis,    // halfspace/slab: free Gaussian plus one truncated coordinate
    ExactRadial,  // ball: uniform direction times truncated radial law
    Subspace,     // hyperplane: project a Gaussian onto v-perp
    Rejection,    // draw-and-check with an attempt cap
};

/// Per-component strategy selection for a truncation spec. `automatic` picks
/// the exact construction where one exists and falls back to rejection.
struct SamplerPlan {
    TruncationSpec spec;
    std::vector<Strategy> strategies;
    std::size_t rejection_max_attempts;

    static SamplerPlan automatic(TruncationSpec spec);
};

/// T i.i.d. rows from the mixture sum_i w_i N(0,I_n)|_{K_i}. Row i draws
/// everything (component choice included) from substream i, so output is
/// independent of row execution order.
SampleBatch sample_truncated(const SamplerPlan& plan, int count, const RngStream& rng);
SampleBatch sample_truncated(const TruncationSpec& spec, int count, const RngStream& rng);
SampleBatch sample_truncated(const ConvexBody& body, int count, const RngStream& rng);

/// Acceptance fraction of plain Gaussian draws against the body; agrees with
/// mc_volume in distribution.
double rejection_rate_probe(const ConvexBody& body, std::size_t trials, const RngStream& rng);

/// Samples u * sqrt(y) with u uniform on the unit sphere of v-perp and
/// y ~ chi^2(n-1) truncated to [0, R]. A random hyperplane direction is drawn
/// when none is supplied.
SampleBatch sample_ball_hyperplane(double R, int n, int count, const RngStream& rng,
                                   const std::optional<Eigen::VectorXd>& direction = {});

}  // namespace trunctest
