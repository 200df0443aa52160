#pragma once

#include <Eigen/Dense>

#include "trunc/bodies.hpp"
#include "trunc/rng.hpp"

namespace trunctest {

/// Raw moments of N(0,1) conditioned on [b, +inf).
struct TruncatedMoments {
    double b;
    double M1, M2, M3, M4;
};

/// M1 = 1/R(b), M2 = 1 + b/R(b), M3 = (2+b^2)/R(b), M4 = 3 + (b^3+3b)/R(b),
/// with R the Mills ratio. |b| <= 40.
TruncatedMoments truncated_moments(double b);

struct InfluenceEstimate {
    double value;
    double stderr_;
    std::size_t trials;
};

/// MC estimate of E[K(x)(1 - <v,x>^2)/sqrt(2)] under N(0,I_n).
InfluenceEstimate convex_influence(const ConvexBody& body, const Eigen::VectorXd& v,
                                   std::size_t trials, const RngStream& rng);

/// MC estimate of E[K(x)(n - ||x||^2)/sqrt(2)].
InfluenceEstimate total_convex_influence(const ConvexBody& body, std::size_t trials,
                                         const RngStream& rng);

/// Joint probe over one shared batch (common random numbers): indicator mean
/// (volume), total influence, and E[K(x) ||x||^2] with stderrs, for identity
/// tests relating n - sqrt(2) TInf/vol to E_{N|K}[||x||^2].
struct InfluenceIdentityProbe {
    InfluenceEstimate volume;
    InfluenceEstimate total_influence;
    InfluenceEstimate conditional_sqnorm;  // E[||x||^2 | x in K]
};
InfluenceIdentityProbe influence_identity_probe(const ConvexBody& body, std::size_t trials,
                                                const RngStream& rng);

}  // namespace trunctest
