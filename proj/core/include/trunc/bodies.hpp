#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trunc/rng.hpp"

namespace trunctest {

struct ConvexBody;

/// {x : v.x >= b}
struct Halfspace {
    Eigen::VectorXd direction;
    double offset = 0.0;
};

/// {x : |v.x| <= r}
struct Slab {
    Eigen::VectorXd direction;
    double half_width = 1.0;
};

/// {x : ||x|| <= r}, origin-centered
struct Ball {
    double radius = 1.0;
};

/// {x : v.x = 0}; membership uses a small tolerance, exact sampling never
/// relies on the predicate.
struct Hyperplane {
    Eigen::VectorXd direction;
};

struct Intersection {
    std::vector<ConvexBody> members;
};

/// Union of equal-Gaussian-volume quantile boxes: each axis is split into
/// `cells_per_axis` intervals of equal N(0,1) mass, and `kept` lists the
/// retained cell ids (sorted). Total cell count M = cells_per_axis^n, every
/// cell has Gaussian volume exactly 1/M.
struct GridUnion {
    std::uint64_t cells_per_axis = 1;
    std::vector<std::uint64_t> kept;
};

struct ConvexBody {
    int n = 1;
    std::variant<Halfspace, Slab, Ball, Hyperplane, Intersection, GridUnion> shape;

    const char* variant_name() const;
};

/// Weighted mixture of truncation bodies; weights sum to 1.
struct TruncationSpec {
    struct Component {
        double weight;
        ConvexBody body;
    };
    std::vector<Component> components;

    int dim() const { return components.front().body.n; }
    static TruncationSpec single(ConvexBody body);
};

void validate(const ConvexBody& body);
void validate(const TruncationSpec& spec);

bool contains(const ConvexBody& body, const Eigen::VectorXd& x);

/// Closed-form Gaussian volume where one exists (absent for general
/// intersections).
std::optional<double> exact_volume(const ConvexBody& body);

struct McEstimate {
    double estimate;
    double stderr_;
    std::size_t trials;
};

/// Monte Carlo Gaussian volume with binomial standard error.
McEstimate mc_volume(const ConvexBody& body, std::size_t trials, const RngStream& rng);

/// Random grid union keeping floor(keep_fraction * M) cells; M must be a
/// perfect n-th power so the grid factors per coordinate.
ConvexBody grid_union_random(int n, std::uint64_t cell_count, double keep_fraction,
                             RngStream& rng);

/// Cell id of a point in the quantile grid of a GridUnion body.
std::uint64_t grid_cell_index(const GridUnion& grid, int n, const Eigen::VectorXd& x);

/// Structurally symmetric under x -> -x.
bool is_symmetric(const ConvexBody& body);

// JSON serialization (schema: {"variant": ..., "n": ..., parameters...}).
std::string to_json(const ConvexBody& body);
std::string to_json(const TruncationSpec& spec);
ConvexBody body_from_json(const std::string& text);
TruncationSpec spec_from_json(const std::string& text);

}  // namespace trunctest
