#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "trunc/bodies.hpp"
#include "trunc/errors.hpp"
#include "trunc/rng.hpp"
#include "trunc/special.hpp"

using namespace trunctest;

namespace {

Eigen::VectorXd axis(int n, int k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[k] = 1.0;
    return v;
}

ConvexBody make_ball(int n, double r) {
    ConvexBody b;
    b.n = n;
    b.shape = Ball{r};
    return b;
}

ConvexBody make_halfspace(int n, double offset) {
    ConvexBody b;
    b.n = n;
    b.shape = Halfspace{axis(n, 0), offset};
    return b;
}

ConvexBody make_slab(int n, double r) {
    ConvexBody b;
    b.n = n;
    b.shape = Slab{axis(n, 0), r};
    return b;
}

}  // namespace

TEST_SUITE_BEGIN("bodies");

TEST_CASE("validation catches bad inputs") {
    ConvexBody b = make_slab(3, 1.0);
    std::get<Slab>(b.shape).direction[0] = 0.9;  // no longer unit
    CHECK_THROWS_AS(validate(b), InvalidArgument);

    ConvexBody ball = make_ball(2, -1.0);
    CHECK_THROWS_AS(validate(ball), InvalidArgument);

    ConvexBody ix;
    ix.n = 2;
    ix.shape = Intersection{};
    CHECK_THROWS_AS(validate(ix), InvalidArgument);

    TruncationSpec spec;
    spec.components.push_back({0.6, make_ball(2, 1.0)});
    spec.components.push_back({0.6, make_slab(2, 1.0)});
    CHECK_THROWS_AS(validate(spec), InvalidArgument);
}

TEST_CASE("contains per variant") {
    CHECK(contains(make_ball(3, 1.0), Eigen::VectorXd::Zero(3)));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    x[0] = -0.5;
    CHECK(!contains(make_halfspace(3, 0.0), x));
    x[0] = 0.7;
    CHECK(!contains(make_slab(3, 0.68), x));
    CHECK(contains(make_slab(3, 0.68), 0.5 * x));
    CHECK_THROWS_AS(contains(make_ball(3, 1.0), Eigen::VectorXd::Zero(4)), DimensionMismatch);
}

TEST_CASE("convexity probe: midpoints of inside pairs stay inside") {
    ConvexBody ix;
    ix.n = 4;
    ix.shape = Intersection{{make_ball(4, 2.0), make_slab(4, 1.0), make_halfspace(4, -1.0)}};
    RngStream rng(5, 0);
    int checked = 0;
    Eigen::VectorXd a(4), b(4);
    while (checked < 1000) {
        for (int i = 0; i < 4; ++i) a[i] = rng.normal();
        for (int i = 0; i < 4; ++i) b[i] = rng.normal();
        if (!contains(ix, a) || !contains(ix, b)) continue;
        CHECK(contains(ix, 0.5 * (a + b)));
        ++checked;
    }
}

TEST_CASE("exact volumes") {
    CHECK(*exact_volume(make_halfspace(5, 0.0)) == doctest::Approx(0.5).epsilon(1e-13));
    // half-width matching volume 1/2
    const double r = inv_norm_cdf(0.75);
    CHECK(r == doctest::Approx(0.6745).epsilon(1e-3));
    CHECK(*exact_volume(make_slab(5, r)) == doctest::Approx(0.5).epsilon(1e-12));
    ConvexBody hp;
    hp.n = 4;
    hp.shape = Hyperplane{axis(4, 2)};
    CHECK(*exact_volume(hp) == 0.0);
    // ball at the chi^2 median radius
    const double med = chi2_quantile(10, 0.5);
    CHECK(*exact_volume(make_ball(10, std::sqrt(med))) == doctest::Approx(0.5).epsilon(1e-9));
    ConvexBody ix;
    ix.n = 2;
    ix.shape = Intersection{{make_ball(2, 1.0), make_slab(2, 0.5)}};
    CHECK(!exact_volume(ix).has_value());
}

TEST_CASE("mc_volume agrees with exact volumes within 4 binomial stderr") {
    for (const int n : {5, 50}) {
        const double med = chi2_quantile(n, 0.5);
        const ConvexBody bodies[] = {make_halfspace(n, 0.3), make_slab(n, 1.0),
                                     make_ball(n, std::sqrt(med))};
        int k = 0;
        for (const auto& body : bodies) {
            const McEstimate est = mc_volume(body, 40000, RngStream(70 + n, k++));
            const double exact = *exact_volume(body);
            CHECK(std::fabs(est.estimate - exact) <= 4.0 * est.stderr_ + 1e-12);
        }
    }
}

TEST_CASE("mc_volume trivial cases") {
    CHECK(mc_volume(make_ball(3, 50.0), 1000, RngStream(1, 0)).estimate == 1.0);
    // disjoint halfspaces intersect to the empty set
    ConvexBody neg = make_halfspace(2, 1.0);
    std::get<Halfspace>(neg.shape).direction *= -1.0;
    ConvexBody ix;
    ix.n = 2;
    ix.shape = Intersection{{make_halfspace(2, 1.0), neg}};
    CHECK(mc_volume(ix, 1000, RngStream(2, 0)).estimate == 0.0);
    CHECK_THROWS_AS(mc_volume(ix, 99, RngStream(2, 0)), InvalidArgument);
}

TEST_CASE("grid_union_random keeps the requested cell count") {
    RngStream rng(8, 0);
    const ConvexBody b = grid_union_random(2, 1'000'000, 0.5, rng);
    const auto& g = std::get<GridUnion>(b.shape);
    CHECK(g.cells_per_axis == 1000);
    CHECK(g.kept.size() == 500'000);
    CHECK(*exact_volume(b) == doctest::Approx(0.5));

    RngStream rng2(8, 1);
    const ConvexBody all = grid_union_random(1, 4, 1.0, rng2);
    CHECK(*exact_volume(all) == 1.0);

    RngStream rng3(8, 2);
    const ConvexBody half = grid_union_random(1, 4, 0.5, rng3);
    CHECK(std::get<GridUnion>(half.shape).kept.size() == 2);

    RngStream rng4(8, 3);
    CHECK_THROWS_AS(grid_union_random(2, 10, 0.5, rng4), InvalidArgument);  // not a square
}

TEST_CASE("grid_union volume via MC") {
    RngStream rng(9, 0);
    const ConvexBody b = grid_union_random(2, 1'000'000, 0.5, rng);
    const McEstimate est = mc_volume(b, 10000, RngStream(9, 1));
    CHECK(std::fabs(est.estimate - 0.5) < 0.02);
}

TEST_CASE("grid cells partition: every point has exactly one cell") {
    RngStream rng(10, 0);
    const ConvexBody b = grid_union_random(2, 10'000, 0.5, rng);
    const auto& g = std::get<GridUnion>(b.shape);
    RngStream probe(10, 1);
    for (int i = 0; i < 1000; ++i) {
        Eigen::VectorXd x(2);
        x[0] = probe.normal();
        x[1] = probe.normal();
        const std::uint64_t id = grid_cell_index(g, 2, x);
        CHECK(id < 10'000);
    }
}

TEST_CASE("symmetry flag and probes") {
    CHECK(is_symmetric(make_slab(3, 1.0)));
    CHECK(is_symmetric(make_ball(3, 1.0)));
    CHECK(!is_symmetric(make_halfspace(3, 0.0)));
    ConvexBody ix;
    ix.n = 3;
    ix.shape = Intersection{{make_slab(3, 1.0), make_ball(3, 2.0)}};
    CHECK(is_symmetric(ix));

    RngStream rng(11, 0);
    Eigen::VectorXd x(3);
    for (int i = 0; i < 10000; ++i) {
        for (int j = 0; j < 3; ++j) x[j] = rng.normal();
        CHECK(contains(ix, x) == contains(ix, Eigen::VectorXd(-x)));
    }
}

TEST_CASE("json round trip") {
    ConvexBody ix;
    ix.n = 3;
    ix.shape = Intersection{{make_slab(3, 0.75), make_halfspace(3, -0.25)}};
    const ConvexBody back = body_from_json(to_json(ix));
    CHECK(back.n == 3);
    const auto& members = std::get<Intersection>(back.shape).members;
    REQUIRE(members.size() == 2);
    CHECK(std::get<Slab>(members[0].shape).half_width == 0.75);
    CHECK(std::get<Halfspace>(members[1].shape).offset == -0.25);

    TruncationSpec spec;
    spec.components.push_back({0.5, make_slab(3, 0.6745)});
    spec.components.push_back({0.5, make_ball(3, 1.5)});
    const TruncationSpec spec_back = spec_from_json(to_json(spec));
    REQUIRE(spec_back.components.size() == 2);
    CHECK(spec_back.components[0].weight == 0.5);
    CHECK(std::get<Ball>(spec_back.components[1].body.shape).radius == 1.5);

    // a bare body parses as a singleton spec
    const TruncationSpec single = spec_from_json(to_json(make_ball(4, 2.0)));
    REQUIRE(single.components.size() == 1);
    CHECK(single.components[0].weight == 1.0);

    CHECK_THROWS_AS(body_from_json("{\"variant\":\"cone\",\"n\":2}"), InvalidArgument);
}

TEST_SUITE_END();
