#include "trunc/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "trunc/constants.hpp"
#include "trunc/errors.hpp"
#include "trunc/special.hpp"

namespace trunctest {

using nlohmann::json;

namespace {

void check_unit(const Eigen::VectorXd& v, const char* what) {
    if (std::fabs(v.norm() - 1.0) > defaults().unit_norm_tol)
        throw InvalidArgument(std::string(what) + ": direction must be unit-norm");
}

std::uint64_t ipow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

const char* ConvexBody::variant_name() const {
    struct Visitor {
        const char* operator()(const Halfspace&) const { return "halfspace"; }
        const char* operator()(const Slab&) const { return "slab"; }
        const char* operator()(const Ball&) const { return "ball"; }
        const char* operator()(const Hyperplane&) const { return "hyperplane"; }
        const char* operator()(const Intersection&) const { return "intersection"; }
        const char* operator()(const GridUnion&) const { return "grid_union"; }
    };
    return std::visit(Visitor{}, shape);
}

TruncationSpec TruncationSpec::single(ConvexBody body) {
    TruncationSpec spec;
    spec.components.push_back({1.0, std::move(body)});
    return spec;
}

void validate(const ConvexBody& body) {
    if (body.n < 1) throw InvalidArgument("body: n must be >= 1");
    if (const auto* h = std::get_if<Halfspace>(&body.shape)) {
        if (h->direction.size() != body.n) throw DimensionMismatch("halfspace: direction size");
        check_unit(h->direction, "halfspace");
    } else if (const auto* s = std::get_if<Slab>(&body.shape)) {
        if (s->direction.size() != body.n) throw DimensionMismatch("slab: direction size");
        check_unit(s->direction, "slab");
        if (!(s->half_width > 0.0)) throw InvalidArgument("slab: half_width must be positive");
    } else if (const auto* b = std::get_if<Ball>(&body.shape)) {
        if (!(b->radius > 0.0)) throw InvalidArgument("ball: radius must be positive");
    } else if (const auto* p = std::get_if<Hyperplane>(&body.shape)) {
        if (p->direction.size() != body.n) throw DimensionMismatch("hyperplane: direction size");
        check_unit(p->direction, "hyperplane");
    } else if (const auto* ix = std::get_if<Intersection>(&body.shape)) {
        if (ix->members.empty()) throw InvalidArgument("intersection: needs members");
        for (const auto& m : ix->members) {
            if (m.n != body.n) throw DimensionMismatch("intersection: member dim");
            validate(m);
        }
    } else if (const auto* g = std::get_if<GridUnion>(&body.shape)) {
        const std::uint64_t total = ipow(g->cells_per_axis, body.n);
        if (g->kept.empty() || g->kept.size() > total)
            throw InvalidArgument("grid_union: kept cell count out of range");
        if (!std::is_sorted(g->kept.begin(), g->kept.end()))
            throw InvalidArgument("grid_union: kept cells must be sorted");
        if (g->kept.back() >= total) throw InvalidArgument("grid_union: cell id out of range");
    }
}

void validate(const TruncationSpec& spec) {
    if (spec.components.empty()) throw InvalidArgument("spec: needs components");
    double sum = 0.0;
    const int n = spec.components.front().body.n;
    for (const auto& c : spec.components) {
        if (c.weight < 0.0) throw InvalidArgument("spec: negative weight");
        if (c.body.n != n) throw DimensionMismatch("spec: mixed dimensions");
        validate(c.body);
        sum += c.weight;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw InvalidArgument("spec: weights must sum to 1");
}

bool contains(const ConvexBody& body, const Eigen::VectorXd& x) {
    if (x.size() != body.n) throw DimensionMismatch("contains: point dimension");
    struct Visitor {
        const ConvexBody& body;
        const Eigen::VectorXd& x;
        bool operator()(const Halfspace& h) const { return h.direction.dot(x) >= h.offset; }
        bool operator()(const Slab& s) const {
            return std::fabs(s.direction.dot(x)) <= s.half_width;
        }
        bool operator()(const Ball& b) const { return x.norm() <= b.radius; }
        bool operator()(const Hyperplane& p) const {
            return std::fabs(p.direction.dot(x)) <= defaults().hyperplane_eps;
        }
        bool operator()(const Intersection& ix) const {
            return std::all_of(ix.members.begin(), ix.members.end(),
                               [&](const ConvexBody& m) { return contains(m, x); });
        }
        bool operator()(const GridUnion& g) const {
            const std::uint64_t id = grid_cell_index(g, body.n, x);
            return std::binary_search(g.kept.begin(), g.kept.end(), id);
        }
    };
    return std::visit(Visitor{body, x}, body.shape);
}

std::optional<double> exact_volume(const ConvexBody& body) {
    struct Visitor {
        int n;
        std::optional<double> operator()(const Halfspace& h) const { return norm_sf(h.offset); }
        std::optional<double> operator()(const Slab& s) const {
            return 2.0 * norm_cdf(s.half_width) - 1.0;
        }
        std::optional<double> operator()(const Ball& b) const {
            return chi2_cdf(n, b.radius * b.radius);
        }
        std::optional<double> operator()(const Hyperplane&) const { return 0.0; }
        std::optional<double> operator()(const Intersection&) const { return std::nullopt; }
        std::optional<double> operator()(const GridUnion& g) const {
            return static_cast<double>(g.kept.size()) /
                   static_cast<double>(ipow(g.cells_per_axis, n));
        }
    };
    return std::visit(Visitor{body.n}, body.shape);
}

McEstimate mc_volume(const ConvexBody& body, std::size_t trials, const RngStream& rng) {
    if (trials < 100) throw InvalidArgument("mc_volume: trials must be >= 100");
    validate(body);
    constexpr std::size_t kChunk = 1024;
    std::size_t hits = 0;
    Eigen::VectorXd x(body.n);
    for (std::size_t base = 0, chunk = 0; base < trials; base += kChunk, ++chunk) {
        RngStream local = rng.substream(chunk);
        const std::size_t end = std::min(base + kChunk, trials);
        for (std::size_t i = base; i < end; ++i) {
            for (int j = 0; j < body.n; ++j) x[j] = local.normal();
            if (contains(body, x)) ++hits;
        }
    }
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return McEstimate{p, se, trials};
}

std::uint64_t grid_cell_index(const GridUnion& grid, int n, const Eigen::VectorXd& x) {
    const double m = static_cast<double>(grid.cells_per_axis);
    std::uint64_t id = 0;
    for (int j = 0; j < n; ++j) {
        const double u = norm_cdf(x[j]);
        auto idx = static_cast<std::uint64_t>(u * m);
        if (idx >= grid.cells_per_axis) idx = grid.cells_per_axis - 1;
        id = id * grid.cells_per_axis + idx;
    }
    return id;
}

ConvexBody grid_union_random(int n, std::uint64_t cell_count, double keep_fraction,
                             RngStream& rng) {
    if (n < 1) throw InvalidArgument("grid_union_random: n must be >= 1");
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw InvalidArgument("grid_union_random: keep fraction must be in (0,1]");
    if (static_cast<double>(cell_count) * keep_fraction < 1.0)
        throw InvalidArgument("grid_union_random: too few cells for keep fraction");
    const auto per_axis = static_cast<std::uint64_t>(
        std::llround(std::pow(static_cast<double>(cell_count), 1.0 / n)));
    if (per_axis < 1 || ipow(per_axis, n) != cell_count)
        throw InvalidArgument("grid_union_random: cell count must be a perfect n-th power");

    const auto kept_count =
        static_cast<std::uint64_t>(std::floor(keep_fraction * static_cast<double>(cell_count)));
    std::vector<std::uint64_t> ids(cell_count);
    std::iota(ids.begin(), ids.end(), std::uint64_t{0});
    std::vector<char> mark(cell_count, 0);
    for (std::uint64_t i = 0; i < kept_count; ++i) {
        const std::uint64_t j = i + rng.next_u64() % (cell_count - i);
        std::swap(ids[i], ids[j]);
        mark[ids[i]] = 1;
    }
    // collect in a linear pass instead of sorting the kept prefix
    std::vector<std::uint64_t> kept;
    kept.reserve(kept_count);
    for (std::uint64_t id = 0; id < cell_count; ++id)
        if (mark[id]) kept.push_back(id);

    ConvexBody body;
    body.n = n;
    body.shape = GridUnion{per_axis, std::move(kept)};
    return body;
}

bool is_symmetric(const ConvexBody& body) {
    struct Visitor {
        bool operator()(const Halfspace&) const { return false; }
        bool operator()(const Slab&) const { return true; }
        bool operator()(const Ball&) const { return true; }
        bool operator()(const Hyperplane&) const { return true; }
        bool operator()(const Intersection& ix) const {
            return std::all_of(ix.members.begin(), ix.members.end(), is_symmetric);
        }
        bool operator()(const GridUnion&) const { return false; }
    };
    return std::visit(Visitor{}, body.shape);
}

namespace {

json direction_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd direction_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i];
    return v;
}

json body_to_jobj(const ConvexBody& body) {
    json j;
    j["variant"] = body.variant_name();
    j["n"] = body.n;
    if (const auto* h = std::get_if<Halfspace>(&body.shape)) {
        j["direction"] = direction_to_json(h->direction);
        j["offset"] = h->offset;
    } else if (const auto* s = std::get_if<Slab>(&body.shape)) {
        j["direction"] = direction_to_json(s->direction);
        j["half_width"] = s->half_width;
    } else if (const auto* b = std::get_if<Ball>(&body.shape)) {
        j["radius"] = b->radius;
    } else if (const auto* p = std::get_if<Hyperplane>(&body.shape)) {
        j["direction"] = direction_to_json(p->direction);
    } else if (const auto* ix = std::get_if<Intersection>(&body.shape)) {
        json members = json::array();
        for (const auto& m : ix->members) members.push_back(body_to_jobj(m));
        j["members"] = std::move(members);
    } else if (const auto* g = std::get_if<GridUnion>(&body.shape)) {
        j["cells_per_axis"] = g->cells_per_axis;
        j["kept"] = g->kept;
    }
    return j;
}

ConvexBody body_from_jobj(const json& j) {
    ConvexBody body;
    body.n = j.at("n");
    const std::string variant = j.at("variant");
    if (variant == "halfspace") {
        body.shape = Halfspace{direction_from_json(j.at("direction")), j.at("offset")};
    } else if (variant == "slab") {
        body.shape = Slab{direction_from_json(j.at("direction")), j.at("half_width")};
    } else if (variant == "ball") {
        body.shape = Ball{j.at("radius")};
    } else if (variant == "hyperplane") {
        body.shape = Hyperplane{direction_from_json(j.at("direction"))};
    } else if (variant == "intersection") {
        Intersection ix;
        for (const auto& m : j.at("members")) ix.members.push_back(body_from_jobj(m));
        body.shape = std::move(ix);
    } else if (variant == "grid_union") {
        GridUnion g;
        g.cells_per_axis = j.at("cells_per_axis");
        g.kept = j.at("kept").get<std::vector<std::uint64_t>>();
        body.shape = std::move(g);
    } else {
        throw InvalidArgument("body_from_json: unknown variant " + variant);
    }
    validate(body);
    return body;
}

}  // namespace

std::string to_json(const ConvexBody& body) { return body_to_jobj(body).dump(2); }

std::string to_json(const TruncationSpec& spec) {
    json mix = json::array();
    for (const auto& c : spec.components)
        mix.push_back({{"weight", c.weight}, {"body", body_to_jobj(c.body)}});
    return json{{"mixture", std::move(mix)}}.dump(2);
}

ConvexBody body_from_json(const std::string& text) {
    return body_from_jobj(json::parse(text));
}

TruncationSpec spec_from_json(const std::string& text) {
    const json j = json::parse(text);
    TruncationSpec spec;
    if (j.contains("mixture")) {
        for (const auto& c : j.at("mixture"))
            spec.components.push_back({c.at("weight"), body_from_jobj(c.at("body"))});
    } else {
        spec.components.push_back({1.0, body_from_jobj(j)});
    }
    validate(spec);
    return spec;
}

}  // namespace trunctest
