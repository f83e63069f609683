#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "sosmult/polygon.hpp"

using namespace sosmult;

namespace {

// Enumeration oracle: classify every lattice point in the bounding box as
// interior (strictly inside all edges) or boundary (on some edge segment).
struct Counts {
    std::int64_t interior = 0;
    std::int64_t boundary = 0;
};

Counts count_by_enumeration(const LatticePolygon& Q) {
    const auto& v = Q.vertices();
    std::int64_t xmin = v[0].x, xmax = v[0].x, ymin = v[0].y, ymax = v[0].y;
    for (const LatticePoint& p : v) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    Counts c;
    for (std::int64_t x = xmin; x <= xmax; ++x)
        for (std::int64_t y = ymin; y <= ymax; ++y) {
            bool inside = true, on_edge = false;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const LatticePoint a = v[i], b = v[(i + 1) % v.size()];
                const std::int64_t cr = cross({b.x - a.x, b.y - a.y}, {x - a.x, y - a.y});
                if (cr < 0) {
                    inside = false;
                    break;
                }
                if (cr == 0 && std::min(a.x, b.x) <= x && x <= std::max(a.x, b.x) &&
                    std::min(a.y, b.y) <= y && y <= std::max(a.y, b.y))
                    on_edge = true;
            }
            if (!inside) continue;
            if (on_edge)
                ++c.boundary;
            else
                ++c.interior;
        }
    return c;
}

// Monotone-chain convex hull with strictly convex corners.
std::vector<LatticePoint> convex_hull(std::vector<LatticePoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const LatticePoint& a, const LatticePoint& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return {};
    auto build = [&](auto begin, auto end) {
        std::vector<LatticePoint> chain;
        for (auto it = begin; it != end; ++it) {
            while (chain.size() >= 2) {
                const LatticePoint a = chain[chain.size() - 2], b = chain.back();
                if (cross({b.x - a.x, b.y - a.y}, {it->x - b.x, it->y - b.y}) <= 0)
                    chain.pop_back();
                else
                    break;
            }
            chain.push_back(*it);
        }
        return chain;
    };
    std::vector<LatticePoint> lower = build(pts.begin(), pts.end());
    std::vector<LatticePoint> upper = build(pts.rbegin(), pts.rend());
    lower.pop_back();
    upper.pop_back();
    lower.insert(lower.end(), upper.begin(), upper.end());
    return lower;
}

} // namespace

TEST_CASE("invariants of the contract polygons") {
    const LatticePolygon simplex = builtin_polygon("simplex");
    auto inv = polygon_invariants(simplex);
    CHECK(inv.two_area == 1);
    CHECK(inv.boundary == 3);
    CHECK(inv.interior == 0);

    const LatticePolygon simplex2 = builtin_polygon("simplex2");
    inv = polygon_invariants(simplex2);
    CHECK(inv.two_area == 4);
    CHECK(inv.boundary == 6);
    CHECK(inv.interior == 0);

    const LatticePolygon hirz = builtin_polygon("hirzebruch:1,0");
    CHECK(hirz.vertices().size() == 4);
    inv = polygon_invariants(hirz);
    CHECK(inv.two_area == 3);
    CHECK(inv.boundary == 5);
    CHECK(inv.interior == 0);
}

TEST_CASE("smoothness detection") {
    CHECK(builtin_polygon("simplex").is_smooth());
    CHECK(builtin_polygon("simplex2").is_smooth());
    CHECK(builtin_polygon("hirzebruch:1,0").is_smooth());
    CHECK(builtin_polygon("hirzebruch:3,2").is_smooth());
    const LatticePolygon bad({{0, 0}, {2, 0}, {0, 1}});
    CHECK_FALSE(bad.is_smooth());
}

TEST_CASE("polygon validation errors") {
    CHECK_THROWS_AS(LatticePolygon({{0, 0}, {1, 0}}), ParseError);
    CHECK_THROWS_AS(LatticePolygon({{0, 0}, {0, 1}, {1, 0}}), ParseError);        // clockwise
    CHECK_THROWS_AS(LatticePolygon({{0, 0}, {1, 0}, {2, 0}, {0, 1}}), ParseError); // collinear
    CHECK_THROWS_AS(builtin_polygon("pentagon"), ParseError);
    CHECK_THROWS_AS(builtin_polygon("hirzebruch:1"), ParseError);
    CHECK_THROWS_AS(builtin_polygon("hirzebruch:x,y"), ParseError);
}

TEST_CASE("ehrhart values and enumeration agreement") {
    const LatticePolygon simplex = builtin_polygon("simplex");
    const LatticePolygon simplex2 = builtin_polygon("simplex2");
    CHECK(ehrhart(simplex, 2) == 6);
    CHECK(ehrhart(simplex2, 1) == 6);
    CHECK(ehrhart(simplex, 0) == 1);
    CHECK(ehrhart(builtin_polygon("hirzebruch:2,1"), 0) == 1);

    for (const char* name : {"simplex", "simplex2", "hirzebruch:1,0", "hirzebruch:2,3"}) {
        const LatticePolygon Q = builtin_polygon(name);
        for (std::int64_t i = 1; i <= 5; ++i) {
            const Counts c = count_by_enumeration(Q.dilate(i));
            CHECK(ehrhart(Q, i) == c.interior + c.boundary);
        }
    }
}

TEST_CASE("interior of dilated simplex follows the binomial law") {
    const LatticePolygon simplex = builtin_polygon("simplex");
    for (std::int64_t t = 1; t <= 8; ++t) {
        const std::int64_t expect = (t - 1) * (t - 2) / 2; // C(t-1, 2)
        CHECK(simplex.dilate(t).interior_count() == expect);
        CHECK(count_by_enumeration(simplex.dilate(t)).interior == expect);
    }
}

TEST_CASE("Pick's theorem on 100 random convex lattice polygons") {
    std::mt19937 rng(271828u);
    std::uniform_int_distribution<std::int64_t> coord(-6, 6);
    int built = 0;
    while (built < 100) {
        std::vector<LatticePoint> pts;
        for (int i = 0; i < 12; ++i) pts.push_back({coord(rng), coord(rng)});
        const std::vector<LatticePoint> hull = convex_hull(pts);
        if (hull.size() < 3) continue;
        const LatticePolygon Q(hull);
        ++built;
        const Counts c = count_by_enumeration(Q);
        CHECK(Q.two_area() == 2 * c.interior + c.boundary - 2);
        CHECK(Q.boundary_count() == c.boundary);
        CHECK(Q.interior_count() == c.interior);
    }
}

TEST_CASE("canonical edge presentation") {
    const LatticePolygon simplex = builtin_polygon("simplex");
    const auto edges = simplex.edges();
    REQUIRE(edges.size() == 3);
    // every vertex satisfies <v,u> >= -a with equality on the edge's endpoints
    for (const auto& e : edges) {
        for (const LatticePoint& v : simplex.vertices())
            CHECK(dot(v, e.inner_normal) >= -e.offset);
        CHECK(dot(e.from, e.inner_normal) == -e.offset);
        CHECK(dot(e.to, e.inner_normal) == -e.offset);
        CHECK(e.length == 1);
    }
    // balancing: sum of length * normal vanishes; sum of length * offset = 2A
    for (const char* name : {"simplex", "simplex2", "hirzebruch:2,1"}) {
        const LatticePolygon Q = builtin_polygon(name);
        std::int64_t sx = 0, sy = 0, sa = 0;
        for (const auto& e : Q.edges()) {
            sx += e.length * e.inner_normal.x;
            sy += e.length * e.inner_normal.y;
            sa += e.length * e.offset;
        }
        CHECK(sx == 0);
        CHECK(sy == 0);
        CHECK(sa == Q.two_area());
    }
}

TEST_CASE("toric curve invariants reproduce the closed-form families") {
    for (int j = 2; j <= 6; ++j) {
        const Rat j1(j - 1);

        // Veronese: Q = 2*simplex
        auto v = toric_curve_invariants(builtin_polygon("simplex2"), j);
        CHECK(v.d == 4 * (j - 1));
        CHECK(Rat(v.p_a) == Rat(2) * j1 * j1 - Rat(3) * j1 + 1);
        CHECK(v.r == j - 2);
        CHECK(v.two_pa_over_d == Rat(j - 2) + rat_make(2 - j, 2 * (j - 1)));

        // projective plane: Q = simplex
        auto p = toric_curve_invariants(builtin_polygon("simplex"), j);
        CHECK(p.d == j - 1);
        CHECK(Rat(2 * p.p_a) == j1 * j1 - Rat(3) * j1 + 2);
        CHECK(p.r == j - 3);
        CHECK(p.two_pa_over_d == Rat(j - 4) + rat_make(2, j - 1));

        // Hirzebruch trapezoids
        for (const auto& [r, s] : std::vector<std::pair<int, int>>{{1, 0}, {2, 1}}) {
            const std::string name = "hirzebruch:" + std::to_string(r) + "," + std::to_string(s);
            auto h = toric_curve_invariants(builtin_polygon(name), j);
            CHECK(h.d == (r + 2 * s + 2) * (j - 1));
            CHECK(h.r == j - 2);
            const Rat area = rat_make(r, 2) + Rat(s) + 1;
            CHECK(h.two_pa_over_d == Rat(j - 2) + Rat(2 - j) / (area * j1));
        }
    }
    CHECK_THROWS_AS(toric_curve_invariants(builtin_polygon("simplex"), 1), ParseError);
    CHECK_THROWS_AS(toric_curve_invariants(LatticePolygon({{0, 0}, {2, 0}, {0, 1}}), 3), ComputeError);
}

TEST_CASE("lattice point enumeration is sorted and complete") {
    const LatticePolygon Q = builtin_polygon("simplex2");
    const auto pts = Q.lattice_points();
    REQUIRE(pts.size() == 6);
    CHECK(std::is_sorted(pts.begin(), pts.end(), [](const LatticePoint& a, const LatticePoint& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }));
    CHECK(pts.front() == LatticePoint{0, 0});
    CHECK(pts.back() == LatticePoint{2, 0});
}
