#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "sosmult/errors.hpp"
#include "sosmult/rational.hpp"

namespace sosmult {

struct LatticePoint {
    std::int64_t x = 0, y = 0;
    friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

inline std::int64_t cross(const LatticePoint& a, const LatticePoint& b) {
    return a.x * b.y - a.y * b.x;
}

inline std::int64_t dot(const LatticePoint& a, const LatticePoint& b) {
    return a.x * b.x + a.y * b.y;
}

/// Strictly convex lattice polygon with counterclockwise vertices (no three
/// consecutive collinear, enforced at construction).
class LatticePolygon {
public:
    explicit LatticePolygon(std::vector<LatticePoint> vertices) : v_(std::move(vertices)) {
        const std::size_t n = v_.size();
        if (n < 3) throw ParseError("polygon needs at least three vertices");
        for (std::size_t i = 0; i < n; ++i) {
            const LatticePoint a = v_[i], b = v_[(i + 1) % n], c = v_[(i + 2) % n];
            const LatticePoint e1{b.x - a.x, b.y - a.y}, e2{c.x - b.x, c.y - b.y};
            if (cross(e1, e2) <= 0)
                throw ParseError("vertices must be strictly convex in counterclockwise order");
        }
        if (two_area() <= 0) throw ParseError("degenerate polygon");
    }

    const std::vector<LatticePoint>& vertices() const { return v_; }

    /// Twice the Euclidean area (shoelace), a positive integer.
    std::int64_t two_area() const {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const LatticePoint a = v_[i], b = v_[(i + 1) % v_.size()];
            s += cross(a, b);
        }
        return s;
    }

    /// Number of lattice points on the boundary: sum of edge gcds.
    std::int64_t boundary_count() const {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const LatticePoint a = v_[i], b = v_[(i + 1) % v_.size()];
            s += std::gcd(std::abs(b.x - a.x), std::abs(b.y - a.y));
        }
        return s;
    }

    /// Number of interior lattice points, via Pick: 2A = 2I + B - 2.
    std::int64_t interior_count() const { return (two_area() - boundary_count() + 2) / 2; }

    LatticePolygon dilate(std::int64_t t) const {
        if (t < 1) throw ComputeError("dilate factor must be positive");
        std::vector<LatticePoint> w;
        w.reserve(v_.size());
        for (const LatticePoint& p : v_) w.push_back({t * p.x, t * p.y});
        return LatticePolygon(std::move(w));
    }

    /// All lattice points of the polygon, sorted by (x, y).
    std::vector<LatticePoint> lattice_points() const {
        std::int64_t xmin = v_[0].x, xmax = v_[0].x, ymin = v_[0].y, ymax = v_[0].y;
        for (const LatticePoint& p : v_) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        std::vector<LatticePoint> pts;
        for (std::int64_t x = xmin; x <= xmax; ++x)
            for (std::int64_t y = ymin; y <= ymax; ++y)
                if (contains({x, y})) pts.push_back({x, y});
        return pts;
    }

    bool contains(const LatticePoint& p) const {
        for (std::size_t i = 0; i < v_.size(); ++i) {
            const LatticePoint a = v_[i], b = v_[(i + 1) % v_.size()];
            if (cross({b.x - a.x, b.y - a.y}, {p.x - a.x, p.y - a.y}) < 0) return false;
        }
        return true;
    }

    /// Smooth: at every vertex the primitive directions of the two incident
    /// edges span the lattice (determinant +-1).
    bool is_smooth() const {
        const std::size_t n = v_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const LatticePoint prev = v_[(i + n - 1) % n], cur = v_[i], next = v_[(i + 1) % n];
            const LatticePoint d1 = primitive({next.x - cur.x, next.y - cur.y});
            const LatticePoint d2 = primitive({prev.x - cur.x, prev.y - cur.y});
            if (std::abs(cross(d1, d2)) != 1) return false;
        }
        return true;
    }

    /// Canonical presentation: edge i supports the inequality
    /// <v, inner_normal> >= -offset, tight on the edge; length counts lattice
    /// segments on the edge.
    struct Edge {
        LatticePoint from, to;
        LatticePoint inner_normal; // primitive
        std::int64_t offset = 0;
        std::int64_t length = 0;
    };

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (std::size_t i = 0; i < v_.size(); ++i) {
            Edge e;
            e.from = v_[i];
            e.to = v_[(i + 1) % v_.size()];
            const LatticePoint d{e.to.x - e.from.x, e.to.y - e.from.y};
            e.inner_normal = primitive({-d.y, d.x}); // interior lies left of the edge
            e.offset = -dot(e.from, e.inner_normal);
            e.length = std::gcd(std::abs(d.x), std::abs(d.y));
            out.push_back(e);
        }
        return out;
    }

private:
    static LatticePoint primitive(const LatticePoint& p) {
        const std::int64_t g = std::gcd(std::abs(p.x), std::abs(p.y));
        return g == 0 ? p : LatticePoint{p.x / g, p.y / g};
    }

    std::vector<LatticePoint> v_;
};

/// Built-ins: "simplex", "simplex2", "hirzebruch:r,s".
inline LatticePolygon builtin_polygon(const std::string& name) {
    if (name == "simplex") return LatticePolygon({{0, 0}, {1, 0}, {0, 1}});
    if (name == "simplex2") return LatticePolygon({{0, 0}, {2, 0}, {0, 2}});
    const std::string prefix = "hirzebruch:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string args = name.substr(prefix.size());
        const std::size_t comma = args.find(',');
        if (comma == std::string::npos) throw ParseError("hirzebruch needs 'r,s'");
        std::int64_t r = 0, s = 0;
        try {
            r = std::stoll(args.substr(0, comma));
            s = std::stoll(args.substr(comma + 1));
        } catch (const std::exception&) {
            throw ParseError("bad hirzebruch parameters in '" + name + "'");
        }
        if (r < 0 || s < 0) throw ParseError("hirzebruch parameters must be nonnegative");
        return LatticePolygon({{0, 0}, {s + 1, 0}, {r + s + 1, 1}, {0, 1}});
    }
    throw ParseError("unknown built-in polygon: '" + name + "'");
}

struct PolygonInvariants {
    std::int64_t two_area = 0;
    std::int64_t boundary = 0;
    std::int64_t interior = 0;
};

inline PolygonInvariants polygon_invariants(const LatticePolygon& Q) {
    return {Q.two_area(), Q.boundary_count(), Q.interior_count()};
}

/// Lattice-point count of the dilate iQ: Area i^2 + (B/2) i + 1, exact.
inline std::int64_t ehrhart(const LatticePolygon& Q, std::int64_t i) {
    if (i < 0) throw ComputeError("ehrhart: negative dilate");
    const Rat val = rat_make(Q.two_area(), 2) * Rat(i) * Rat(i) + rat_make(Q.boundary_count(), 2) * Rat(i) + 1;
    if (val.get_den() != 1) throw ComputeError("ehrhart value is not integral");
    return static_cast<std::int64_t>(val.get_num().get_si());
}

struct ToricCurveInvariants {
    int j = 0;
    std::int64_t d = 0;
    std::int64_t p_a = 0;
    std::int64_t r = 0; // can be negative (small j)
    Rat two_pa_over_d;
};

/// Invariants of the rational Harnack-type curve of class (j-1) on the toric
/// surface of a smooth polygon: degree 2 Area (j-1), genus = interior count
/// of (j-1)Q, and regularity r = j - 1 - m with m the largest dilate of Q
/// free of interior lattice points (searched up to 50).
inline ToricCurveInvariants toric_curve_invariants(const LatticePolygon& Q, int j) {
    if (!Q.is_smooth()) throw ComputeError("polygon is not smooth");
    if (j < 2) throw ParseError("toric invariants need j >= 2");
    ToricCurveInvariants out;
    out.j = j;
    out.d = Q.two_area() * (j - 1);
    out.p_a = Q.dilate(j - 1).interior_count();
    std::int64_t m_free = 0;
    for (std::int64_t t = 1;; ++t) {
        if (t > 50) throw ComputeError("no interior lattice point up to dilate 50");
        if (Q.dilate(t).interior_count() > 0) break;
        m_free = t;
    }
    out.r = (j - 1) - m_free;
    out.two_pa_over_d = rat_make(2 * out.p_a, out.d);
    return out;
}

} // namespace sosmult
