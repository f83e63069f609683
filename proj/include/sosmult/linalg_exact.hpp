#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sosmult/errors.hpp"
#include "sosmult/rational.hpp"

namespace sosmult {

using VecQ = std::vector<Rat>;

/// Dense rational matrix, row major.
class MatQ {
public:
    MatQ() = default;
    MatQ(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {}

    static MatQ from_rows(const std::vector<VecQ>& rows) {
        const int r = static_cast<int>(rows.size());
        const int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
        MatQ m(r, c);
        for (int i = 0; i < r; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != c)
                throw ComputeError("ragged rows");
            for (int j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rat& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }
    const Rat& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)]; }

    VecQ row(int i) const {
        VecQ v(static_cast<std::size_t>(cols_));
        for (int j = 0; j < cols_; ++j) v[static_cast<std::size_t>(j)] = (*this)(i, j);
        return v;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rat> a_;
};

/// Incremental fraction-free row echelon over arbitrary-precision integers.
/// Rows are stored content-stripped with positive pivots, sorted by pivot
/// column; insertion order is the only tie-break, so results are
/// deterministic. Optional rational tails track how each stored row combines
/// the inserted vectors, which turns the structure into an exact
/// solve-in-span oracle.
class ExactEchelon {
public:
    explicit ExactEchelon(int width, bool track_tails = false)
        : width_(width), track_(track_tails) {}

    int width() const { return width_; }
    int rank() const { return static_cast<int>(rows_.size()); }

    /// Insert a vector; returns true iff it enlarged the span.
    bool insert(const VecQ& v) {
        if (static_cast<int>(v.size()) != width_) throw ComputeError("echelon width mismatch");
        Row r = integerize(v, inserted_);
        reduce_forward(r);
        if (is_zero(r.v)) return false;
        normalize(r);
        const auto pos = std::upper_bound(rows_.begin(), rows_.end(), r.pivot,
                                          [](int p, const Row& q) { return p < q.pivot; });
        rows_.insert(pos, std::move(r));
        ++inserted_;
        return true;
    }

    /// Express v in the span of the vectors previously accepted by insert.
    /// Returns false if v is outside the span; otherwise fills coords with
    /// one coefficient per accepted vector (in acceptance order).
    bool solve(const VecQ& v, VecQ& coords) const {
        if (!track_) throw ComputeError("echelon built without tails");
        if (static_cast<int>(v.size()) != width_) throw ComputeError("echelon width mismatch");
        VecQ q = v;
        VecQ tail(static_cast<std::size_t>(inserted_), Rat(0));
        for (const Row& r : rows_) {
            const Rat& qp = q[static_cast<std::size_t>(r.pivot)];
            if (qp == 0) continue;
            Rat c = qp / Rat(r.v[static_cast<std::size_t>(r.pivot)]);
            for (int j = r.pivot; j < width_; ++j)
                if (r.v[static_cast<std::size_t>(j)] != 0) q[static_cast<std::size_t>(j)] -= c * Rat(r.v[static_cast<std::size_t>(j)]);
            for (std::size_t j = 0; j < r.tail.size(); ++j)
                if (r.tail[j] != 0) tail[j] -= c * r.tail[j];
        }
        for (const Rat& x : q)
            if (x != 0) return false;
        coords.assign(static_cast<std::size_t>(inserted_), Rat(0));
        for (std::size_t j = 0; j < coords.size(); ++j) coords[j] = -tail[j];
        return true;
    }

    bool contains(const VecQ& v) const {
        VecQ q = v;
        for (const Row& r : rows_) {
            const Rat& qp = q[static_cast<std::size_t>(r.pivot)];
            if (qp == 0) continue;
            Rat c = qp / Rat(r.v[static_cast<std::size_t>(r.pivot)]);
            for (int j = r.pivot; j < width_; ++j)
                if (r.v[static_cast<std::size_t>(j)] != 0) q[static_cast<std::size_t>(j)] -= c * Rat(r.v[static_cast<std::size_t>(j)]);
        }
        for (const Rat& x : q)
            if (x != 0) return false;
        return true;
    }

    /// Pivot columns in ascending order.
    std::vector<int> pivots() const {
        std::vector<int> p;
        p.reserve(rows_.size());
        for (const Row& r : rows_) p.push_back(r.pivot);
        return p;
    }

    /// Fully reduced (RREF) rational rows, pivot entries 1.
    std::vector<VecQ> rref() const {
        std::vector<VecQ> rr;
        rr.reserve(rows_.size());
        for (const Row& r : rows_) {
            VecQ v(static_cast<std::size_t>(width_));
            const Rat piv = Rat(r.v[static_cast<std::size_t>(r.pivot)]);
            for (int j = 0; j < width_; ++j) v[static_cast<std::size_t>(j)] = Rat(r.v[static_cast<std::size_t>(j)]) / piv;
            rr.push_back(std::move(v));
        }
        // back-eliminate above each pivot
        for (std::size_t i = rr.size(); i-- > 0;) {
            const int p = rows_[i].pivot;
            for (std::size_t k = 0; k < i; ++k) {
                const Rat c = rr[k][static_cast<std::size_t>(p)];
                if (c == 0) continue;
                for (int j = p; j < width_; ++j) rr[k][static_cast<std::size_t>(j)] -= c * rr[i][static_cast<std::size_t>(j)];
            }
        }
        return rr;
    }

private:
    struct Row {
        std::vector<Int> v;
        VecQ tail;
        int pivot = -1;
    };

    Row integerize(const VecQ& v, int insert_index) const {
        Int l(1);
        for (const Rat& x : v)
            if (x != 0) l = int_lcm(l, Int(x.get_den()));
        Row r;
        r.v.resize(static_cast<std::size_t>(width_));
        for (int j = 0; j < width_; ++j) {
            Rat s = v[static_cast<std::size_t>(j)] * Rat(l);
            r.v[static_cast<std::size_t>(j)] = Int(s.get_num()); // denominator is 1 by construction
        }
        if (track_) {
            r.tail.assign(static_cast<std::size_t>(insert_index) + 1, Rat(0));
            r.tail[static_cast<std::size_t>(insert_index)] = Rat(l);
        }
        return r;
    }

    void reduce_forward(Row& q) const {
        for (const Row& r : rows_) {
            const Int& qp = q.v[static_cast<std::size_t>(r.pivot)];
            if (qp == 0) continue;
            const Int a = qp;
            const Int b = r.v[static_cast<std::size_t>(r.pivot)];
            for (int j = 0; j < width_; ++j)
                q.v[static_cast<std::size_t>(j)] = q.v[static_cast<std::size_t>(j)] * b - r.v[static_cast<std::size_t>(j)] * a;
            if (track_) {
                if (q.tail.size() < r.tail.size()) q.tail.resize(r.tail.size(), Rat(0));
                for (std::size_t j = 0; j < q.tail.size(); ++j) {
                    Rat rt = j < r.tail.size() ? r.tail[j] : Rat(0);
                    q.tail[j] = q.tail[j] * Rat(b) - rt * Rat(a);
                }
            }
            strip_content(q);
        }
    }

    static bool is_zero(const std::vector<Int>& v) {
        for (const Int& x : v)
            if (x != 0) return false;
        return true;
    }

    void strip_content(Row& q) const {
        Int g(0);
        for (const Int& x : q.v) {
            g = int_gcd(g, x);
            if (g == 1) break;
        }
        if (g > 1) {
            for (Int& x : q.v) x /= g;
            if (track_)
                for (Rat& t : q.tail) t /= Rat(g);
        }
    }

    void normalize(Row& q) const {
        q.pivot = -1;
        for (int j = 0; j < width_; ++j)
            if (q.v[static_cast<std::size_t>(j)] != 0) {
                q.pivot = j;
                break;
            }
        if (q.pivot >= 0 && q.v[static_cast<std::size_t>(q.pivot)] < 0) {
            for (Int& x : q.v) x = -x;
            if (track_)
                for (Rat& t : q.tail) t = -t;
        }
        if (track_ && q.tail.size() < static_cast<std::size_t>(inserted_) + 1)
            q.tail.resize(static_cast<std::size_t>(inserted_) + 1, Rat(0));
    }

    int width_;
    bool track_;
    int inserted_ = 0;
    std::vector<Row> rows_;
};

struct RankNullspace {
    int rank = 0;
    std::vector<VecQ> nullspace; // exact kernel basis, one vector per free column
};

/// Exact rank and right-nullspace of M via fraction-free elimination.
/// rank + nullity = column count; each basis vector satisfies M v = 0 exactly.
inline RankNullspace rank_and_nullspace(const MatQ& M) {
    ExactEchelon ech(M.cols());
    for (int i = 0; i < M.rows(); ++i) ech.insert(M.row(i));
    RankNullspace out;
    out.rank = ech.rank();
    const std::vector<int> piv = ech.pivots();
    const std::vector<VecQ> rr = ech.rref();
    std::vector<bool> is_piv(static_cast<std::size_t>(M.cols()), false);
    for (int p : piv) is_piv[static_cast<std::size_t>(p)] = true;
    for (int f = 0; f < M.cols(); ++f) {
        if (is_piv[static_cast<std::size_t>(f)]) continue;
        VecQ x(static_cast<std::size_t>(M.cols()), Rat(0));
        x[static_cast<std::size_t>(f)] = 1;
        for (std::size_t i = 0; i < rr.size(); ++i)
            x[static_cast<std::size_t>(piv[i])] = -rr[i][static_cast<std::size_t>(f)];
        out.nullspace.push_back(std::move(x));
    }
    return out;
}

/// Exact positive-semidefiniteness test for a rational symmetric matrix by
/// diagonally pivoted elimination: choose the largest remaining diagonal,
/// reject on a negative one, and when every remaining diagonal is zero the
/// matrix is PSD exactly when its remaining block vanishes.
inline bool exact_psd(const MatQ& M) {
    if (M.rows() != M.cols()) throw ComputeError("exact_psd: matrix not square");
    const int n = M.rows();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (M(i, j) != M(j, i)) throw ComputeError("exact_psd: matrix not symmetric");
    std::vector<VecQ> a;
    a.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a.push_back(M.row(i));
    std::vector<int> active;
    for (int i = 0; i < n; ++i) active.push_back(i);
    while (!active.empty()) {
        int piv = active[0];
        for (int i : active)
            if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] >
                a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(piv)])
                piv = i;
        const Rat d = a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(piv)];
        if (d < 0) return false;
        if (d == 0) {
            for (int i : active) {
                if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] < 0) return false;
                for (int j : active)
                    if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) return false;
            }
            return true;
        }
        std::vector<int> rest;
        for (int i : active)
            if (i != piv) rest.push_back(i);
        for (int i : rest)
            for (int j : rest)
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
                    a[static_cast<std::size_t>(i)][static_cast<std::size_t>(piv)] *
                    a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(j)] / d;
        active = std::move(rest);
    }
    return true;
}

/// Exact "express v in this basis" oracle for a fixed independent family.
class SpanSolver {
public:
    explicit SpanSolver(const std::vector<VecQ>& basis)
        : ech_(basis.empty() ? 0 : static_cast<int>(basis[0].size()), true) {
        for (const VecQ& b : basis)
            if (!ech_.insert(b)) throw ComputeError("SpanSolver: dependent basis");
    }

    /// Coordinates of v in the basis; throws if v lies outside the span.
    VecQ solve(const VecQ& v) const {
        VecQ c;
        if (!ech_.solve(v, c)) throw ComputeError("vector outside span");
        return c;
    }

    bool contains(const VecQ& v) const { return ech_.contains(v); }

private:
    ExactEchelon ech_;
};

} // namespace sosmult
