#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sosmult/builtin_forms.hpp"
#include "sosmult/errors.hpp"
#include "sosmult/models.hpp"
#include "sosmult/polygon.hpp"
#include "sosmult/sampling.hpp"

namespace sosmult {

// ---------------------------------------------------------------------------
// Harnack curves from per-edge root data
//
// A smooth lattice polygon Q, a dilation factor t >= 1, and one block of
// rational roots per edge of Q determine a totally real rational curve of
// degree two_area(Q) * t in the projective space on the lattice points of Q.
// Lattice point m maps to the monomial-like product
//
//     phi_m = prod_i f_i^(<m, u_i> + a_i),
//
// where edge i has primitive inner normal u_i, offset a_i, and vanishing
// binary form f_i(x0, x1) = prod_j (x0 - c_{i,j} x1) built from that edge's
// root block. The exponent <m, u_i> + a_i is the lattice distance from m to
// edge i, so it is nonnegative for m in Q and the phi_m share one degree.
// ---------------------------------------------------------------------------

struct HarnackSpec {
    LatticePolygon Q;
    int t = 1;
    /// One block per edge of Q, listed in the edge order of Q.edges().
    /// Block i must hold t * (lattice length of edge i) distinct rationals,
    /// and the blocks must occupy pairwise disjoint intervals whose cyclic
    /// order around the real line matches the edge order.
    std::vector<std::vector<Rat>> roots;
};

/// Canonical root table: edge i receives its e_i = t * length(i) roots
/// equally spaced inside the open interval (i, i+1), namely i + k / (e_i + 1)
/// for k = 1..e_i. Consecutive integer intervals are disjoint and follow the
/// edge order, so the table always validates.
inline std::vector<std::vector<Rat>> default_roots(const LatticePolygon& Q, int t) {
    if (t < 1) throw ParseError("harnack: dilation factor must be at least 1");
    std::vector<std::vector<Rat>> table;
    const auto edges = Q.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::int64_t e = static_cast<std::int64_t>(t) * edges[i].length;
        std::vector<Rat> block;
        block.reserve(static_cast<std::size_t>(e));
        for (std::int64_t k = 1; k <= e; ++k)
            block.push_back(rat_make(static_cast<std::int64_t>(i) * (e + 1) + k, e + 1));
        table.push_back(std::move(block));
    }
    return table;
}

namespace detail {

/// Checks the root table against the spec's shape rules and throws ParseError
/// with a concrete message on the first violation.
inline void validate_harnack_roots(const HarnackSpec& spec) {
    const auto edges = spec.Q.edges();
    if (spec.t < 1) throw ParseError("harnack: dilation factor must be at least 1");
    if (spec.roots.size() != edges.size())
        throw ParseError("harnack: expected one root block per edge, got " +
                         std::to_string(spec.roots.size()) + " blocks for " +
                         std::to_string(edges.size()) + " edges");
    struct Interval {
        Rat lo, hi;
        std::size_t edge;
    };
    std::vector<Interval> iv;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::int64_t want = static_cast<std::int64_t>(spec.t) * edges[i].length;
        const auto& block = spec.roots[i];
        if (static_cast<std::int64_t>(block.size()) != want)
            throw ParseError("harnack: edge " + std::to_string(i) + " needs " +
                             std::to_string(want) + " roots, got " +
                             std::to_string(block.size()));
        std::vector<Rat> sorted = block;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 1; k < sorted.size(); ++k)
            if (sorted[k - 1] == sorted[k])
                throw ParseError("harnack: repeated root on edge " + std::to_string(i));
        iv.push_back({sorted.front(), sorted.back(), i});
    }
    std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (std::size_t k = 1; k < iv.size(); ++k)
        if (!(iv[k - 1].hi < iv[k].lo))
            throw ParseError("harnack: root intervals of edges " +
                             std::to_string(iv[k - 1].edge) + " and " +
                             std::to_string(iv[k].edge) + " overlap");
    // The intervals sorted by position must list the edges in cyclic order.
    const std::size_t n = iv.size();
    const std::size_t shift = iv[0].edge;
    for (std::size_t k = 0; k < n; ++k)
        if (iv[k].edge != (shift + k) % n)
            throw ParseError("harnack: root intervals do not follow the cyclic edge order");
}

} // namespace detail

/// Builds the parametrized curve model phi_m, m in Q cap Z^2 (in the
/// lattice_points() order), from the spec. Throws ParseError on malformed
/// root data and ComputeError if the exponent or degree bookkeeping fails,
/// which would indicate a non-smooth or degenerate polygon.
inline CurveModel harnack_parametrization(const HarnackSpec& spec) {
    detail::validate_harnack_roots(spec);
    const auto edges = spec.Q.edges();

    // Edge vanishing forms f_i(x0, x1) = prod_j (x0 - c_{i,j} x1), of degree
    // e_i = t * length(i). Exponent sums then balance: the lattice distances
    // of any m in Q from the edges, weighted by the edge degrees, add up to
    // t * two_area(Q).
    std::vector<PolyQ> f;
    for (const auto& block : spec.roots) {
        PolyQ fi = PolyQ::one(2);
        for (const Rat& c : block)
            fi = fi * (PolyQ::variable(2, 0) + PolyQ::variable(2, 1, -c));
        f.push_back(fi);
    }

    const std::int64_t degree = spec.Q.two_area() * spec.t;
    std::vector<PolyQ> forms;
    for (const LatticePoint& m : spec.Q.lattice_points()) {
        PolyQ phi = PolyQ::one(2);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            // Lattice distance of m from edge i.
            const std::int64_t expo = edges[i].inner_normal.x * m.x +
                                      edges[i].inner_normal.y * m.y + edges[i].offset;
            if (expo < 0)
                throw ComputeError("harnack: negative edge exponent at lattice point (" +
                                   std::to_string(m.x) + ", " + std::to_string(m.y) + ")");
            if (expo > 0) phi = phi * f[i].pow(static_cast<int>(expo));
        }
        if (phi.homogeneous_degree() != degree)
            throw ComputeError("harnack: unbalanced monomial degree at lattice point (" +
                               std::to_string(m.x) + ", " + std::to_string(m.y) + ")");
        forms.push_back(phi);
    }
    return CurveModel::param(std::move(forms));
}

// ---------------------------------------------------------------------------
// Node detection for parametrized rational curves
//
// A node of the image is an unordered pair {s, t} of distinct points of P^1
// whose images under the parametrization coincide, i.e. the value vectors
// xi(s) and xi(t) are parallel. The detector works in an affine chart chosen
// so no node parameter sits at infinity, eliminates one variable with a
// resultant, and polishes each candidate pair with Newton steps on two
// random combinations of the parallelism minors.
//
// Assumes the parametrization is birational onto its image (not checked);
// a non-birational input makes every point a "node" and the chart search
// fails loudly.
// ---------------------------------------------------------------------------

enum class NodeKind { crossing, solitary, complex_pair };

struct NodePair {
    /// Projective parameters, normalized so the largest component is 1.
    std::complex<double> s0, s1;
    std::complex<double> t0, t1;
    NodeKind kind = NodeKind::complex_pair;
    /// Largest normalized parallelism minor of the polished pair.
    double residual = 0.0;
};

struct NodeReport {
    std::vector<NodePair> pairs;
    /// Worst residual over the accepted pairs, 0 when there are none.
    double residual = 0.0;
};

namespace detail {

using Cx = std::complex<double>;

inline std::vector<double> conv(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline std::vector<Rat> conv(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    std::vector<Rat> r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

template <class T>
inline Cx horner(const std::vector<T>& c, Cx z) {
    Cx acc(0.0, 0.0);
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + Cx(c[k]);
    return acc;
}

/// Complex roots of sum_k c[k] z^k via the companion matrix. Leading
/// coefficients below 1e-12 of the largest are trimmed first. Returns an
/// empty list for (near-)constant input. The matrix is balanced by powers of
/// two before the eigensolve, which the solver itself omits; without it the
/// eigenvalues of companions of wide-coefficient-range polynomials (resultants
/// reach degree about a hundred with entries spanning twenty decades) are
/// unusable.
inline std::vector<Cx> croots(std::vector<Cx> c) {
    double mx = 0.0;
    for (const Cx& v : c) mx = std::max(mx, std::abs(v));
    if (!(mx > 0.0)) return {};
    std::size_t deg = c.size();
    while (deg > 1 && std::abs(c[deg - 1]) <= 1e-12 * mx) --deg;
    c.resize(deg);
    if (deg <= 1) return {};
    const int n = static_cast<int>(deg) - 1;
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[deg - 1];

    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            double r = 0.0, col = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    r += std::abs(C(i, j));
                    col += std::abs(C(j, i));
                }
            if (!(r > 0.0) || !(col > 0.0)) continue;
            const double s = r + col;
            double f = 1.0;
            while (col < r / 2.0) {
                col *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while (col >= r * 2.0) {
                col /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (col + r < 0.95 * s) {
                changed = true;
                C.row(i) /= f;
                C.col(i) *= f;
            }
        }
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    if (es.info() != Eigen::Success) throw ComputeError("univariate root extraction failed");
    std::vector<Cx> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return out;
}

inline std::vector<Cx> croots_real(const std::vector<double>& c) {
    std::vector<Cx> cc(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) cc[k] = Cx(c[k]);
    return croots(std::move(cc));
}

/// Largest 2x2 minor of the 2 x n matrix [a; b] after normalizing both rows
/// to unit length. Zero iff the vectors are parallel.
inline double parallel_residual(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const double na = a.norm(), nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0)) return 1.0;
    double worst = 0.0;
    const Eigen::Index n = a.size();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            worst = std::max(worst, std::abs(a(i) * b(j) - a(j) * b(i)) / (na * nb));
    return worst;
}

/// Chordal distance on the affine chart of P^1(C).
inline double chordal(Cx a, Cx b) {
    return std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

/// Dense ascending coefficients of the parametrization forms, one vector per
/// form, each normalized to unit max coefficient. Entry [k] multiplies
/// x0^k x1^(d-k). cq mirrors c exactly (doubles are dyadic rationals), so the
/// elimination stages can run in exact arithmetic on the same polynomials the
/// floating stages see.
struct BinarySystem {
    int d = 0;
    std::vector<std::vector<double>> c;
    std::vector<std::vector<Rat>> cq;
};

inline BinarySystem binary_system(const CurveModel& model) {
    std::vector<PolyD> fd;
    if (const auto* pq = std::get_if<ParamModelQ>(&model.variant())) {
        for (const PolyQ& g : pq->forms()) fd.push_back(poly_to_double(g));
    } else if (const auto* pd = std::get_if<ParamModelD>(&model.variant())) {
        fd = pd->forms();
    } else {
        throw ComputeError("node detection needs a parametrized curve model");
    }
    BinarySystem sys;
    sys.d = fd[0].homogeneous_degree();
    for (const PolyD& g : fd) {
        std::vector<double> cc(static_cast<std::size_t>(sys.d) + 1, 0.0);
        for (const auto& [e, v] : g.terms()) cc[static_cast<std::size_t>(e[0])] = v;
        double mx = 0.0;
        for (double x : cc) mx = std::max(mx, std::abs(x));
        for (double& x : cc) x /= mx;
        std::vector<Rat> ccq(cc.size());
        for (std::size_t k = 0; k < cc.size(); ++k) ccq[k] = rat_of_double(cc[k]);
        sys.c.push_back(std::move(cc));
        sys.cq.push_back(std::move(ccq));
    }
    return sys;
}

/// Coefficients of psi_a(u0, u1) = xi_a(al u0 + be u1, ga u0 + de u1),
/// ascending in the u0 power. A projective change of parameter moves nodes
/// around P^1 without creating or destroying them.
inline std::vector<std::vector<double>> mobius_forms(const BinarySystem& sys, double al,
                                                     double be, double ga, double de) {
    const int d = sys.d;
    std::vector<std::vector<double>> A(static_cast<std::size_t>(d) + 1),
        G(static_cast<std::size_t>(d) + 1);
    A[0] = {1.0};
    G[0] = {1.0};
    for (int k = 1; k <= d; ++k) {
        A[static_cast<std::size_t>(k)] = conv(A[static_cast<std::size_t>(k - 1)], {be, al});
        G[static_cast<std::size_t>(k)] = conv(G[static_cast<std::size_t>(k - 1)], {de, ga});
    }
    std::vector<std::vector<double>> psi;
    for (const auto& form : sys.c) {
        std::vector<double> res(static_cast<std::size_t>(d) + 1, 0.0);
        for (int k = 0; k <= d; ++k) {
            const double ck = form[static_cast<std::size_t>(k)];
            if (ck == 0.0) continue;
            const auto term =
                conv(A[static_cast<std::size_t>(k)], G[static_cast<std::size_t>(d - k)]);
            for (std::size_t j = 0; j < term.size(); ++j) res[j] += ck * term[j];
        }
        double mx = 0.0;
        for (double x : res) mx = std::max(mx, std::abs(x));
        if (!(mx > 0.0)) throw ComputeError("parameter chart degenerated a form");
        for (double& x : res) x /= mx;
        psi.push_back(std::move(res));
    }
    return psi;
}

/// Exact counterpart of mobius_forms on the rationalized coefficients,
/// without per-form normalization (an overall form scale drops out of the
/// root structure of the minors built from it).
inline std::vector<std::vector<Rat>> mobius_forms_exact(const BinarySystem& sys, int al, int be,
                                                        int ga, int de) {
    const int d = sys.d;
    std::vector<std::vector<Rat>> A(static_cast<std::size_t>(d) + 1),
        G(static_cast<std::size_t>(d) + 1);
    A[0] = {Rat(1)};
    G[0] = {Rat(1)};
    for (int k = 1; k <= d; ++k) {
        A[static_cast<std::size_t>(k)] =
            conv(A[static_cast<std::size_t>(k - 1)], std::vector<Rat>{Rat(be), Rat(al)});
        G[static_cast<std::size_t>(k)] =
            conv(G[static_cast<std::size_t>(k - 1)], std::vector<Rat>{Rat(de), Rat(ga)});
    }
    std::vector<std::vector<Rat>> psi;
    for (const auto& form : sys.cq) {
        std::vector<Rat> res(static_cast<std::size_t>(d) + 1, Rat(0));
        for (int k = 0; k <= d; ++k) {
            const Rat& ck = form[static_cast<std::size_t>(k)];
            if (ck == 0) continue;
            const auto term =
                conv(A[static_cast<std::size_t>(k)], G[static_cast<std::size_t>(d - k)]);
            for (std::size_t j = 0; j < term.size(); ++j) res[j] += ck * term[j];
        }
        psi.push_back(std::move(res));
    }
    return psi;
}

inline Eigen::VectorXcd eval_forms(const std::vector<std::vector<double>>& psi, Cx u) {
    Eigen::VectorXcd w(static_cast<Eigen::Index>(psi.size()));
    for (std::size_t a = 0; a < psi.size(); ++a)
        w(static_cast<Eigen::Index>(a)) = horner(psi[a], u);
    return w;
}

/// All finite parameters v whose value vector could be parallel to w,
/// with their parallelism residuals. Candidates are the roots of the pencil
/// g_b(v) = w_astar psi_b(v) - w_b psi_astar(v) over every b, where astar is
/// the largest component of w; a genuine fiber partner is a common root of
/// all of them, which the residual check enforces.
inline std::vector<std::pair<Cx, double>> fiber_candidates(
    const std::vector<std::vector<double>>& psi, const Eigen::VectorXcd& w) {
    const std::size_t n1 = psi.size();
    const std::size_t d1 = psi[0].size();
    Eigen::Index astar = 0;
    w.cwiseAbs().maxCoeff(&astar);
    const std::size_t as = static_cast<std::size_t>(astar);
    std::vector<std::pair<Cx, double>> out;
    for (std::size_t b = 0; b < n1; ++b) {
        if (b == as) continue;
        std::vector<Cx> g(d1);
        for (std::size_t k = 0; k < d1; ++k) g[k] = w(astar) * psi[b][k] - w(static_cast<Eigen::Index>(b)) * psi[as][k];
        for (Cx v : croots(std::move(g))) {
            bool dup = false;
            for (const auto&[prev, res] : out)
                if (chordal(prev, v) <= 1e-9) { dup = true; break; }
            if (dup) continue;
            out.emplace_back(v, parallel_residual(w, eval_forms(psi, v)));
        }
    }
    return out;
}

/// Bivariate value of sum_{i,j} M(i,j) u^i v^j.
inline Cx beval(const Eigen::MatrixXd& M, Cx u, Cx v) {
    Cx acc(0.0, 0.0);
    for (Eigen::Index i = M.rows(); i-- > 0;) {
        Cx row(0.0, 0.0);
        for (Eigen::Index j = M.cols(); j-- > 0;) row = row * v + Cx(M(i, j));
        acc = acc * u + row;
    }
    return acc;
}

inline Eigen::MatrixXd dmat_u(const Eigen::MatrixXd& M) {
    if (M.rows() <= 1) return Eigen::MatrixXd::Zero(1, M.cols());
    Eigen::MatrixXd D(M.rows() - 1, M.cols());
    for (Eigen::Index i = 0; i + 1 < M.rows(); ++i) D.row(i) = static_cast<double>(i + 1) * M.row(i + 1);
    return D;
}

inline Eigen::MatrixXd dmat_v(const Eigen::MatrixXd& M) {
    if (M.cols() <= 1) return Eigen::MatrixXd::Zero(M.rows(), 1);
    Eigen::MatrixXd D(M.rows(), M.cols() - 1);
    for (Eigen::Index j = 0; j + 1 < M.cols(); ++j) D.col(j) = static_cast<double>(j + 1) * M.col(j + 1);
    return D;
}

/// Exact determinant of a square rational matrix by Gaussian elimination.
/// The pivot choice only affects intermediate entry size, never the result.
inline Rat det_rat(std::vector<std::vector<Rat>> M) {
    const std::size_t n = M.size();
    Rat det(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (cmp(abs(M[i][k]), abs(M[piv][k])) > 0) piv = i;
        if (M[piv][k] == 0) return Rat(0);
        if (piv != k) {
            std::swap(M[piv], M[k]);
            det = -det;
        }
        det *= M[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            if (M[i][k] == 0) continue;
            const Rat f = M[i][k] / M[k][k];
            for (std::size_t j = k + 1; j < n; ++j) M[i][j] -= f * M[k][j];
        }
    }
    return det;
}

/// Sylvester determinant in v of two exact bivariate grids (entry [i][j]
/// multiplies u^i v^j) evaluated at u = u0, with fixed formal v-degree d-1.
inline Rat sylvester_det_at(const std::vector<std::vector<Rat>>& Pq,
                            const std::vector<std::vector<Rat>>& Rq, const Rat& u0) {
    const int d = static_cast<int>(Pq.size());
    const int m = d - 1;
    if (m <= 0) return Rat(1);
    std::vector<Rat> up(static_cast<std::size_t>(d));
    up[0] = 1;
    for (int i = 1; i < d; ++i) up[static_cast<std::size_t>(i)] = up[static_cast<std::size_t>(i - 1)] * u0;
    std::vector<Rat> pv(static_cast<std::size_t>(d)), rv(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        Rat ap(0), ar(0);
        for (int i = 0; i < d; ++i) {
            ap += Pq[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * up[static_cast<std::size_t>(i)];
            ar += Rq[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * up[static_cast<std::size_t>(i)];
        }
        pv[static_cast<std::size_t>(j)] = ap;
        rv[static_cast<std::size_t>(j)] = ar;
    }
    const int N = 2 * m;
    std::vector<std::vector<Rat>> S(static_cast<std::size_t>(N),
                                    std::vector<Rat>(static_cast<std::size_t>(N), Rat(0)));
    for (int i = 0; i < m; ++i)
        for (int k = 0; k <= m; ++k) {
            S[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + k)] = pv[static_cast<std::size_t>(m - k)];
            S[static_cast<std::size_t>(m + i)][static_cast<std::size_t>(i + k)] = rv[static_cast<std::size_t>(m - k)];
        }
    return det_rat(std::move(S));
}

/// Ascending coefficients of the degree < xs.size() polynomial through the
/// exact value table, by Newton divided differences.
inline std::vector<Rat> newton_interpolate(const std::vector<Rat>& xs, std::vector<Rat> ys) {
    const std::size_t K = xs.size();
    for (std::size_t j = 1; j < K; ++j)
        for (std::size_t i = K; i-- > j;) ys[i] = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - j]);
    std::vector<Rat> c{ys[K - 1]};
    for (std::size_t i = K - 1; i-- > 0;) {
        c.insert(c.begin(), Rat(0));
        for (std::size_t t = 0; t + 1 < c.size(); ++t) c[t] -= xs[i] * c[t + 1];
        c[0] += ys[i];
    }
    return c;
}

/// All complex roots of a polynomial given by exact coefficients, via the
/// Aberth-Ehrlich iteration in extended precision (two double limbs per
/// coefficient) from Bini-style initial points, whose radii come from the
/// upper convex hull of the coefficient magnitudes. This replaces the
/// companion matrix for resultants: their degree reaches a hundred with
/// coefficients spanning twenty decades, where rounding to plain double
/// already moves the ill-conditioned roots further than the root spacing,
/// and a point deficit from trimming small leading coefficients leaves
/// entire root clusters unclaimed. Exact zero leading coefficients are a
/// genuine degree drop; exact zero trailing coefficients contribute one
/// representative root at the origin.
inline std::vector<Cx> exact_poly_roots(const std::vector<Rat>& c) {
    using Cl = std::complex<long double>;
    std::size_t hi = c.size(), lo = 0;
    while (hi > 0 && c[hi - 1] == 0) --hi;
    if (hi == 0) return {};
    while (lo < hi && c[lo] == 0) ++lo;
    std::vector<Cx> out;
    if (lo > 0) out.emplace_back(0.0, 0.0);
    const std::size_t n = hi - lo;
    if (n <= 1) return out;

    Rat cmax(0);
    for (std::size_t j = lo; j < hi; ++j)
        if (cmp(abs(c[j]), cmax) > 0) cmax = abs(c[j]);
    std::vector<Cl> a(n), da(n - 1);
    std::vector<long double> mag(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Rat w = c[lo + j] / cmax;
        const double w1 = rat_double(w);
        const double w2 = rat_double(w - rat_of_double(w1));
        a[j] = Cl(static_cast<long double>(w1) + static_cast<long double>(w2), 0.0L);
        mag[j] = std::abs(a[j]);
    }
    for (std::size_t j = 1; j < n; ++j) da[j - 1] = a[j] * static_cast<long double>(j);
    auto horner_l = [](const std::vector<Cl>& cc, Cl zz) {
        Cl acc(0.0L, 0.0L);
        for (std::size_t k = cc.size(); k-- > 0;) acc = acc * zz + cc[k];
        return acc;
    };

    // Upper convex hull of (j, log|a_j|) over the nonzero coefficients.
    std::vector<std::size_t> hull;
    for (std::size_t j = 0; j < n; ++j) {
        if (!(mag[j] > 0.0L)) continue;
        const long double y = std::log(mag[j]);
        while (hull.size() >= 2) {
            const std::size_t p = hull[hull.size() - 2], q = hull[hull.size() - 1];
            const long double yp = std::log(mag[p]), yq = std::log(mag[q]);
            if ((yq - yp) * static_cast<long double>(j - p) -
                    (y - yp) * static_cast<long double>(q - p) <=
                0.0L)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(j);
    }

    std::vector<Cl> z;
    z.reserve(n - 1);
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const std::size_t k1 = hull[s], k2 = hull[s + 1];
        const long double r =
            std::exp((std::log(mag[k1]) - std::log(mag[k2])) / static_cast<long double>(k2 - k1));
        for (std::size_t t = 0; t < k2 - k1; ++t) {
            const long double th =
                6.283185307179586477L * (static_cast<long double>(t) + 0.5L) /
                    static_cast<long double>(k2 - k1) +
                0.4L * static_cast<long double>(s + 1);
            z.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }

    for (int sweep = 0; sweep < 120; ++sweep) {
        long double worst = 0.0L;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const Cl f = horner_l(a, z[i]), df = horner_l(da, z[i]);
            if (!(std::abs(df) > 0.0L)) continue;
            const Cl newton = f / df;
            Cl repel(0.0L, 0.0L);
            for (std::size_t j = 0; j < z.size(); ++j)
                if (j != i && std::abs(z[i] - z[j]) > 0.0L) repel += Cl(1.0L, 0.0L) / (z[i] - z[j]);
            const Cl denom = Cl(1.0L, 0.0L) - newton * repel;
            const Cl step = (std::abs(denom) > 1e-30L) ? newton / denom : newton;
            if (!(std::abs(step) < 1e6L)) continue;
            z[i] -= step;
            worst = std::max(worst, std::abs(step) / (1.0L + std::abs(z[i])));
        }
        if (worst < 5e-19L) break;
    }
    for (const Cl& zz : z)
        out.emplace_back(static_cast<double>(zz.real()), static_cast<double>(zz.imag()));
    return out;
}

struct ChartPairs {
    std::vector<std::pair<Cx, Cx>> uv;
    double residual = 0.0;
};

/// Finds all parallelism pairs of the chart forms, assuming no pair involves
/// the point at infinity. psi and psiq describe the same forms in double and
/// exact arithmetic. Returns false when the resultant of the random minor
/// combinations degenerates (bad combination weights), so the caller can
/// retry with another seed. Throws ComputeError when candidates polish into
/// the ill-conditioned band between acceptance and rejection.
inline bool chart_detect(const std::vector<std::vector<double>>& psi,
                         const std::vector<std::vector<Rat>>& psiq, int d, std::uint64_t seed,
                         ChartPairs& out) {
    const std::size_t n1 = psi.size();
    const int m = d - 1;

    // Divided-difference minor quotients, kept exact: for a < b the bivariate
    //   N_ab(u, v) = (psi_a(u) psi_b(v) - psi_b(u) psi_a(v)) / (v - u)
    // expands as sum_{k<l} (a_k b_l - a_l b_k) sum_i u^(k+i) v^(l-1-i),
    // a polynomial of bidegree (d-1, d-1). Its common zeros off the diagonal
    // are exactly the parallelism pairs.
    std::vector<std::vector<std::vector<Rat>>> minors;
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = a + 1; b < n1; ++b) {
            std::vector<std::vector<Rat>> N(static_cast<std::size_t>(d),
                                            std::vector<Rat>(static_cast<std::size_t>(d), Rat(0)));
            for (int k = 0; k <= d; ++k)
                for (int l = k + 1; l <= d; ++l) {
                    const Rat wkl = psiq[a][static_cast<std::size_t>(k)] * psiq[b][static_cast<std::size_t>(l)] -
                                    psiq[a][static_cast<std::size_t>(l)] * psiq[b][static_cast<std::size_t>(k)];
                    if (wkl == 0) continue;
                    for (int i = 0; i < l - k; ++i)
                        N[static_cast<std::size_t>(k + i)][static_cast<std::size_t>(l - 1 - i)] += wkl;
                }
            minors.push_back(std::move(N));
        }

    // Two random integer combinations, kept exact. A common zero of all
    // minors is a common zero of both; spurious intersections of just these
    // two are rejected later by the full residual.
    std::uint64_t state = seed;
    auto weight = [&state]() {
        const int w = static_cast<int>(splitmix64(state) % 127) - 63;
        return Rat(w == 0 ? 64 : w);
    };
    std::vector<std::vector<Rat>> Pq(static_cast<std::size_t>(d),
                                     std::vector<Rat>(static_cast<std::size_t>(d), Rat(0))),
        Rq = Pq;
    for (const auto& N : minors) {
        const Rat wp = weight(), wr = weight();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Pq[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += wp * N[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                Rq[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += wr * N[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
    }

    // Double images of the same combinations for the Newton polish.
    Eigen::MatrixXd P(d, d), R(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            P(i, j) = rat_double(Pq[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            R(i, j) = rat_double(Rq[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        }
    const double pmax = P.cwiseAbs().maxCoeff(), rmax = R.cwiseAbs().maxCoeff();
    if (!(pmax > 0.0) || !(rmax > 0.0)) return false; // degenerate combination
    P /= pmax;
    R /= rmax;

    // Resultant in v, exactly: interpolate the Sylvester determinant through
    // integer nodes. Floating evaluation is not an option here; for d around
    // 8 the determinant of the 2(d-1) shifted coefficient rows routinely
    // falls below the LU roundoff floor even though the resultant is
    // structurally nonzero, which erases the root structure.
    const int K = 2 * m * m + 1;
    std::vector<Rat> xs(static_cast<std::size_t>(K)), ys(static_cast<std::size_t>(K));
    bool nonzero = false;
    for (int c = 0; c < K; ++c) {
        const int mag = (c + 1) / 2;
        xs[static_cast<std::size_t>(c)] = Rat(c % 2 == 1 ? mag : -mag);
        ys[static_cast<std::size_t>(c)] = sylvester_det_at(Pq, Rq, xs[static_cast<std::size_t>(c)]);
        if (ys[static_cast<std::size_t>(c)] != 0) nonzero = true;
    }
    if (!nonzero) return false; // resultant vanished identically

    std::vector<Cx> uroots = exact_poly_roots(newton_interpolate(xs, std::move(ys)));
    // Deduplicate resultant roots; clustered roots polish to the same pair.
    std::vector<Cx> uniq;
    for (Cx u : uroots) {
        bool dup = false;
        for (Cx prev : uniq)
            if (chordal(prev, u) <= 1e-6) { dup = true; break; }
        if (!dup) uniq.push_back(u);
    }

    const Eigen::MatrixXd Pu = dmat_u(P), Pv = dmat_v(P), Ru = dmat_u(R), Rv = dmat_v(R);
    std::vector<std::pair<Cx, Cx>> accepted;
    std::vector<double> residuals;
    for (Cx ustar : uniq) {
        const Eigen::VectorXcd w = eval_forms(psi, ustar);
        for (const auto& [vstar, pre] : fiber_candidates(psi, w)) {
            if (pre > 1e-2) continue; // cheap gate; the polish and residual decide
            if (chordal(ustar, vstar) <= 1e-7) continue;
            // Newton on the two combined minors.
            Cx u = ustar, v = vstar;
            for (int it = 0; it < 40; ++it) {
                const Cx F0 = beval(P, u, v), F1 = beval(R, u, v);
                const Cx a = beval(Pu, u, v), bq = beval(Pv, u, v);
                const Cx c = beval(Ru, u, v), dq = beval(Rv, u, v);
                const Cx det = a * dq - bq * c;
                if (std::abs(det) < 1e-300) break;
                const Cx du = -(F0 * dq - F1 * bq) / det;
                const Cx dv = -(a * F1 - c * F0) / det;
                u += du;
                v += dv;
                if (!(std::abs(u) < 1e9) || !(std::abs(v) < 1e9)) break;
                if (std::abs(du) + std::abs(dv) <= 1e-15 * (1.0 + std::abs(u) + std::abs(v))) break;
            }
            if (!(std::abs(u) < 1e9) || !(std::abs(v) < 1e9)) continue;
            if (chordal(u, v) <= 1e-7) continue;
            const double res = parallel_residual(eval_forms(psi, u), eval_forms(psi, v));
            if (res <= 1e-6) {
                accepted.emplace_back(u, v);
                residuals.push_back(res);
            } else if (res <= 1e-4) {
                throw ComputeError("node detection is ill conditioned: a candidate pair polished to residual " +
                                   std::to_string(res));
            }
        }
    }

    // Deduplicate unordered pairs.
    out.uv.clear();
    out.residual = 0.0;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        const auto& [u, v] = accepted[i];
        bool dup = false;
        for (const auto& [pu, pv] : out.uv) {
            const bool same = (chordal(u, pu) <= 1e-8 && chordal(v, pv) <= 1e-8) ||
                              (chordal(u, pv) <= 1e-8 && chordal(v, pu) <= 1e-8);
            if (same) { dup = true; break; }
        }
        if (dup) continue;
        out.uv.emplace_back(u, v);
        out.residual = std::max(out.residual, residuals[i]);
    }
    return true;
}

} // namespace detail

/// Detects the nodes of the image of a parametrized rational curve:
/// unordered pairs of distinct parameters in P^1(C) with parallel value
/// vectors. Pairs are classified as crossing (both members real), solitary
/// (complex conjugates of each other), or complex_pair. Parameters within
/// clustering distance 1e-8 are merged; a residual in (1e-6, 1e-4] raises
/// ComputeError instead of silently dropping or keeping the pair.
inline NodeReport detect_nodes(const CurveModel& model) {
    const detail::BinarySystem sys = detail::binary_system(model);
    NodeReport report;
    if (sys.d < 2) return report; // a line has no nodes

    // Integer parameter charts, tried until one has no node at infinity and
    // a nondegenerate resultant. The first is the identity.
    static const int charts[][4] = {{1, 0, 0, 1}, {2, 1, 1, 3},  {1, -2, 1, 1}, {3, 1, 2, -1},
                                    {1, 1, -1, 2}, {5, 2, 3, 4}, {0, 1, 1, 0},  {7, 3, 2, 5}};
    static const std::uint64_t seeds[] = {0x9e3779b97f4a7c15ull, 0x5851f42d4c957f2dull,
                                          0xda3e39cb94b95bdbull};

    for (const auto& ch : charts) {
        const auto psi = detail::mobius_forms(sys, ch[0], ch[1], ch[2], ch[3]);
        const auto psiq = detail::mobius_forms_exact(sys, ch[0], ch[1], ch[2], ch[3]);

        // Reject the chart if the point at infinity participates in a node:
        // any finite parameter whose values are parallel to psi(1 : 0).
        Eigen::VectorXcd winf(static_cast<Eigen::Index>(psi.size()));
        for (std::size_t a = 0; a < psi.size(); ++a)
            winf(static_cast<Eigen::Index>(a)) = detail::Cx(psi[a].back());
        bool infinity_participates = false;
        for (const auto& [v, res] : detail::fiber_candidates(psi, winf))
            if (res <= 1e-6) { infinity_participates = true; break; }
        if (infinity_participates) continue;

        detail::ChartPairs chart;
        bool solved = false;
        for (std::uint64_t seed : seeds)
            if (detail::chart_detect(psi, psiq, sys.d, seed, chart)) { solved = true; break; }
        if (!solved) continue;

        // Map the chart parameters back to the original ones: u on the chart
        // corresponds to (al u + be : ga u + de).
        const double al = ch[0], be = ch[1], ga = ch[2], de = ch[3];
        auto back = [&](detail::Cx u) -> std::pair<detail::Cx, detail::Cx> {
            detail::Cx s0 = al * u + be, s1 = ga * u + de;
            if (std::abs(s0) >= std::abs(s1)) { s1 /= s0; s0 = 1.0; }
            else { s0 /= s1; s1 = 1.0; }
            return {s0, s1};
        };
        auto is_real = [](detail::Cx a0, detail::Cx a1) {
            return std::abs(std::imag(a0 * std::conj(a1))) <= 1e-8 * (std::norm(a0) + std::norm(a1));
        };
        auto sort_key = [](detail::Cx a0, detail::Cx a1) -> std::pair<double, double> {
            if (std::abs(a1) <= 1e-12) return {1e30, 0.0};
            const detail::Cx z = a0 / a1;
            return {z.real(), z.imag()};
        };

        for (const auto& [u, v] : chart.uv) {
            NodePair pair;
            std::tie(pair.s0, pair.s1) = back(u);
            std::tie(pair.t0, pair.t1) = back(v);
            if (sort_key(pair.t0, pair.t1) < sort_key(pair.s0, pair.s1)) {
                std::swap(pair.s0, pair.t0);
                std::swap(pair.s1, pair.t1);
            }
            const bool sreal = is_real(pair.s0, pair.s1), treal = is_real(pair.t0, pair.t1);
            if (sreal && treal) {
                pair.kind = NodeKind::crossing;
            } else {
                const double conj_res = std::abs(std::conj(pair.s0) * pair.t1 - std::conj(pair.s1) * pair.t0);
                const double scale = std::sqrt((std::norm(pair.s0) + std::norm(pair.s1)) *
                                               (std::norm(pair.t0) + std::norm(pair.t1)));
                pair.kind = (conj_res <= 1e-8 * scale) ? NodeKind::solitary : NodeKind::complex_pair;
            }
            pair.residual = detail::parallel_residual(
                detail::eval_forms(psi, u), detail::eval_forms(psi, v));
            report.pairs.push_back(pair);
            report.residual = std::max(report.residual, pair.residual);
        }
        std::sort(report.pairs.begin(), report.pairs.end(), [&](const NodePair& a, const NodePair& b) {
            return std::make_pair(sort_key(a.s0, a.s1), sort_key(a.t0, a.t1)) <
                   std::make_pair(sort_key(b.s0, b.s1), sort_key(b.t0, b.t1));
        });
        return report;
    }
    throw ComputeError("node detection failed: every parameter chart had a node at infinity or a degenerate resultant");
}

/// Real ambient point where the two branches of a node meet, normalized to
/// unit max coordinate with positive leading sign. Throws ComputeError when
/// the image point is not real, which cannot happen for crossing or solitary
/// pairs of a real parametrization.
inline std::vector<double> node_image_point(const CurveModel& model, const NodePair& pair) {
    const detail::BinarySystem sys = detail::binary_system(model);
    const std::size_t n1 = sys.c.size();
    Eigen::VectorXcd w(static_cast<Eigen::Index>(n1));
    for (std::size_t a = 0; a < n1; ++a) {
        // Homogeneous evaluation: coefficient k multiplies s0^k s1^(d-k).
        detail::Cx acc(0.0, 0.0);
        std::vector<detail::Cx> pw(sys.c[a].size());
        detail::Cx s1pow(1.0, 0.0);
        for (std::size_t k = 0; k < pw.size(); ++k) { pw[k] = s1pow; s1pow *= pair.s1; }
        detail::Cx s0pow(1.0, 0.0);
        for (std::size_t k = 0; k < sys.c[a].size(); ++k) {
            acc += detail::Cx(sys.c[a][k]) * s0pow * pw[sys.c[a].size() - 1 - k];
            s0pow *= pair.s0;
        }
        w(static_cast<Eigen::Index>(a)) = acc;
    }
    Eigen::Index astar = 0;
    w.cwiseAbs().maxCoeff(&astar);
    const detail::Cx phase = std::conj(w(astar)) / std::abs(w(astar));
    Eigen::VectorXcd aligned = w * phase;
    double imag = 0.0, scale = 0.0;
    for (Eigen::Index i = 0; i < aligned.size(); ++i) {
        imag = std::max(imag, std::abs(aligned(i).imag()));
        scale = std::max(scale, std::abs(aligned(i)));
    }
    if (imag > 1e-6 * scale) throw ComputeError("node image point is not real");
    std::vector<double> p(n1);
    double mx = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        p[i] = aligned(static_cast<Eigen::Index>(i)).real();
        if (std::abs(p[i]) > std::abs(mx)) mx = p[i];
    }
    for (double& x : p) x /= mx;
    return p;
}

// ---------------------------------------------------------------------------
// Distance-quadric witness
//
// Given j designated real points on the model, all with representatives on
// the chart x0 = 1, the witness is the product of j quadrics
//
//     h_i = sum_{l >= 1} (x_l - q_{i,l} x0)^2 - eps_i x0^2,
//
// each vanishing on the sphere of squared radius eps_i around an auxiliary
// affine center q_i. The center sits at distance sqrt(eps_i) from the
// designated point, so h_i vanishes there, and the closed ball around q_i
// excludes every other sampled real point of the curve, so h_i is strictly
// positive on the rest of the real locus (up to sampling resolution).
// ---------------------------------------------------------------------------

namespace detail {

inline PolyD dpartial(const PolyD& p, int v) {
    PolyD out = PolyD::zero(p.vars());
    for (const auto& [e, c] : p.terms()) {
        if (e[static_cast<std::size_t>(v)] == 0) continue;
        Expo e2 = e;
        e2[static_cast<std::size_t>(v)] -= 1;
        out.add_term(e2, c * e[static_cast<std::size_t>(v)]);
    }
    return out;
}

/// Real curve samples as affine x0 = 1 vectors. Samples with a vanishing
/// first coordinate are dropped: every distance quadric is automatically
/// positive along x0 = 0 since its top form is sum x_l^2.
inline std::vector<std::vector<double>> affine_curve_samples(const CurveModel& model, int target) {
    std::vector<std::vector<double>> ambient;

    if (const auto* pm = std::get_if<PlaneModel>(&model.variant())) {
        // Private pencil sweep. sample_real_points stops once its point
        // budget fills, which can leave whole arcs of the real locus
        // unprobed; exclusion testing needs coverage, not a count, so every
        // ray of every pencil is solved here.
        struct Term {
            int e[3];
            double c;
        };
        std::vector<Term> terms;
        const int d = pm->degree();
        for (const auto& [e, q] : pm->defining_form().terms())
            terms.push_back({{static_cast<int>(e[0]), static_cast<int>(e[1]), static_cast<int>(e[2])},
                             rat_double(q)});
        const double lambda = static_cast<double>(pm->shear_lambda());
        const double bases[][2] = {
            {0.0, 0.0}, {1.0 / 3, 1.0 / 5}, {-2.0 / 5, 1.0 / 7}, {1.0 / 2, -1.0 / 3}, {-1.0 / 4, -2.0 / 7}};
        const int rays = std::max(64, target / 8);
        const double pi = 3.14159265358979323846;
        // Internal charts x2 = 1 over (x0, x1) and x1 = 1 over (x0, x2).
        const int chart_axis[2] = {2, 1};
        const int free_axis[2][2] = {{0, 1}, {0, 2}};
        for (int cc = 0; cc < 2; ++cc) {
            for (const auto& base : bases) {
                for (int k = 0; k < rays; ++k) {
                    const double phi = pi * (k + 0.5) / rays;
                    const double cx = std::cos(phi), sy = std::sin(phi);
                    std::vector<double> u(static_cast<std::size_t>(d) + 1, 0.0);
                    for (const Term& t : terms) {
                        std::vector<double> w = {t.c};
                        auto mul_linear = [&](double a0, double a1, int e) {
                            for (int rep = 0; rep < e; ++rep) {
                                std::vector<double> nw(w.size() + 1, 0.0);
                                for (std::size_t i = 0; i < w.size(); ++i) {
                                    nw[i] += w[i] * a0;
                                    nw[i + 1] += w[i] * a1;
                                }
                                w = std::move(nw);
                            }
                        };
                        mul_linear(base[0], cx, t.e[free_axis[cc][0]]);
                        mul_linear(base[1], sy, t.e[free_axis[cc][1]]);
                        for (std::size_t i = 0; i < w.size(); ++i) u[i] += w[i];
                    }
                    for (double r : real_roots(u)) {
                        std::vector<double> q(3, 0.0);
                        q[static_cast<std::size_t>(free_axis[cc][0])] = base[0] + r * cx;
                        q[static_cast<std::size_t>(free_axis[cc][1])] = base[1] + r * sy;
                        q[static_cast<std::size_t>(chart_axis[cc])] = 1.0;
                        // Internal coordinates back to the original ones.
                        q[0] += lambda * q[1];
                        if (std::isfinite(q[0]) && std::isfinite(q[1]) && std::isfinite(q[2]))
                            ambient.push_back(std::move(q));
                    }
                }
            }
        }
    } else if (std::get_if<ParamModelQ>(&model.variant()) ||
               std::get_if<ParamModelD>(&model.variant())) {
        std::vector<PolyD> forms;
        if (const auto* pq = std::get_if<ParamModelQ>(&model.variant()))
            for (const PolyQ& g : pq->forms()) forms.push_back(poly_to_double(g));
        else
            forms = std::get_if<ParamModelD>(&model.variant())->forms();
        for (const auto& s : sample_real_points(model, target)) {
            std::vector<double> p(forms.size());
            const std::vector<double> par = {s[0], s[1]};
            for (std::size_t a = 0; a < forms.size(); ++a) p[a] = forms[a].eval(par);
            ambient.push_back(std::move(p));
        }
    } else {
        ambient = sample_real_points(model, target);
    }

    std::vector<std::vector<double>> out;
    for (auto& p : ambient) {
        double mx = 0.0;
        for (double x : p) mx = std::max(mx, std::abs(x));
        if (!(mx > 0.0)) continue;
        if (std::abs(p[0]) <= 1e-7 * mx) continue;
        std::vector<double> aff(p.size());
        for (std::size_t l = 0; l < p.size(); ++l) aff[l] = p[l] / p[0];
        out.push_back(std::move(aff));
    }
    return out;
}

/// Relative residual of a claimed real point of the model. Plane models
/// evaluate the defining form; parametrized models search the complex fiber,
/// which is what reaches points whose parameters are complex conjugate
/// (the solitary nodes); ring models contain every point.
inline double membership_residual(const CurveModel& model, const std::vector<double>& p) {
    if (std::get_if<RingModel>(&model.variant())) return 0.0;
    if (const auto* pm = std::get_if<PlaneModel>(&model.variant())) {
        const PolyD h = poly_to_double(pm->defining_form());
        double n2 = 0.0;
        for (double x : p) n2 += x * x;
        n2 = std::sqrt(n2);
        if (!(n2 > 0.0)) throw ParseError("the zero vector is not a projective point");
        std::vector<double> ph(p.size());
        for (std::size_t l = 0; l < p.size(); ++l) ph[l] = p[l] / n2;
        double scale = 0.0;
        for (const auto& [e, c] : h.terms()) scale += std::abs(c);
        return std::abs(h.eval(ph)) / scale;
    }
    const BinarySystem sys = binary_system(model);
    Eigen::VectorXcd w(static_cast<Eigen::Index>(p.size()));
    for (std::size_t a = 0; a < p.size(); ++a) w(static_cast<Eigen::Index>(a)) = Cx(p[a]);
    // Parameter at infinity first, then every finite fiber candidate.
    Eigen::VectorXcd lead(static_cast<Eigen::Index>(sys.c.size()));
    for (std::size_t a = 0; a < sys.c.size(); ++a) lead(static_cast<Eigen::Index>(a)) = Cx(sys.c[a].back());
    double best = parallel_residual(w, lead);
    for (const auto& [v, res] : fiber_candidates(sys.c, w)) best = std::min(best, res);
    return best;
}

} // namespace detail

/// Builds the degree-2j witness for the designated points (one quadric per
/// point), or the constant 1 when j = 0. Throws ParseError on shape errors
/// and ComputeError when a point misses the model, has no x0 = 1
/// representative, cannot be isolated from the sampled real locus, or the
/// assembled witness has a degenerate gradient at a designated point.
inline PolyQ make_nonnegative_witness(const CurveModel& model,
                                      const std::vector<std::vector<double>>& points, int j) {
    const int n1 = model.ambient_vars();
    if (j < 0) throw ParseError("witness degree parameter must be nonnegative");
    if (static_cast<int>(points.size()) != j)
        throw ParseError("witness needs exactly " + std::to_string(j) + " designated points, got " +
                         std::to_string(points.size()));
    if (j == 0) return PolyQ::one(n1);

    std::vector<std::vector<double>> aff;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (static_cast<int>(p.size()) != n1)
            throw ParseError("designated point " + std::to_string(i) + " has " +
                             std::to_string(p.size()) + " coordinates, expected " + std::to_string(n1));
        double mx = 0.0;
        bool ok = true;
        for (double x : p) {
            if (!std::isfinite(x)) ok = false;
            mx = std::max(mx, std::abs(x));
        }
        if (!ok || !(mx > 0.0))
            throw ParseError("designated point " + std::to_string(i) + " is not a projective point");
        if (std::abs(p[0]) <= 1e-9 * mx)
            throw ComputeError("designated point " + std::to_string(i) + " has no representative on the chart x0 = 1");
        const double res = detail::membership_residual(model, p);
        if (res > 1e-9)
            throw ComputeError("designated point " + std::to_string(i) + " is not on the model (residual " +
                               std::to_string(res) + ")");
        std::vector<double> a(p.size());
        for (std::size_t l = 0; l < p.size(); ++l) a[l] = p[l] / p[0];
        aff.push_back(std::move(a));
    }

    std::vector<std::vector<double>> samples = detail::affine_curve_samples(model, 4000);
    for (const auto& a : aff) samples.push_back(a); // balls must exclude the other designated points

    // Direction table on the affine chart: coordinate axes, diagonal pairs,
    // and a few pseudo-random units for curves aligned with all of those.
    const int na = n1 - 1;
    std::vector<std::vector<double>> dirs;
    for (int l = 1; l < n1; ++l) {
        std::vector<double> d1(static_cast<std::size_t>(n1), 0.0), d2(static_cast<std::size_t>(n1), 0.0);
        d1[static_cast<std::size_t>(l)] = 1.0;
        d2[static_cast<std::size_t>(l)] = -1.0;
        dirs.push_back(d1);
        dirs.push_back(d2);
    }
    for (int l = 1; l < n1; ++l)
        for (int k = l + 1; k < n1; ++k)
            for (double sg : {1.0, -1.0}) {
                std::vector<double> d1(static_cast<std::size_t>(n1), 0.0);
                d1[static_cast<std::size_t>(l)] = 1.0 / std::sqrt(2.0);
                d1[static_cast<std::size_t>(k)] = sg / std::sqrt(2.0);
                dirs.push_back(d1);
            }
    {
        std::uint64_t state = 0x8f1bbcdcbfa53e0bull;
        for (int r = 0; r < 8 && na >= 1; ++r) {
            std::vector<double> d1(static_cast<std::size_t>(n1), 0.0);
            double norm = 0.0;
            for (int l = 1; l < n1; ++l) {
                d1[static_cast<std::size_t>(l)] = 2.0 * detail::unit_uniform(state) - 1.0;
                norm += d1[static_cast<std::size_t>(l)] * d1[static_cast<std::size_t>(l)];
            }
            if (!(norm > 1e-8)) continue;
            for (int l = 1; l < n1; ++l) d1[static_cast<std::size_t>(l)] /= std::sqrt(norm);
            dirs.push_back(d1);
        }
    }

    PolyQ witness = PolyQ::one(n1);
    for (std::size_t i = 0; i < aff.size(); ++i) {
        const auto& p = aff[i];
        std::vector<double> q;
        bool placed = false;
        // Descend the radius ladder outside the direction loop so the first
        // success carries the largest workable ball; a larger ball keeps the
        // witness gradient at the designated point healthy.
        for (int s = 1; s <= 24 && !placed; ++s) {
            const double delta = std::ldexp(1.0, -s);
            const double eps = delta * delta;
            for (const auto& dir : dirs) {
                std::vector<double> cand(p.size());
                for (std::size_t l = 0; l < p.size(); ++l) cand[l] = p[l] + delta * dir[l];
                bool ok = true;
                for (const auto& r : samples) {
                    double dpp = 0.0, dqq = 0.0;
                    for (std::size_t l = 1; l < p.size(); ++l) {
                        dpp += (r[l] - p[l]) * (r[l] - p[l]);
                        dqq += (r[l] - cand[l]) * (r[l] - cand[l]);
                    }
                    if (dpp <= 1e-18) continue; // the designated point itself
                    // Samples close to the designated point sit on a branch
                    // through it; the ball is tangent there and the margin is
                    // genuinely small, so they face the exact test. Samples
                    // farther out must clear the ball with 20 percent to
                    // spare, covering curve excursions between samples.
                    const double need =
                        (dpp < 0.25 * eps) ? eps * (1.0 + 1e-10) : eps * 1.44;
                    if (dqq <= need) { ok = false; break; }
                }
                if (ok) {
                    q = std::move(cand);
                    placed = true;
                    break;
                }
            }
        }
        if (!placed)
            throw ComputeError("cannot isolate designated point " + std::to_string(i) +
                               " from the sampled real locus with a distance-quadric ball");

        // Exact rational data: rationalize the point and the center, then set
        // eps to the exact squared distance so h_i vanishes exactly at the
        // rationalized point.
        Rat eps(0);
        std::vector<Rat> qr(p.size(), Rat(0));
        for (std::size_t l = 1; l < p.size(); ++l) {
            qr[l] = rat_of_double(q[l]);
            const Rat dl = rat_of_double(p[l]) - qr[l];
            eps += dl * dl;
        }
        PolyQ h = PolyQ::zero(n1);
        for (int l = 1; l < n1; ++l) {
            const PolyQ lin = PolyQ::variable(n1, l) + PolyQ::variable(n1, 0, -qr[static_cast<std::size_t>(l)]);
            h = h + lin * lin;
        }
        Expo x0sq(static_cast<std::size_t>(n1), 0);
        x0sq[0] = 2;
        h.add_term(x0sq, -eps);
        witness = witness * h;
    }

    // The witness must actually vanish to first order only: reject a
    // degenerate gradient at any designated point (stacked or misplaced
    // balls), relative to the coefficient and point scale.
    const PolyD wd = poly_to_double(witness);
    double coefmax = 0.0;
    for (const auto& [e, c] : wd.terms()) coefmax = std::max(coefmax, std::abs(c));
    std::vector<PolyD> grads;
    for (int v = 0; v < n1; ++v) grads.push_back(detail::dpartial(wd, v));
    for (std::size_t i = 0; i < aff.size(); ++i) {
        double g2 = 0.0, pn = 0.0;
        for (double x : aff[i]) pn += x * x;
        pn = std::sqrt(pn);
        for (int v = 0; v < n1; ++v) {
            const double g = grads[static_cast<std::size_t>(v)].eval(aff[i]);
            g2 += g * g;
        }
        const double rel = std::sqrt(g2) /
                           (coefmax * std::pow(std::max(1.0, pn), 2.0 * j - 1.0) * (2.0 * j));
        if (!(rel >= 1e-6))
            throw ComputeError("witness gradient degenerates at designated point " + std::to_string(i) +
                               " (relative size " + std::to_string(rel) + ")");
    }
    return witness;
}

} // namespace sosmult
