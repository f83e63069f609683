#pragma once

// Pointedness of the degree-2j sums-of-squares cone on a model. The verdict
// comes with a checkable witness: a functional whose catalecticant is
// positive definite when the cone is pointed, or a nonzero positive
// semidefinite Gram matrix whose square sum vanishes on the model when it is
// not. When neither witness can be pinned down the verdict stays undecided
// and the note says why; it is never silently resolved.

#include <sosmult/linalg_exact.hpp>
#include <sosmult/models.hpp>
#include <sosmult/moment.hpp>
#include <sosmult/sampling.hpp>
#include <sosmult/sdp.hpp>
#include <sosmult/sym_eig.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sosmult {

enum class Pointedness { Pointed, NotPointed, Undecided };

struct PointedReport {
    Pointedness verdict = Pointedness::Undecided;
    int j = 0;
    /// Pointed witness: unit-norm functional on R_{2j} whose degree-j
    /// catalecticant is positive definite.
    std::optional<MomentFunctional> functional;
    /// Its smallest eigenvalue divided by trace/order (scale free).
    double functional_margin = 0.0;
    /// Not-pointed witness: unit-trace PSD Gram matrix over the degree-j
    /// basis whose square sum vanishes on the model.
    Eigen::MatrixXd gram;
    /// Infinity norm of the witness square sum in R_{2j} coordinates.
    double gram_residual = 0.0;
    /// True when the residual was evaluated in rational arithmetic.
    bool residual_exact = false;
    std::string note;
};

namespace detail {

/// Degree-2j coordinates of every basis product b_a * b_b, a <= b.
struct SquareSumMap {
    std::vector<std::pair<int, int>> pairs;
    std::vector<VecQ> prod_q;            // exact models only
    std::vector<Eigen::VectorXd> prod_d; // always filled
    int p = 0;                           // HF(j)
    int n = 0;                           // HF(2j)
};

inline SquareSumMap square_sum_map(const CurveModel& model, int j) {
    SquareSumMap m;
    m.p = model.hilbert_function(j);
    m.n = model.hilbert_function(2 * j);
    if (m.p <= 0 || m.n <= 0) throw ComputeError("square-sum map over an empty graded piece");
    m.pairs = sym_pairs(m.p);
    if (model.is_exact()) {
        const std::vector<VecQ> units = coordinate_units_exact(m.p);
        for (const auto& [a, b] : m.pairs)
            m.prod_q.push_back(model.multiply(j, units[static_cast<std::size_t>(a)], j,
                                              units[static_cast<std::size_t>(b)]));
        for (const VecQ& v : m.prod_q) {
            Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
            for (std::size_t i = 0; i < v.size(); ++i)
                x[static_cast<Eigen::Index>(i)] = rat_double(v[i]);
            m.prod_d.push_back(std::move(x));
        }
    } else {
        const std::vector<Eigen::VectorXd> units = coordinate_units(m.p);
        for (const auto& [a, b] : m.pairs)
            m.prod_d.push_back(model.multiply_d(j, units[static_cast<std::size_t>(a)], j,
                                                units[static_cast<std::size_t>(b)]));
    }
    return m;
}

inline MatQ unpack_sym_exact(int p, const VecQ& g, int sign) {
    MatQ G(p, p);
    std::size_t idx = 0;
    for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b, ++idx) {
            G(a, b) = sign > 0 ? g[idx] : -g[idx];
            G(b, a) = G(a, b);
        }
    return G;
}

/// Square sum of a float symmetric matrix through the exact product table;
/// entries are promoted to rationals, so the result is the exact image of
/// the reported witness.
inline VecQ square_sum_exact(const SquareSumMap& map, const Eigen::MatrixXd& G) {
    VecQ out(static_cast<std::size_t>(map.n), Rat(0));
    for (std::size_t idx = 0; idx < map.pairs.size(); ++idx) {
        const auto [a, b] = map.pairs[idx];
        const Rat w = rat_of_double(G(a, b)) * (a == b ? 1 : 2);
        if (w == 0) continue;
        for (std::size_t r = 0; r < out.size(); ++r) out[r] += w * map.prod_q[idx][r];
    }
    return out;
}

inline double square_sum_residual_d(const SquareSumMap& map, const Eigen::MatrixXd& G) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(map.n);
    for (std::size_t idx = 0; idx < map.pairs.size(); ++idx) {
        const auto [a, b] = map.pairs[idx];
        out += (a == b ? 1.0 : 2.0) * G(a, b) * map.prod_d[idx];
    }
    return out.lpNorm<Eigen::Infinity>();
}

} // namespace detail

/// Decide whether the sums-of-squares cone in degree 2j is pointed.
/// Exact models get their square-sum kernel computed in rational arithmetic
/// first; evaluation averages over sampled real points supply the positive
/// definite witness when one exists, and the semidefinite feasibility
/// problem "PSD Gram, vanishing square sum, unit trace" settles the rest in
/// either direction (its Farkas dual is a positive definite catalecticant).
inline PointedReport check_pointed(const CurveModel& model, int j, double delta = 1e-6,
                                   const SdpOptions& options = {}) {
    if (j < 0) throw ParseError("pointedness half-degree must be nonnegative");
    if (!(delta > 0.0)) throw ParseError("pointedness margin must be positive");
    PointedReport rep;
    rep.j = j;
    const detail::SquareSumMap map = detail::square_sum_map(model, j);
    const int p = map.p;
    const int N = map.n;

    std::vector<VecQ> kernel;
    if (model.is_exact()) {
        MatQ M(N, static_cast<int>(map.pairs.size()));
        for (std::size_t idx = 0; idx < map.pairs.size(); ++idx) {
            const auto [a, b] = map.pairs[idx];
            const Rat w = (a == b) ? 1 : 2;
            for (int r = 0; r < N; ++r)
                M(r, static_cast<int>(idx)) = w * map.prod_q[idx][static_cast<std::size_t>(r)];
        }
        kernel = rank_and_nullspace(M).nullspace;
        for (const VecQ& g : kernel) {
            for (int sign : {1, -1}) {
                const MatQ G = detail::unpack_sym_exact(p, g, sign);
                if (!exact_psd(G)) continue;
                Rat tr(0);
                for (int a = 0; a < p; ++a) tr += G(a, a);
                // a nonzero PSD matrix has positive trace
                rep.gram.resize(p, p);
                for (int a = 0; a < p; ++a)
                    for (int b = 0; b < p; ++b) rep.gram(a, b) = rat_double(G(a, b) / tr);
                rep.verdict = Pointedness::NotPointed;
                rep.gram_residual = 0.0;
                rep.residual_exact = true;
                rep.note = "exact kernel basis vector of the square-sum map is positive semidefinite";
                return rep;
            }
        }
    }

    // evaluation averages over sampled real points
    {
        int want = std::max(2 * N, 16);
        for (int round = 0; round < 3; ++round, want *= 2) {
            const std::vector<std::vector<double>> pts = sample_real_points(model, want);
            if (static_cast<int>(pts.size()) < N) break;
            Eigen::VectorXd ell = Eigen::VectorXd::Zero(N);
            for (const auto& P : pts) {
                const std::vector<double> vals = model.eval_basis(2 * j, P);
                Eigen::VectorXd w(static_cast<Eigen::Index>(vals.size()));
                for (std::size_t i = 0; i < vals.size(); ++i)
                    w[static_cast<Eigen::Index>(i)] = vals[i];
                const double nw = w.norm();
                if (nw > 0.0 && std::isfinite(nw)) ell += w / nw;
            }
            const double ne = ell.norm();
            if (!(ne > 0.0)) break;
            const MomentFunctional L(model, 2 * j, ell / ne);
            const Eigen::MatrixXd C = catalecticant(model, L, j);
            const double tr = C.trace();
            if (!(tr > 0.0)) continue;
            const double ratio = min_eigenvalue(C) / (tr / p);
            if (ratio >= delta) {
                rep.verdict = Pointedness::Pointed;
                rep.functional = L;
                rep.functional_margin = ratio;
                rep.note = "positive definite catalecticant of an evaluation average over " +
                           std::to_string(pts.size()) + " real points";
                return rep;
            }
        }
    }

    // PSD Gram with vanishing square sum and unit trace
    SdpProblem prob;
    prob.block_orders = {p};
    for (int r = 0; r < N; ++r) {
        SdpConstraint con;
        con.rhs = 0.0;
        for (std::size_t idx = 0; idx < map.pairs.size(); ++idx) {
            const auto [a, b] = map.pairs[idx];
            con.terms.push_back({0, a, b, (a == b ? 1.0 : 2.0) * map.prod_d[idx][r]});
        }
        prob.constraints.push_back(std::move(con));
    }
    {
        SdpConstraint tr;
        tr.rhs = 1.0;
        for (int a = 0; a < p; ++a) tr.terms.push_back({0, a, a, 1.0});
        prob.constraints.push_back(std::move(tr));
        prob.normalization = N;
    }

    const SdpOutcome out = solve_feasibility(prob, options);

    if (const auto* ray = std::get_if<SdpSeparatorRay>(&out)) {
        Eigen::VectorXd ell = -ray->dual.head(N);
        const double nrm = ell.norm();
        if (nrm > 0.0) {
            const MomentFunctional L(model, 2 * j, ell / nrm);
            const Eigen::MatrixXd C = catalecticant(model, L, j);
            const double tr = C.trace();
            const double ratio = tr > 0.0 ? min_eigenvalue(C) / (tr / p) : -1.0;
            if (ratio >= delta) {
                rep.verdict = Pointedness::Pointed;
                rep.functional = L;
                rep.functional_margin = ratio;
                rep.note = "Farkas dual of the vanishing-square-sum problem";
                return rep;
            }
            std::ostringstream os;
            os << "separator ray gave catalecticant margin " << ratio << " below " << delta;
            rep.note = os.str();
        } else {
            rep.note = "separator ray has no component on the square-sum rows";
        }
        return rep;
    }

    if (const auto* fz = std::get_if<SdpFeasible>(&out)) {
        const Eigen::MatrixXd& X = fz->blocks[0];
        if (!model.is_exact()) {
            const double trX = X.trace();
            if (trX > 1e-8) {
                const Eigen::MatrixXd W = X / trX;
                const double res = detail::square_sum_residual_d(map, W);
                if (res <= 1e-9 && min_eigenvalue(W) >= -1e-10) {
                    rep.verdict = Pointedness::NotPointed;
                    rep.gram = W;
                    rep.gram_residual = res;
                    rep.residual_exact = false;
                    rep.note = "solver Gram with a numerically vanishing square sum";
                    return rep;
                }
            }
            rep.note = "solver Gram did not meet the vanishing-square-sum tolerance";
            return rep;
        }
        if (kernel.empty()) {
            rep.note = "solver reported a vanishing square sum but the square-sum map has trivial kernel";
            return rep;
        }

        // alternate between the exact kernel span and the PSD cone, ending
        // on the PSD side, then measure the square sum of the result exactly
        const Eigen::Index np = static_cast<Eigen::Index>(map.pairs.size());
        const Eigen::Index kap = static_cast<Eigen::Index>(kernel.size());
        const double rt2 = std::sqrt(2.0);
        Eigen::MatrixXd B(np, kap);
        for (Eigen::Index k = 0; k < kap; ++k)
            for (std::size_t idx = 0; idx < map.pairs.size(); ++idx) {
                const auto [a, b] = map.pairs[idx];
                B(static_cast<Eigen::Index>(idx), k) =
                    rat_double(kernel[static_cast<std::size_t>(k)][idx]) * (a == b ? 1.0 : rt2);
            }
        const Eigen::LDLT<Eigen::MatrixXd> span(B.transpose() * B);
        auto to_svec = [&](const Eigen::MatrixXd& G) {
            Eigen::VectorXd s(np);
            for (std::size_t idx = 0; idx < map.pairs.size(); ++idx) {
                const auto [a, b] = map.pairs[idx];
                s[static_cast<Eigen::Index>(idx)] = G(a, b) * (a == b ? 1.0 : rt2);
            }
            return s;
        };
        auto from_svec = [&](const Eigen::VectorXd& s) {
            Eigen::MatrixXd G(p, p);
            for (std::size_t idx = 0; idx < map.pairs.size(); ++idx) {
                const auto [a, b] = map.pairs[idx];
                const double v = s[static_cast<Eigen::Index>(idx)] / (a == b ? 1.0 : rt2);
                G(a, b) = v;
                G(b, a) = v;
            }
            return G;
        };

        Eigen::MatrixXd G = 0.5 * (X + X.transpose());
        bool ok = false;
        for (int it = 0; it < 200; ++it) {
            Eigen::VectorXd s = to_svec(G);
            const Eigen::VectorXd inspan = B * span.solve(B.transpose() * s);
            const double drift = (s - inspan).norm();
            G = from_svec(inspan);
            const SymEig eg = sym_eig(G);
            Eigen::MatrixXd R = Eigen::MatrixXd::Zero(p, p);
            for (int i = 0; i < p; ++i) {
                const double lam = std::max(eg.values[i], 0.0);
                if (lam > 0.0) R += lam * eg.vectors.col(i) * eg.vectors.col(i).transpose();
            }
            const double trR = R.trace();
            if (!(trR > 1e-12)) break;
            G = 0.5 * (R + R.transpose()) / trR;
            if (it > 2 && drift <= 1e-14 * (1.0 + s.norm())) {
                ok = true;
                break;
            }
        }
        if (ok) {
            const VecQ sig = detail::square_sum_exact(map, G);
            Rat worst(0);
            for (const Rat& v : sig) {
                const Rat av = v < 0 ? -v : v;
                if (av > worst) worst = av;
            }
            const double res = rat_double(worst);
            if (res <= 1e-9) {
                rep.verdict = Pointedness::NotPointed;
                rep.gram = G;
                rep.gram_residual = res;
                rep.residual_exact = true;
                rep.note = "solver Gram projected onto the exact square-sum kernel";
                return rep;
            }
            std::ostringstream os;
            os << "projected Gram keeps an exact square-sum residual of " << res;
            rep.note = os.str();
            return rep;
        }
        rep.note = "projection between the kernel span and the PSD cone did not converge";
        return rep;
    }

    const auto& ind = std::get<SdpIndeterminate>(out);
    rep.note = "feasibility solve stalled: " + ind.diagnostic;
    return rep;
}

} // namespace sosmult
