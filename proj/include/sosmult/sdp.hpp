#pragma once

// Dense semidefinite feasibility solver for small block problems: find PSD
// blocks X satisfying sparse symmetric equality constraints, or produce a
// dual improving ray proving that none exist.  Primal-dual path following on
// the homogeneous self-dual embedding with Nesterov-Todd scaling and a
// Mehrotra-style adaptive centering parameter; everything is dense and
// deterministic.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "sosmult/errors.hpp"
#include "sosmult/sym_eig.hpp"

namespace sosmult {

/// One coefficient of a constraint functional: applies to entry (i, j) of a
/// block with i <= j, counting that entry once in the symmetric matrix.
struct SdpTerm {
    int block = 0;
    int i = 0;
    int j = 0;
    double coef = 0.0;
};

struct SdpConstraint {
    std::vector<SdpTerm> terms;
    double rhs = 0.0;
};

struct SdpProblem {
    std::vector<int> block_orders;
    std::vector<SdpConstraint> constraints;
    int normalization = -1; ///< index of the designated trace row, -1 if none

    void validate() const {
        if (block_orders.empty()) throw ComputeError("SDP needs at least one block");
        for (int n : block_orders)
            if (n < 1) throw ComputeError("SDP block orders must be positive");
        if (constraints.empty()) throw ComputeError("SDP needs at least one constraint");
        for (const SdpConstraint& c : constraints) {
            if (!std::isfinite(c.rhs)) throw ComputeError("SDP right-hand side is not finite");
            for (const SdpTerm& t : c.terms) {
                if (t.block < 0 || t.block >= static_cast<int>(block_orders.size()))
                    throw ComputeError("SDP term names a missing block");
                const int n = block_orders[static_cast<std::size_t>(t.block)];
                if (t.i < 0 || t.j < t.i || t.j >= n)
                    throw ComputeError("SDP term must index the upper triangle of its block");
                if (!std::isfinite(t.coef)) throw ComputeError("SDP coefficient is not finite");
            }
        }
        if (normalization < -1 || normalization >= static_cast<int>(constraints.size()))
            throw ComputeError("SDP normalization row index is out of range");
    }
};

struct SdpOptions {
    double eps_feas = 1e-8;
    double eps_gap = 1e-11;
    int max_iter = 200;
};

struct SdpFeasible {
    std::vector<Eigen::MatrixXd> blocks;
    double residual = 0.0;        ///< infinity norm over all constraint rows
    double min_eigenvalue = 0.0;  ///< smallest eigenvalue over all blocks
    int iterations = 0;
};

struct SdpSeparatorRay {
    Eigen::VectorXd dual;        ///< unit Euclidean norm, one entry per constraint
    double objective = 0.0;      ///< rhs . dual, strictly positive
    double slack_margin = 0.0;   ///< min eigenvalue of -A*(dual)
    int iterations = 0;
};

struct SdpIndeterminate {
    std::string diagnostic;
    int iterations = 0;
    double mu = 0.0;
    double tau = 0.0;
    double kappa = 0.0;
    double residual = 0.0;
};

using SdpOutcome = std::variant<SdpFeasible, SdpSeparatorRay, SdpIndeterminate>;

namespace detail {

class HsdSolver {
public:
    HsdSolver(const SdpProblem& problem, const SdpOptions& options)
        : P(problem), opts(options) {
        P.validate();
        if (opts.eps_feas <= 0 || opts.eps_gap <= 0)
            throw ComputeError("SDP tolerances must be positive");
        if (opts.max_iter < 1) throw ComputeError("SDP iteration budget must be positive");
        nblocks = static_cast<int>(P.block_orders.size());
        nrows = static_cast<int>(P.constraints.size());
        A.resize(static_cast<std::size_t>(nrows));
        for (int c = 0; c < nrows; ++c) {
            auto& row = A[static_cast<std::size_t>(c)];
            row.reserve(static_cast<std::size_t>(nblocks));
            for (int blk = 0; blk < nblocks; ++blk)
                row.push_back(Eigen::MatrixXd::Zero(order(blk), order(blk)));
            for (const SdpTerm& t : P.constraints[static_cast<std::size_t>(c)].terms) {
                auto& M = row[static_cast<std::size_t>(t.block)];
                if (t.i == t.j) {
                    M(t.i, t.i) += t.coef;
                } else {
                    M(t.i, t.j) += 0.5 * t.coef;
                    M(t.j, t.i) += 0.5 * t.coef;
                }
            }
        }
        b.resize(nrows);
        for (int c = 0; c < nrows; ++c) b[c] = P.constraints[static_cast<std::size_t>(c)].rhs;
        nu = 0;
        for (int blk = 0; blk < nblocks; ++blk) nu += order(blk);
    }

    SdpOutcome run() {
        std::vector<Eigen::MatrixXd> X, S, W;
        for (int blk = 0; blk < nblocks; ++blk) {
            X.push_back(Eigen::MatrixXd::Identity(order(blk), order(blk)));
            S.push_back(Eigen::MatrixXd::Identity(order(blk), order(blk)));
            W.push_back(Eigen::MatrixXd::Identity(order(blk), order(blk)));
        }
        Eigen::VectorXd y = Eigen::VectorXd::Zero(nrows);
        double tau = 1.0, kappa = 1.0;

        double last_primal_residual = std::numeric_limits<double>::infinity();
        double last_ray_objective = 0.0;
        int tiny_steps = 0;

        // A stalled run whose candidate is nearly primal feasible usually
        // means the feasible region has empty interior: the iterates hug a
        // boundary face and the scaled directions drown the last digits of
        // the residual. Before reporting the stall, polish the candidate at
        // the rank its spectrum suggests.
        const auto stall_or_finish = [&](const char* why, int it, double mu_, double tau_,
                                         double kappa_) -> SdpOutcome {
            if (last_primal_residual <= 1e-3) {
                SdpOutcome finished;
                if (try_rank_polish(X, tau, it, finished)) return finished;
            }
            return stall(why, it, mu_, tau_, kappa_, last_primal_residual, last_ray_objective);
        };

        for (int iter = 0; iter <= opts.max_iter; ++iter) {
            // Complementarity measure.
            double gap = tau * kappa;
            for (int blk = 0; blk < nblocks; ++blk)
                gap += (X[static_cast<std::size_t>(blk)].array() *
                        S[static_cast<std::size_t>(blk)].array())
                           .sum();
            const double mu = gap / static_cast<double>(nu + 1);

            // Candidate primal point X / tau.
            {
                Eigen::VectorXd res = applyA(X) / tau - b;
                last_primal_residual = res.lpNorm<Eigen::Infinity>();
                if (last_primal_residual <= opts.eps_feas) {
                    double mineig = std::numeric_limits<double>::infinity();
                    std::vector<Eigen::MatrixXd> blocks;
                    for (int blk = 0; blk < nblocks; ++blk) {
                        blocks.push_back(X[static_cast<std::size_t>(blk)] / tau);
                        mineig = std::min(mineig, min_eig_estimate(blocks.back()));
                    }
                    if (mineig >= -opts.eps_feas)
                        return SdpFeasible{std::move(blocks), last_primal_residual, mineig, iter};
                }
            }

            // Candidate dual improving ray y / |y|.
            const double ynorm = y.norm();
            if (ynorm > 0) {
                const Eigen::VectorXd yh = y / ynorm;
                const double obj = b.dot(yh);
                last_ray_objective = obj;
                if (obj > 10.0 * opts.eps_feas) {
                    double minz = std::numeric_limits<double>::infinity();
                    for (int blk = 0; blk < nblocks; ++blk) {
                        Eigen::MatrixXd Z = -applyAT(yh, blk);
                        minz = std::min(minz, min_eig_estimate(Z));
                    }
                    if (minz >= -opts.eps_feas)
                        return SdpSeparatorRay{yh, obj, minz, iter};
                }
            }

            if (iter == opts.max_iter)
                return stall_or_finish("iteration budget exhausted", iter, mu, tau, kappa);
            if (mu <= opts.eps_gap && tau * kappa <= opts.eps_gap)
                return stall_or_finish("path converged without a usable primal point or dual ray",
                                       iter, mu, tau, kappa);

            // Residuals of the self-dual system.
            Eigen::VectorXd Rp = b * tau - applyA(X);
            std::vector<Eigen::MatrixXd> Rd;
            for (int blk = 0; blk < nblocks; ++blk)
                Rd.push_back(-applyAT(y, blk) - S[static_cast<std::size_t>(blk)]);
            const double Rg = kappa - b.dot(y);

            // Nesterov-Todd scaling per block.
            bool scaled = true;
            for (int blk = 0; blk < nblocks; ++blk) {
                auto& Xb = X[static_cast<std::size_t>(blk)];
                auto& Sb = S[static_cast<std::size_t>(blk)];
                if (!nt_scaling(Xb, Sb, W[static_cast<std::size_t>(blk)])) {
                    scaled = false;
                    break;
                }
            }
            if (!scaled)
                return stall_or_finish("an iterate left the cone while computing the scaling point",
                                       iter, mu, tau, kappa);

            // Predictor: aim at mu = 0.
            std::vector<Eigen::MatrixXd> RcAff;
            for (int blk = 0; blk < nblocks; ++blk)
                RcAff.push_back(-X[static_cast<std::size_t>(blk)]);
            Step aff;
            if (!newton(W, Rp, Rd, Rg, RcAff, -tau * kappa, y, tau, kappa, aff))
                return stall_or_finish("Schur complement factorization failed", iter, mu, tau,
                                       kappa);
            const double alpha_aff =
                std::min(1.0, max_step(X, S, tau, kappa, aff));
            double gap_aff = (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa);
            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                gap_aff += ((X[bi] + alpha_aff * aff.dX[bi]).array() *
                            (S[bi] + alpha_aff * aff.dS[bi]).array())
                               .sum();
            }
            const double mu_aff = std::max(gap_aff, 0.0) / static_cast<double>(nu + 1);
            double sigma = std::pow(mu_aff / mu, 3);
            sigma = std::min(std::max(sigma, 1e-8), 0.99);

            // Corrector: recenter toward sigma * mu.
            std::vector<Eigen::MatrixXd> Rc;
            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                Eigen::MatrixXd Sinv;
                if (!sym_inverse(S[bi], Sinv))
                    return stall_or_finish("dual iterate became numerically singular", iter, mu,
                                           tau, kappa);
                Rc.push_back(sigma * mu * Sinv - X[bi]);
            }
            const double Rtk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
            Step step;
            if (!newton(W, Rp, Rd, Rg, Rc, Rtk, y, tau, kappa, step))
                return stall_or_finish("Schur complement factorization failed", iter, mu, tau,
                                       kappa);

            const double alpha = std::min(1.0, 0.98 * max_step(X, S, tau, kappa, step));
            if (alpha < 1e-9) {
                if (++tiny_steps >= 3)
                    return stall_or_finish("step sizes collapsed", iter, mu, tau, kappa);
            } else {
                tiny_steps = 0;
            }

            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                X[bi] += alpha * step.dX[bi];
                S[bi] += alpha * step.dS[bi];
                X[bi] = 0.5 * (X[bi] + X[bi].transpose()).eval();
                S[bi] = 0.5 * (S[bi] + S[bi].transpose()).eval();
            }
            y += alpha * step.dy;
            tau += alpha * step.dtau;
            kappa += alpha * step.dkappa;
            if (!(tau > 0) || !(kappa > 0))
                return stall("homogenizing variables left the positive orthant", iter, mu, tau,
                             kappa, last_primal_residual, last_ray_objective);

            // The embedded system is jointly homogeneous in (X, y, S, tau,
            // kappa), so the iterate can be rescaled freely. Pinning its
            // largest component at unit size keeps tau and kappa from
            // running off and exhausting double precision on problems whose
            // optimal face is singular.
            double scale = std::max(tau, kappa);
            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                scale = std::max(scale, max_abs(X[bi]));
                scale = std::max(scale, max_abs(S[bi]));
            }
            if (y.size() > 0) scale = std::max(scale, y.lpNorm<Eigen::Infinity>());
            const double inv = 1.0 / scale;
            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                X[bi] *= inv;
                S[bi] *= inv;
            }
            y *= inv;
            tau *= inv;
            kappa *= inv;
        }
        return stall_or_finish("iteration budget exhausted", opts.max_iter, 0.0, tau, kappa);
    }

private:
    struct Step {
        std::vector<Eigen::MatrixXd> dX, dS;
        Eigen::VectorXd dy;
        double dtau = 0.0;
        double dkappa = 0.0;
    };

    int order(int blk) const { return P.block_orders[static_cast<std::size_t>(blk)]; }

    Eigen::VectorXd applyA(const std::vector<Eigen::MatrixXd>& Xs) const {
        Eigen::VectorXd v(nrows);
        for (int c = 0; c < nrows; ++c) {
            double acc = 0.0;
            for (int blk = 0; blk < nblocks; ++blk)
                acc += (A[static_cast<std::size_t>(c)][static_cast<std::size_t>(blk)].array() *
                        Xs[static_cast<std::size_t>(blk)].array())
                           .sum();
            v[c] = acc;
        }
        return v;
    }

    Eigen::MatrixXd applyAT(const Eigen::VectorXd& yv, int blk) const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(order(blk), order(blk));
        for (int c = 0; c < nrows; ++c)
            if (yv[c] != 0.0)
                M += yv[c] * A[static_cast<std::size_t>(c)][static_cast<std::size_t>(blk)];
        return M;
    }

    /// Finisher for feasible problems without strictly feasible points.
    /// The interior-point iterates then converge toward a boundary face of
    /// the cone, strict complementarity fails, and the scaled Newton
    /// directions stop improving the primal residual a couple of digits
    /// short of the tolerance. The candidate's eigenvalue gap reveals the
    /// face: keep each block's clearly positive eigenspace, restrict every
    /// constraint to it, and re-solve the smaller problem, which typically
    /// is strictly feasible relative to the face. Lifting back makes the
    /// off-face eigenvalues exactly zero, so both acceptance gates pass at
    /// full strictness. Recursion peels further faces if the first guess
    /// was too timid; rays and stalls of the reduced problem abandon the
    /// attempt and the caller reports its own stall.
    /// Finishing step for stalled runs near a boundary face.
    ///
    /// When the feasible region has empty interior the candidate X / tau
    /// stalls with a primal residual a few orders above eps_feas, and its
    /// small eigenvalues identify the active face only to about the same
    /// accuracy. Re-solving on that frozen span cannot reach the gate: the
    /// span itself is off by more than eps_feas. Instead, factor the
    /// candidate as X_b = U_b U_b^T with the rank suggested by its spectrum
    /// and run Gauss-Newton on A(U U^T) = b over the factors. The span is
    /// free to rotate, the iterate stays positive semidefinite by
    /// construction, and near a transversal solution the residual drops to
    /// solver precision in a handful of steps. Underestimating the rank
    /// shows up as a residual floor, so a short ladder of more generous
    /// ranks backs the guess up.
    bool try_rank_polish(const std::vector<Eigen::MatrixXd>& X, double tau, int iters_so_far,
                         SdpOutcome& out) const {
        std::vector<Eigen::VectorXd> vals(static_cast<std::size_t>(nblocks));
        std::vector<Eigen::MatrixXd> vecs(static_cast<std::size_t>(nblocks));
        for (int blk = 0; blk < nblocks; ++blk) {
            const auto bi = static_cast<std::size_t>(blk);
            if (!eig_sym(X[bi] / tau, vals[bi], vecs[bi])) return false;
        }

        // Base rank per block: drop the bottom eigenvalue group under the
        // largest multiplicative gap, restricted to values small enough to
        // plausibly be zero. No convincing gap keeps the block whole.
        std::vector<int> base(static_cast<std::size_t>(nblocks));
        for (int blk = 0; blk < nblocks; ++blk) {
            const auto bi = static_cast<std::size_t>(blk);
            const int n = static_cast<int>(vals[bi].size());
            const double top = std::max(vals[bi][n - 1], 0.0);
            const double zone = 1e-2 * (1.0 + top);
            int cut = 0;
            double best = 30.0;
            for (int i = 0; i + 1 < n; ++i) {
                if (vals[bi][i] > zone) break;
                const double lo = std::max(vals[bi][i], 1e-14);
                const double ratio = std::max(vals[bi][i + 1], 0.0) / lo;
                if (ratio >= best) {
                    best = ratio;
                    cut = i + 1;
                }
            }
            base[bi] = n - cut;
        }

        // Rank ladder: the gap-based guess, then one extra direction per
        // block, then one extra everywhere.
        std::vector<std::vector<int>> ladder;
        ladder.push_back(base);
        for (int blk = 0; blk < nblocks; ++blk) {
            std::vector<int> r = base;
            const auto bi = static_cast<std::size_t>(blk);
            if (r[bi] < vals[bi].size()) {
                ++r[bi];
                ladder.push_back(std::move(r));
            }
        }
        {
            std::vector<int> r = base;
            bool grew = false;
            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                if (r[bi] < vals[bi].size()) {
                    ++r[bi];
                    grew = true;
                }
            }
            if (grew) ladder.push_back(std::move(r));
        }

        for (const auto& ranks : ladder) {
            std::vector<Eigen::MatrixXd> U(static_cast<std::size_t>(nblocks));
            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                const int n = static_cast<int>(vals[bi].size());
                const int r = ranks[bi];
                U[bi].resize(n, r);
                for (int j = 0; j < r; ++j) {
                    const int src = n - r + j;
                    // Floor keeps barely-negative kept eigenvalues active.
                    const double w = std::sqrt(std::max(vals[bi][src], 1e-10));
                    U[bi].col(j) = vecs[bi].col(src) * w;
                }
            }
            double residual = 0.0;
            if (!gauss_newton_factors(U, residual)) continue;
            if (residual > opts.eps_feas) continue;
            std::vector<Eigen::MatrixXd> blocks;
            double mineig = std::numeric_limits<double>::infinity();
            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                Eigen::MatrixXd M = U[bi] * U[bi].transpose();
                M = 0.5 * (M + M.transpose()).eval();
                mineig = std::min(mineig, min_eig_estimate(M));
                blocks.push_back(std::move(M));
            }
            if (mineig < -opts.eps_feas) continue;
            out = SdpFeasible{std::move(blocks), residual, mineig, iters_so_far};
            return true;
        }
        return false;
    }

    /// Gauss-Newton on the factored feasibility system A(U U^T) = b using
    /// least-norm steps. True on convergence to a stationary residual,
    /// returned in `residual` as the final infinity norm.
    bool gauss_newton_factors(std::vector<Eigen::MatrixXd>& U, double& residual) const {
        int unknowns = 0;
        for (int blk = 0; blk < nblocks; ++blk) {
            const auto bi = static_cast<std::size_t>(blk);
            unknowns += static_cast<int>(U[bi].rows() * U[bi].cols());
        }
        const auto eval_res = [&](const std::vector<Eigen::MatrixXd>& F) {
            Eigen::VectorXd r(nrows);
            for (int c = 0; c < nrows; ++c) {
                double acc = -b[c];
                for (int blk = 0; blk < nblocks; ++blk) {
                    const auto bi = static_cast<std::size_t>(blk);
                    const auto& Ac = A[static_cast<std::size_t>(c)][bi];
                    if (F[bi].cols() > 0)
                        acc += (F[bi].transpose() * Ac * F[bi]).trace();
                }
                r[c] = acc;
            }
            return r;
        };

        Eigen::VectorXd res = eval_res(U);
        for (int pass = 0; pass < 50; ++pass) {
            const double rn = res.lpNorm<Eigen::Infinity>();
            if (rn <= 1e-2 * opts.eps_feas) break;

            // Rows of the Jacobian: d<A_c, U U^T>/dU_b = 2 A_cb U_b.
            Eigen::MatrixXd J(nrows, unknowns);
            for (int c = 0; c < nrows; ++c) {
                int at = 0;
                for (int blk = 0; blk < nblocks; ++blk) {
                    const auto bi = static_cast<std::size_t>(blk);
                    const auto& Ac = A[static_cast<std::size_t>(c)][bi];
                    const int sz = static_cast<int>(U[bi].rows() * U[bi].cols());
                    if (sz > 0) {
                        const Eigen::MatrixXd G = 2.0 * (Ac * U[bi]);
                        J.row(c).segment(at, sz) =
                            Eigen::Map<const Eigen::VectorXd>(G.data(), sz);
                    }
                    at += sz;
                }
            }

            Eigen::MatrixXd JJt = J * J.transpose();
            const double ridge = 1e-12 * (1.0 + JJt.diagonal().maxCoeff());
            JJt.diagonal().array() += ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(JJt);
            if (ldlt.info() != Eigen::Success) return false;
            Eigen::VectorXd w = ldlt.solve(res);
            w += ldlt.solve(res - JJt * w);
            const Eigen::VectorXd d = -(J.transpose() * w);
            if (!d.allFinite()) return false;

            // Backtracking on the residual norm.
            double step = 1.0;
            bool improved = false;
            for (int half = 0; half < 25; ++half) {
                std::vector<Eigen::MatrixXd> trial = U;
                int at = 0;
                for (int blk = 0; blk < nblocks; ++blk) {
                    const auto bi = static_cast<std::size_t>(blk);
                    const int sz = static_cast<int>(U[bi].rows() * U[bi].cols());
                    if (sz > 0)
                        trial[bi] += step * Eigen::Map<const Eigen::MatrixXd>(
                                                d.data() + at, U[bi].rows(), U[bi].cols());
                    at += sz;
                }
                const Eigen::VectorXd rt = eval_res(trial);
                if (rt.lpNorm<Eigen::Infinity>() < rn) {
                    U = std::move(trial);
                    res = rt;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!improved) break;
        }
        residual = res.lpNorm<Eigen::Infinity>();
        return true;
    }

    /// Best-effort symmetric eigensolve for solver iterates. Deliberately
    /// skips the reconstruction guard of sym_eig: near a singular optimal
    /// face the iterates are too ill-conditioned to honor it, and the outer
    /// loop only needs a few accurate digits plus its own safety margins.
    /// Candidate outcomes are re-verified independently by the callers that
    /// need certainty. A failed solve reports false instead of throwing.
    static bool eig_sym(const Eigen::MatrixXd& M, Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
        if (es.info() != Eigen::Success) return false;
        vals = es.eigenvalues(); // ascending
        vecs = es.eigenvectors();
        return true;
    }

    static double min_eig_estimate(const Eigen::MatrixXd& M) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()),
                                                          Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
        return es.eigenvalues().minCoeff();
    }

    /// W with W S W = X, for PD X and S; false if either left the cone.
    static bool nt_scaling(const Eigen::MatrixXd& Xb, const Eigen::MatrixXd& Sb,
                           Eigen::MatrixXd& Wb) {
        Eigen::VectorXd sv;
        Eigen::MatrixXd sq_vecs;
        if (!eig_sym(Sb, sv, sq_vecs)) return false;
        if (sv.minCoeff() <= 0) return false;
        const Eigen::VectorXd sq = sv.cwiseSqrt();
        const Eigen::MatrixXd S12 = sq_vecs * sq.asDiagonal() * sq_vecs.transpose();
        const Eigen::MatrixXd S12i = sq_vecs * sq.cwiseInverse().asDiagonal() * sq_vecs.transpose();
        const Eigen::MatrixXd mid = S12 * Xb * S12;
        Eigen::VectorXd mv;
        Eigen::MatrixXd mid_vecs;
        if (!eig_sym(mid, mv, mid_vecs)) return false;
        if (mv.minCoeff() <= 0) return false;
        const Eigen::MatrixXd mid12 = mid_vecs * mv.cwiseSqrt().asDiagonal() * mid_vecs.transpose();
        Wb = S12i * mid12 * S12i;
        Wb = 0.5 * (Wb + Wb.transpose()).eval();
        return true;
    }

    static bool sym_inverse(const Eigen::MatrixXd& M, Eigen::MatrixXd& out) {
        Eigen::VectorXd vals;
        Eigen::MatrixXd vecs;
        if (!eig_sym(M, vals, vecs)) return false;
        if (vals.minCoeff() <= 0) return false;
        out = vecs * vals.cwiseInverse().asDiagonal() * vecs.transpose();
        return true;
    }

    /// Largest a >= 0 with M + a D still PSD (M PD); +inf when unconstrained.
    /// Whitening goes through a Cholesky factor, so the boundary sits at
    /// -1 / lambda_min(L^-1 D L^-T); callers step only a fraction of the
    /// way, which absorbs the small eigensolve error on hard instances.
    static double psd_max_step(const Eigen::MatrixXd& M, const Eigen::MatrixXd& D) {
        const Eigen::MatrixXd Ms = 0.5 * (M + M.transpose());
        const Eigen::LLT<Eigen::MatrixXd> llt(Ms);
        if (llt.info() != Eigen::Success) return 0.0;
        const Eigen::MatrixXd Ds = 0.5 * (D + D.transpose());
        const Eigen::MatrixXd LiD = llt.matrixL().solve(Ds);
        const Eigen::MatrixXd G = llt.matrixL().solve(LiD.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()),
                                                          Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) {
            // conservative fallback: shrink until a Cholesky probe accepts
            double a = 1.0;
            for (int it = 0; it < 60; ++it, a *= 0.5)
                if (Eigen::LLT<Eigen::MatrixXd>((Ms + a * Ds).eval()).info() == Eigen::Success)
                    return a;
            return 0.0;
        }
        const double tmin = es.eigenvalues().minCoeff();
        if (!(tmin < 0)) return std::numeric_limits<double>::infinity();
        return -1.0 / tmin;
    }

    double max_step(const std::vector<Eigen::MatrixXd>& X, const std::vector<Eigen::MatrixXd>& S,
                    double tau, double kappa, const Step& st) const {
        double a = std::numeric_limits<double>::infinity();
        for (int blk = 0; blk < nblocks; ++blk) {
            const auto bi = static_cast<std::size_t>(blk);
            a = std::min(a, psd_max_step(X[bi], st.dX[bi]));
            a = std::min(a, psd_max_step(S[bi], st.dS[bi]));
        }
        if (st.dtau < 0) a = std::min(a, -tau / st.dtau);
        if (st.dkappa < 0) a = std::min(a, -kappa / st.dkappa);
        return a;
    }

    bool newton(const std::vector<Eigen::MatrixXd>& W, const Eigen::VectorXd& Rp,
                const std::vector<Eigen::MatrixXd>& Rd, double Rg,
                const std::vector<Eigen::MatrixXd>& Rc, double Rtk, const Eigen::VectorXd& y,
                double tau, double kappa, Step& out) const {
        // Scaled constraint matrices T_c = W A_c W and the Schur complement
        // M_ce = sum_blk <A_c, W A_e W>.
        std::vector<std::vector<Eigen::MatrixXd>> T(static_cast<std::size_t>(nrows));
        for (int c = 0; c < nrows; ++c) {
            auto& row = T[static_cast<std::size_t>(c)];
            row.reserve(static_cast<std::size_t>(nblocks));
            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                row.push_back(W[bi] * A[static_cast<std::size_t>(c)][bi] * W[bi]);
            }
        }
        Eigen::MatrixXd M(nrows, nrows);
        for (int c = 0; c < nrows; ++c)
            for (int e = c; e < nrows; ++e) {
                double acc = 0.0;
                for (int blk = 0; blk < nblocks; ++blk) {
                    const auto bi = static_cast<std::size_t>(blk);
                    acc += (A[static_cast<std::size_t>(c)][bi].array() *
                            T[static_cast<std::size_t>(e)][bi].array())
                               .sum();
                }
                M(c, e) = acc;
                M(e, c) = acc;
            }

        Eigen::VectorXd q = Rp;
        for (int c = 0; c < nrows; ++c) {
            double acc = 0.0;
            for (int blk = 0; blk < nblocks; ++blk) {
                const auto bi = static_cast<std::size_t>(blk);
                const auto& Ac = A[static_cast<std::size_t>(c)][bi];
                acc -= (Ac.array() * Rc[bi].array()).sum();
                acc += (Ac.array() * (W[bi] * Rd[bi] * W[bi]).array()).sum();
            }
            q[c] += acc;
        }

        // Eliminating dtau through the tau-kappa complementarity row adds a
        // rank-one (tau/kappa) b b^T term to the Schur complement. As kappa
        // -> 0 that term dwarfs M and would also inflate the ridge, so it is
        // applied through the Sherman-Morrison identity instead of being
        // folded into the factorization; the limit kappa -> 0 is benign.
        Eigen::MatrixXd K = M;
        // Tiny ridge keeps the factorization honest when rows are nearly
        // dependent; it perturbs the step, not the certified answer.
        const double ridge = 1e-13 * (1.0 + K.diagonal().cwiseAbs().maxCoeff());
        K.diagonal().array() += ridge;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
        if (ldlt.info() != Eigen::Success) return false;
        const auto solve_refined = [&](const Eigen::VectorXd& r) {
            Eigen::VectorXd x = ldlt.solve(r);
            for (int pass = 0; pass < 2; ++pass) x += ldlt.solve(r - K * x);
            return x;
        };
        const Eigen::VectorXd rhs = q + b * ((Rtk + tau * Rg) / kappa);
        const Eigen::VectorXd u = solve_refined(b);
        Eigen::VectorXd dy = solve_refined(rhs);
        const double rank1 = tau / kappa;
        const double denom = 1.0 + rank1 * b.dot(u);
        if (!u.allFinite() || !(denom > 0)) return false;
        dy -= u * (rank1 * b.dot(dy) / denom);
        if (!dy.allFinite()) return false;

        out.dy = dy;
        out.dtau = (Rtk + tau * Rg - tau * b.dot(dy)) / kappa;
        out.dkappa = b.dot(dy) - Rg;
        out.dX.clear();
        out.dS.clear();
        for (int blk = 0; blk < nblocks; ++blk) {
            const auto bi = static_cast<std::size_t>(blk);
            Eigen::MatrixXd dS = Rd[bi] - applyAT(dy, blk);
            dS = 0.5 * (dS + dS.transpose()).eval();
            Eigen::MatrixXd dX = Rc[bi] - W[bi] * dS * W[bi];
            dX = 0.5 * (dX + dX.transpose()).eval();
            if (!dS.allFinite() || !dX.allFinite()) return false;
            out.dS.push_back(std::move(dS));
            out.dX.push_back(std::move(dX));
        }
        return true;
    }

    static SdpOutcome stall(const std::string& why, int iter, double mu, double tau, double kappa,
                            double residual, double ray_obj) {
        std::ostringstream os;
        os.setf(std::ios::scientific);
        os.precision(3);
        os << why << "; mu=" << mu << " tau=" << tau << " kappa=" << kappa
           << " primal-residual=" << residual << " ray-objective=" << ray_obj;
        return SdpIndeterminate{os.str(), iter, mu, tau, kappa, residual};
    }

    SdpProblem P;
    SdpOptions opts;
    int nblocks = 0;
    int nrows = 0;
    int nu = 0;
    std::vector<std::vector<Eigen::MatrixXd>> A;
    Eigen::VectorXd b;
};

} // namespace detail

inline SdpOutcome solve_feasibility(const SdpProblem& problem, const SdpOptions& options = {}) {
    detail::HsdSolver solver(problem, options);
    return solver.run();
}

} // namespace sosmult
