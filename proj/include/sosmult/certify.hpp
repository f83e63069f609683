#pragma once

// End-to-end multiplier certification: assemble the feasibility problem
// "find PSD Gram matrices A over R_k and B over R_{j+k} with f * (sum A) =
// (sum B) and trace(A) = 1", solve it, and independently re-verify whatever
// comes back. A feasible point becomes a MultiplierCertificate, a Farkas ray
// becomes a StrictSeparator, and anything that fails its own verification is
// reported as indeterminate rather than trusted.

#include <sosmult/models.hpp>
#include <sosmult/moment.hpp>
#include <sosmult/sampling.hpp>
#include <sosmult/sdp.hpp>
#include <sosmult/sym_eig.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sosmult {

struct MultiplierCertificate {
    int j = 0;
    int k = 0;
    Eigen::MatrixXd gram_A; ///< multiplier Gram over the degree-k basis, unit trace
    Eigen::MatrixXd gram_B; ///< product Gram over the degree-(j+k) basis
    double residual = 0.0;  ///< relative infinity-norm mismatch of f*A against B
    std::array<double, 2> eig_margins = {0.0, 0.0}; ///< min eigenvalues of A and B
};

struct StrictSeparator {
    int j = 0;
    int k = 0;
    MomentFunctional ell; ///< unit 2-norm functional on R_{2j+2k}
    double margin = 0.0;  ///< min(min eig catalecticant, -max eig localized catalecticant)
};

struct CertifyIndeterminate {
    int j = 0;
    int k = 0;
    std::string diagnostic;
};

using CertifyOutcome = std::variant<MultiplierCertificate, StrictSeparator, CertifyIndeterminate>;

struct CertifyOptions {
    double tol = 1e-6;   ///< certificate verification tolerance
    double delta = 1e-6; ///< separator margin
    SdpOptions sdp;
};

struct MultiplierProblem {
    SdpProblem sdp;
    int j = 0;
    int k = 0;
    int block_a = 0;        ///< HF(k)
    int block_b = 0;        ///< HF(j+k)
    double f_scale = 1.0;   ///< the input was divided by this before assembly
    Eigen::VectorXd f_unit; ///< scaled coordinates actually used
};

/// Feasibility problem for "f times some unit-trace PSD multiplier Gram is a
/// sum of squares": one equality per basis coordinate of R_{2j+2k} matching
/// the two symmetrized Gram pairings, plus the trace normalization on the
/// multiplier block. f is scaled to unit infinity-coefficient norm first.
inline MultiplierProblem build_multiplier_problem(const CurveModel& model, const Eigen::VectorXd& f,
                                                  int j, int k) {
    if (j < 1) throw ParseError("multiplier certification needs j >= 1");
    if (k < 0) throw ParseError("multiplier degree must be nonnegative");
    if (f.size() != model.hilbert_function(2 * j))
        throw ParseError("f has " + std::to_string(f.size()) + " coordinates but HF(" +
                         std::to_string(2 * j) + ") = " +
                         std::to_string(model.hilbert_function(2 * j)));
    if (!f.allFinite()) throw ParseError("f has non-finite coordinates");
    const double scale = f.lpNorm<Eigen::Infinity>();
    if (!(scale > 0.0)) throw ComputeError("f is zero in R_" + std::to_string(2 * j));

    MultiplierProblem mp;
    mp.j = j;
    mp.k = k;
    mp.f_scale = scale;
    mp.f_unit = f / scale;
    const int p = model.hilbert_function(k);
    const int q = model.hilbert_function(j + k);
    const int N = model.hilbert_function(2 * j + 2 * k);
    mp.block_a = p;
    mp.block_b = q;

    const std::vector<Eigen::VectorXd> units_p = detail::coordinate_units(p);
    const std::vector<Eigen::VectorXd> units_q = detail::coordinate_units(q);
    const auto pairs_a = detail::sym_pairs(p);
    const auto pairs_b = detail::sym_pairs(q);

    std::vector<Eigen::VectorXd> prod_a; // coordinates of red(f * b_a * b_b)
    prod_a.reserve(pairs_a.size());
    for (const auto& [a, b] : pairs_a) {
        const Eigen::VectorXd pair = model.multiply_d(k, units_p[static_cast<std::size_t>(a)], k,
                                                      units_p[static_cast<std::size_t>(b)]);
        prod_a.push_back(model.multiply_d(2 * j, mp.f_unit, 2 * k, pair));
    }
    std::vector<Eigen::VectorXd> prod_b; // coordinates of red(c_u * c_v)
    prod_b.reserve(pairs_b.size());
    for (const auto& [u, v] : pairs_b)
        prod_b.push_back(model.multiply_d(j + k, units_q[static_cast<std::size_t>(u)], j + k,
                                          units_q[static_cast<std::size_t>(v)]));

    mp.sdp.block_orders = {p, q};
    for (int r = 0; r < N; ++r) {
        SdpConstraint con;
        con.rhs = 0.0;
        for (std::size_t idx = 0; idx < pairs_a.size(); ++idx) {
            const auto [a, b] = pairs_a[idx];
            con.terms.push_back({0, a, b, (a == b ? 1.0 : 2.0) * prod_a[idx][r]});
        }
        for (std::size_t idx = 0; idx < pairs_b.size(); ++idx) {
            const auto [u, v] = pairs_b[idx];
            con.terms.push_back({1, u, v, -(u == v ? 1.0 : 2.0) * prod_b[idx][r]});
        }
        mp.sdp.constraints.push_back(std::move(con));
    }
    SdpConstraint tr;
    tr.rhs = 1.0;
    for (int a = 0; a < p; ++a) tr.terms.push_back({0, a, a, 1.0});
    mp.sdp.constraints.push_back(std::move(tr));
    mp.sdp.normalization = N;
    return mp;
}

struct CertificateCheckDetail {
    double residual = 0.0;
    double min_eig_A = 0.0;
    double min_eig_B = 0.0;
    double trace_err = 0.0;
    std::string why;
};

/// Independent re-check of a certificate: PSD within tol on both blocks,
/// trace(A) = 1 within tol, and the coordinate identity f*A = B within a
/// relative infinity-norm tolerance. Uses only eigendecompositions and ring
/// multiplication; no solver state.
inline bool verify_certificate(const CurveModel& model, const Eigen::VectorXd& f,
                               const MultiplierCertificate& cert, double tol = 1e-6,
                               CertificateCheckDetail* detail_out = nullptr) {
    CertificateCheckDetail d;
    const int j = cert.j, k = cert.k;
    const int p = model.hilbert_function(k);
    const int q = model.hilbert_function(j + k);
    if (j < 1 || k < 0 || f.size() != model.hilbert_function(2 * j) || cert.gram_A.rows() != p ||
        cert.gram_A.cols() != p || cert.gram_B.rows() != q || cert.gram_B.cols() != q) {
        d.why = "certificate dimensions do not match the model";
        if (detail_out) *detail_out = d;
        return false;
    }
    const Eigen::MatrixXd A = 0.5 * (cert.gram_A + cert.gram_A.transpose());
    const Eigen::MatrixXd B = 0.5 * (cert.gram_B + cert.gram_B.transpose());
    if (!A.allFinite() || !B.allFinite() || !f.allFinite()) {
        d.why = "non-finite entries";
        if (detail_out) *detail_out = d;
        return false;
    }

    const int N = model.hilbert_function(2 * j + 2 * k);
    const std::vector<Eigen::VectorXd> units_p = detail::coordinate_units(p);
    const std::vector<Eigen::VectorXd> units_q = detail::coordinate_units(q);
    Eigen::VectorXd left = Eigen::VectorXd::Zero(N);
    for (const auto& [a, b] : detail::sym_pairs(p)) {
        const double w = (a == b ? 1.0 : 2.0) * A(a, b);
        if (w == 0.0) continue;
        const Eigen::VectorXd pair = model.multiply_d(k, units_p[static_cast<std::size_t>(a)], k,
                                                      units_p[static_cast<std::size_t>(b)]);
        left += w * model.multiply_d(2 * j, f, 2 * k, pair);
    }
    Eigen::VectorXd right = Eigen::VectorXd::Zero(N);
    for (const auto& [u, v] : detail::sym_pairs(q)) {
        const double w = (u == v ? 1.0 : 2.0) * B(u, v);
        if (w == 0.0) continue;
        right += w * model.multiply_d(j + k, units_q[static_cast<std::size_t>(u)], j + k,
                                      units_q[static_cast<std::size_t>(v)]);
    }

    d.residual = (left - right).lpNorm<Eigen::Infinity>() / (1.0 + left.lpNorm<Eigen::Infinity>());
    d.min_eig_A = min_eigenvalue(A);
    d.min_eig_B = min_eigenvalue(B);
    d.trace_err = std::abs(A.trace() - 1.0);

    std::ostringstream why;
    if (d.min_eig_A < -tol) why << "multiplier Gram has eigenvalue " << d.min_eig_A << "; ";
    if (d.min_eig_B < -tol) why << "product Gram has eigenvalue " << d.min_eig_B << "; ";
    if (d.trace_err > tol) why << "trace(A) is off by " << d.trace_err << "; ";
    if (d.residual > tol) why << "coordinate identity residual " << d.residual << "; ";
    d.why = why.str();
    if (detail_out) *detail_out = d;
    return d.why.empty();
}

struct SeparatorCheckDetail {
    double cat_min_eig = 0.0;
    double localized_max_eig = 0.0;
    double margin = 0.0;
    std::string why;
};

/// Independent re-check of a separator: the functional must have unit
/// 2-norm, a positive definite catalecticant on R_{j+k} (min eigenvalue at
/// least delta), and a negative definite localized catalecticant at f on
/// R_k (max eigenvalue at most -delta).
inline bool verify_separator(const CurveModel& model, const Eigen::VectorXd& f,
                             const StrictSeparator& sep, double delta = 1e-6,
                             SeparatorCheckDetail* detail_out = nullptr) {
    SeparatorCheckDetail d;
    const int j = sep.j, k = sep.k;
    if (j < 1 || k < 0 || f.size() != model.hilbert_function(2 * j) ||
        sep.ell.degree != 2 * j + 2 * k) {
        d.why = "separator dimensions do not match the model";
        if (detail_out) *detail_out = d;
        return false;
    }
    if (std::abs(sep.ell.coords.norm() - 1.0) > 1e-9) {
        d.why = "functional is not unit normalized";
        if (detail_out) *detail_out = d;
        return false;
    }
    const Eigen::MatrixXd cat = catalecticant(model, sep.ell, j + k);
    const Eigen::MatrixXd loc = localized_catalecticant(model, sep.ell, f, 2 * j, k);
    d.cat_min_eig = min_eigenvalue(cat);
    d.localized_max_eig = max_eigenvalue(loc);
    d.margin = std::min(d.cat_min_eig, -d.localized_max_eig);
    std::ostringstream why;
    if (d.cat_min_eig < delta)
        why << "catalecticant min eigenvalue " << d.cat_min_eig << " below " << delta << "; ";
    if (d.localized_max_eig > -delta)
        why << "localized catalecticant max eigenvalue " << d.localized_max_eig << " above -"
            << delta << "; ";
    d.why = why.str();
    if (detail_out) *detail_out = d;
    return d.why.empty();
}

namespace detail {

/// Evaluation-average functional on R_{2j+2k}, used to push a Farkas ray
/// into the strict interior of the dual cone. Empty when the model has too
/// few real points.
inline std::optional<Eigen::VectorXd> interior_dual_direction(const CurveModel& model, int degree) {
    const int n = model.hilbert_function(degree);
    const auto pts = sample_real_points(model, std::max(2 * n, 16));
    if (static_cast<int>(pts.size()) < n) return std::nullopt;
    Eigen::VectorXd ell = Eigen::VectorXd::Zero(n);
    for (const auto& P : pts) {
        const std::vector<double> vals = model.eval_basis(degree, P);
        Eigen::VectorXd w(static_cast<Eigen::Index>(vals.size()));
        for (std::size_t i = 0; i < vals.size(); ++i) w[static_cast<Eigen::Index>(i)] = vals[i];
        const double nw = w.norm();
        if (nw > 0.0 && std::isfinite(nw)) ell += w / nw;
    }
    const double ne = ell.norm();
    if (!(ne > 0.0)) return std::nullopt;
    return Eigen::VectorXd(ell / ne);
}

} // namespace detail

/// Decide whether f admits a degree-2k sums-of-squares multiplier. The
/// solver outcome is never trusted as-is: certificates and separators are
/// both re-verified against the original (unscaled) f, and failures come
/// back as CertifyIndeterminate with the reason.
inline CertifyOutcome certify_multiplier(const CurveModel& model, const Eigen::VectorXd& f, int j,
                                         int k, const CertifyOptions& options = {}) {
    MultiplierProblem mp = build_multiplier_problem(model, f, j, k);
    const SdpOutcome out = solve_feasibility(mp.sdp, options.sdp);

    if (const auto* fz = std::get_if<SdpFeasible>(&out)) {
        MultiplierCertificate cert;
        cert.j = j;
        cert.k = k;
        cert.gram_A = 0.5 * (fz->blocks[0] + fz->blocks[0].transpose());
        cert.gram_B = mp.f_scale * 0.5 * (fz->blocks[1] + fz->blocks[1].transpose());
        CertificateCheckDetail chk;
        if (verify_certificate(model, f, cert, options.tol, &chk)) {
            cert.residual = chk.residual;
            cert.eig_margins = {chk.min_eig_A, chk.min_eig_B};
            return cert;
        }
        return CertifyIndeterminate{j, k, "feasible point failed verification: " + chk.why};
    }

    if (const auto* ray = std::get_if<SdpSeparatorRay>(&out)) {
        const int N = model.hilbert_function(2 * j + 2 * k);
        const Eigen::VectorXd base = ray->dual.head(N);
        if (!(base.norm() > 0.0))
            return CertifyIndeterminate{j, k, "separator ray has no coordinate components"};
        const std::optional<Eigen::VectorXd> interior =
            detail::interior_dual_direction(model, 2 * j + 2 * k);

        StrictSeparator best{j, k, MomentFunctional(model, 2 * j + 2 * k, base / base.norm()), 0.0};
        SeparatorCheckDetail best_chk;
        bool have_best = false;
        std::vector<double> mixes = {0.0};
        if (interior)
            for (int i = 0; i <= 40; ++i) mixes.push_back(std::ldexp(1.0, -i));
        for (double t : mixes) {
            Eigen::VectorXd cand = base / base.norm();
            if (t > 0.0) cand += t * (*interior);
            const double nc = cand.norm();
            if (!(nc > 0.0)) continue;
            StrictSeparator sep{j, k, MomentFunctional(model, 2 * j + 2 * k, cand / nc), 0.0};
            SeparatorCheckDetail chk;
            verify_separator(model, f, sep, options.delta, &chk);
            if (!have_best || chk.margin > best_chk.margin) {
                sep.margin = chk.margin;
                best = sep;
                best_chk = chk;
                have_best = true;
            }
        }
        if (have_best && best_chk.why.empty()) return best;
        std::ostringstream diag;
        diag << "separator ray could not be strictified";
        if (have_best) diag << ": best margin " << best_chk.margin << " (" << best_chk.why << ")";
        return CertifyIndeterminate{j, k, diag.str()};
    }

    const auto& ind = std::get<SdpIndeterminate>(out);
    return CertifyIndeterminate{j, k, "solver: " + ind.diagnostic};
}

struct SearchEntry {
    int k = 0;
    CertifyOutcome outcome;
};

struct SearchResult {
    std::vector<SearchEntry> table;   ///< outcomes in increasing k
    int first_certificate_k = -1;     ///< -1 when no verified certificate appeared
};

/// Try k = 0..k_max in order. Stops at the first verified certificate
/// unless exhaustive; separators and indeterminate outcomes never abort
/// the search.
inline SearchResult search_min_multiplier_degree(const CurveModel& model, const Eigen::VectorXd& f,
                                                 int j, int k_max, bool exhaustive = false,
                                                 const CertifyOptions& options = {}) {
    if (k_max < 0) throw ParseError("search needs k_max >= 0");
    SearchResult res;
    for (int k = 0; k <= k_max; ++k) {
        CertifyOutcome out = certify_multiplier(model, f, j, k, options);
        const bool is_cert = std::holds_alternative<MultiplierCertificate>(out);
        res.table.push_back({k, std::move(out)});
        if (is_cert) {
            if (res.first_certificate_k < 0) res.first_certificate_k = k;
            if (!exhaustive) break;
        }
    }
    return res;
}

} // namespace sosmult
