#pragma once

// Closed-form invariants and multiplier degree bounds: curve invariants
// (degree, arithmetic genus, Hilbert regularity offset r) recovered from a
// model's Hilbert function, the two curve bounds k >= max(r, ceil(2p_a/d))
// and k >= d-n+1, complete-intersection closed forms, and the surface-side
// dimension inequality with its multiplier degree schedules.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sosmult/errors.hpp"
#include "sosmult/models.hpp"
#include "sosmult/rational.hpp"

namespace sosmult {

struct CurveInvariants {
    std::int64_t d = 0;    ///< degree of the curve
    std::int64_t p_a = 0;  ///< arithmetic genus
    std::int64_t r = 0;    ///< least i with HF(m) = HP(m) for all m >= i (may be -1)
};

/// Recover (d, p_a, r) from the model's Hilbert function.  The first
/// differences of HF are scanned until three consecutive values agree; that
/// stable value is d, and p_a follows from HF(m) = d*m + 1 - p_a on the
/// stable range.  r is found by walking backwards from the stabilization
/// point while HF still matches the Hilbert polynomial, with one extra step
/// to m = -1 (where HF vanishes) so that a line reports r = -1.
inline CurveInvariants curve_invariants(const CurveModel& model) {
    const int cap = 4 * std::max(1, model.ambient_degree_hint());
    std::vector<std::int64_t> hf;
    auto ensure = [&](int m) {
        while (static_cast<int>(hf.size()) <= m)
            hf.push_back(model.hilbert_function(static_cast<int>(hf.size())));
    };
    int m0 = -1;
    for (int m = 0; m + 3 <= cap; ++m) {
        ensure(m + 3);
        const std::int64_t d0 = hf[m + 1] - hf[m];
        const std::int64_t d1 = hf[m + 2] - hf[m + 1];
        const std::int64_t d2 = hf[m + 3] - hf[m + 2];
        if (d0 >= 1 && d0 == d1 && d1 == d2) {
            m0 = m;
            break;
        }
    }
    if (m0 < 0)
        throw ComputeError("Hilbert function did not stabilize within m <= " +
                           std::to_string(cap) + "; the model does not present a curve");

    const std::int64_t d = hf[m0 + 1] - hf[m0];
    const int hi = m0 + 3;
    ensure(hi + 2);
    const std::int64_t p_a = d * hi + 1 - hf[hi];
    auto hp = [&](std::int64_t m) { return d * m + 1 - p_a; };
    for (int m = hi; m <= hi + 2; ++m)
        if (hf[m] != hp(m))
            throw ComputeError("Hilbert function leaves its stable line again after m = " +
                               std::to_string(m0) + "; the model does not present a curve");

    int r = m0;
    while (r > 0 && hf[r - 1] == hp(r - 1)) --r;
    if (r == 0 && hf[0] == hp(0) && hp(-1) == 0) r = -1;
    return CurveInvariants{d, p_a, r};
}

/// k >= max(r, ceil(2 p_a / d)), clamped at 0.
inline std::int64_t multiplier_degree_bound_curve(const CurveInvariants& inv) {
    if (inv.d < 1) throw ComputeError("multiplier bound needs a positive degree");
    const std::int64_t genus_term = ceil_div(2 * inv.p_a, inv.d);
    return std::max<std::int64_t>({inv.r, genus_term, 0});
}

/// k >= d - n + 1 for a curve of degree d in P^n, clamped at 0.
inline std::int64_t degree_only_bound(std::int64_t d, std::int64_t n) {
    if (d < 1) throw ComputeError("degree-only bound needs a positive degree");
    if (n < 1) throw ComputeError("degree-only bound needs a positive ambient dimension");
    return std::max<std::int64_t>(d - n + 1, 0);
}

struct BoundReport {
    CurveInvariants inv;
    std::int64_t k_curve = 0;
    std::int64_t k_degree_only = 0;
    std::string notes;
};

inline BoundReport bound_report(const CurveModel& model) {
    BoundReport rep;
    rep.inv = curve_invariants(model);
    rep.k_curve = multiplier_degree_bound_curve(rep.inv);
    rep.k_degree_only = degree_only_bound(rep.inv.d, model.ambient_vars() - 1);
    rep.notes =
        "d, p_a, r model-computed from the Hilbert function; "
        "k_curve = max(r, ceil(2*p_a/d), 0); k_degree_only = max(d-n+1, 0)";
    return rep;
}

struct CiClosedForms {
    std::int64_t deg = 0;
    std::int64_t p_a = 0;
    std::int64_t k_bound = 0;
};

/// Closed forms for a complete-intersection curve of hypersurface degrees
/// d_1..d_{n-1} in P^n: deg = prod(d_i), p_a = (1/2) prod(d_i) (sum(d_i) - n - 1) + 1,
/// and the multiplier bound k >= sum(d_i) - n.
inline CiClosedForms ci_closed_forms(const std::vector<std::int64_t>& degrees) {
    if (degrees.empty())
        throw ParseError("complete intersection needs at least one hypersurface degree");
    Int prod = 1;
    std::int64_t sum = 0;
    bool nontrivial = false;
    for (std::int64_t di : degrees) {
        if (di < 1) throw ParseError("hypersurface degrees must be at least 1");
        if (di > 1) nontrivial = true;
        prod *= static_cast<long>(di);
        sum += di;
    }
    if (!nontrivial)
        throw ParseError("complete intersection needs at least one degree above 1");
    const std::int64_t n = static_cast<std::int64_t>(degrees.size()) + 1;
    Int twice = prod * static_cast<long>(sum - n - 1);
    if (mpz_odd_p(twice.get_mpz_t()))
        throw ComputeError("arithmetic genus closed form did not come out integral");
    Int genus = twice / 2 + 1;
    if (!prod.fits_slong_p() || !genus.fits_slong_p())
        throw ComputeError("complete intersection invariants overflow");
    CiClosedForms out;
    out.deg = static_cast<std::int64_t>(prod.get_si());
    out.p_a = static_cast<std::int64_t>(genus.get_si());
    out.k_bound = std::max<std::int64_t>(sum - n, 0);
    return out;
}

struct SurfaceInequality {
    std::int64_t margin = 0;  ///< RHS - LHS of the dimension count
    bool holds = false;       ///< margin > 0
};

/// Dimension-count inequality for an m-dimensional variety with Hilbert
/// function hf: holds when
///   HF(2j+2k) < binom(m+1,1) (HF(j+k) - HF(k-j)) + HF(2k) - binom(m+1,2).
/// Negative arguments to hf are treated as 0.
inline SurfaceInequality surface_inequality(const std::function<std::int64_t(std::int64_t)>& hf,
                                            std::int64_t m, std::int64_t j, std::int64_t k) {
    if (j < 1) throw ParseError("surface inequality needs j >= 1");
    if (m < 0 || k < 0) throw ParseError("surface inequality needs m >= 0 and k >= 0");
    auto H = [&](std::int64_t i) -> std::int64_t { return i < 0 ? 0 : hf(i); };
    const std::int64_t lhs = H(2 * j + 2 * k);
    const std::int64_t rhs =
        binom(m + 1, 1) * (H(j + k) - H(k - j)) + H(2 * k) - binom(m + 1, 2);
    SurfaceInequality out;
    out.margin = rhs - lhs;
    out.holds = out.margin > 0;
    return out;
}

struct MultiplierSchedule {
    std::int64_t multiplier_degree = 0;  ///< degree of the sum-of-squares multiplier
    std::int64_t product_degree = 0;     ///< degree of the certified product
};

/// Iterated multiplier degrees for an input of degree 2j on a surface.
/// kind "minimal": a surface of minimal degree, j >= 1, giving (j^2-j, j^2+j).
/// kind "p2": the projective plane, j >= 2; even j = 2t gives
/// (2t^2-2t, 2t^2+2t) and odd j = 2t-1 gives (2t^2-4t+2, 2t^2).
inline MultiplierSchedule surface_multiplier_schedule(const std::string& kind, std::int64_t j) {
    if (kind == "minimal") {
        if (j < 1) throw ParseError("minimal-degree schedule needs j >= 1");
        return MultiplierSchedule{j * j - j, j * j + j};
    }
    if (kind == "p2") {
        if (j < 2) throw ParseError("projective-plane schedule needs j >= 2");
        if (j % 2 == 0) {
            const std::int64_t t = j / 2;
            return MultiplierSchedule{2 * t * t - 2 * t, 2 * t * t + 2 * t};
        }
        const std::int64_t t = (j + 1) / 2;
        return MultiplierSchedule{2 * t * t - 4 * t + 2, 2 * t * t};
    }
    throw ParseError("unknown surface kind: " + kind);
}

}  // namespace sosmult
