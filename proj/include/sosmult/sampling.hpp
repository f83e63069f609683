#pragma once

// Deterministic real points on curve and ring models, used to assemble
// evaluation functionals, plus the univariate real-root finder that drives
// the plane-curve line sampler.

#include <sosmult/models.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace sosmult {

namespace detail {

inline double poly_val(const std::vector<double>& c, double r) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * r + c[i];
    return v;
}

inline double poly_der(const std::vector<double>& c, double r) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) v = v * r + c[i] * static_cast<double>(i);
    return v;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double unit_uniform(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Real roots of sum_i c[i] r^i (ascending coefficients), from the companion
/// matrix of the deflated polynomial, polished by Newton steps and filtered
/// by a residual bound that scales with the coefficient size. Roots are
/// returned sorted and deduplicated; an identically zero input has no
/// isolated roots and yields an empty list.
inline std::vector<double> real_roots(const std::vector<double>& coeffs) {
    double scale = 0.0;
    for (double c : coeffs) {
        if (!std::isfinite(c)) throw ComputeError("real_roots: non-finite coefficient");
        scale = std::max(scale, std::abs(c));
    }
    std::vector<double> out;
    if (scale == 0.0) return out;

    int deg = static_cast<int>(coeffs.size()) - 1;
    while (deg > 0 && std::abs(coeffs[static_cast<std::size_t>(deg)]) <= 1e-12 * scale) --deg;
    std::vector<double> c(coeffs.begin(), coeffs.begin() + deg + 1);

    std::size_t low = 0;
    while (low < static_cast<std::size_t>(deg) && c[low] == 0.0) ++low;
    if (low > 0) {
        out.push_back(0.0);
        c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(low));
        deg -= static_cast<int>(low);
    }
    if (deg <= 0) return out;

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i)
        comp(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(deg)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw ComputeError("real_roots: eigenvalue iteration failed");

    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const std::complex<double> z = es.eigenvalues()[i];
        if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) continue;
        double r = z.real();
        for (int it = 0; it < 6; ++it) {
            const double der = detail::poly_der(c, r);
            if (der == 0.0) break;
            const double step = detail::poly_val(c, r) / der;
            if (!std::isfinite(step)) break;
            r -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(r))) break;
        }
        if (!std::isfinite(r)) continue;
        const double bound = scale * std::pow(1.0 + std::abs(r), deg);
        if (std::abs(detail::poly_val(c, r)) > 1e-7 * bound) continue;
        out.push_back(r);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a)); }),
              out.end());
    return out;
}

/// Up to `count` distinct real points of the model, deterministic across
/// runs, in the coordinate convention eval_basis expects: ambient affine
/// representatives of unit max norm for plane and ring models, parameter
/// pairs on the unit half-circle for parametrized models. A plane curve is
/// probed along pencils of lines through a handful of base points, so fewer
/// points (possibly none) come back when its real locus is small.
inline std::vector<std::vector<double>> sample_real_points(const CurveModel& model, int count) {
    std::vector<std::vector<double>> pts;
    if (count <= 0) return pts;
    const double pi = 3.14159265358979323846;

    if (const auto* pm = std::get_if<PlaneModel>(&model.variant())) {
        struct Term {
            int e0, e1;
            double c;
        };
        std::vector<Term> terms;
        const int d = pm->degree();
        for (const auto& [e, q] : pm->defining_form().terms())
            terms.push_back({static_cast<int>(e[0]), static_cast<int>(e[1]), rat_double(q)});
        const double lambda = static_cast<double>(pm->shear_lambda());

        auto add_point = [&](double qx, double qy) {
            std::vector<double> p = {qx + lambda * qy, qy, 1.0};
            double mx = 0.0;
            std::size_t arg = 0;
            for (std::size_t i = 0; i < 3; ++i)
                if (std::abs(p[i]) > mx) {
                    mx = std::abs(p[i]);
                    arg = i;
                }
            if (!(mx > 0.0) || !std::isfinite(mx)) return;
            const double sgn = p[arg] < 0 ? -1.0 : 1.0;
            for (double& v : p) v = v / (sgn * mx);
            for (const auto& q : pts)
                if (std::abs(q[0] - p[0]) <= 1e-8 && std::abs(q[1] - p[1]) <= 1e-8 &&
                    std::abs(q[2] - p[2]) <= 1e-8)
                    return;
            pts.push_back(std::move(p));
        };

        const double bases[][2] = {
            {0.0, 0.0}, {1.0 / 3, 1.0 / 5}, {-2.0 / 5, 1.0 / 7}, {1.0 / 2, -1.0 / 3}, {-1.0 / 4, -2.0 / 7}};
        const int rays = std::max(count, 8);
        for (const auto& base : bases) {
            for (int k = 0; k < rays && static_cast<int>(pts.size()) < count; ++k) {
                const double phi = pi * (k + 0.5) / rays;
                const double cx = std::cos(phi), sy = std::sin(phi);
                // coefficients of r -> h(base_x + r*cx, base_y + r*sy, 1)
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
                    mul_linear(base[0], cx, t.e0);
                    mul_linear(base[1], sy, t.e1);
                    for (std::size_t i = 0; i < w.size(); ++i) u[i] += w[i];
                }
                for (double r : real_roots(u)) add_point(base[0] + r * cx, base[1] + r * sy);
            }
            if (static_cast<int>(pts.size()) >= count) break;
        }
        return pts;
    }

    if (model.is_ring() && model.ambient_vars() == 3) {
        // spiral on the upper half-sphere; no two points are projectively equal
        for (int i = 0; i < count; ++i) {
            const double z = (i + 0.5) / count;
            const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = i * 2.39996322972865332;
            pts.push_back({rr * std::cos(phi), rr * std::sin(phi), z});
        }
        return pts;
    }

    if (model.is_ring() && model.ambient_vars() > 3) {
        const int n1 = model.ambient_vars();
        std::uint64_t state = 0x5eedULL;
        while (static_cast<int>(pts.size()) < count) {
            std::vector<double> v(static_cast<std::size_t>(n1));
            double nrm2 = 0.0;
            for (int i = 0; i < n1; i += 2) {
                const double u1 = std::max(detail::unit_uniform(state), 1e-300);
                const double u2 = detail::unit_uniform(state);
                const double rad = std::sqrt(-2.0 * std::log(u1));
                v[static_cast<std::size_t>(i)] = rad * std::cos(2.0 * pi * u2);
                if (i + 1 < n1) v[static_cast<std::size_t>(i) + 1] = rad * std::sin(2.0 * pi * u2);
            }
            for (double x : v) nrm2 += x * x;
            if (nrm2 < 1e-4) continue;
            const double inv = 1.0 / std::sqrt(nrm2);
            for (double& x : v) x *= inv;
            pts.push_back(std::move(v));
        }
        return pts;
    }

    // parametrized models and the ring over one projective variable:
    // angles on the open half-circle give distinct projective parameters
    for (int i = 0; i < count; ++i) {
        const double th = pi * (i + 0.5) / count;
        pts.push_back({std::cos(th), std::sin(th)});
    }
    return pts;
}

} // namespace sosmult
