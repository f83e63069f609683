#pragma once

// Linear functionals on a graded piece R_{2m} of a curve's coordinate ring,
// together with the symmetric matrices they induce: the catalecticant
// (g1, g2) -> ell(g1 g2) on R_m x R_m and its localized variant
// (h1, h2) -> ell(f h1 h2) for a fixed element f.

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "sosmult/errors.hpp"
#include "sosmult/models.hpp"

namespace sosmult {

/// A linear functional on R_degree, stored by its coordinates against the
/// dual of the model's graded basis in that degree.
struct MomentFunctional {
    MomentFunctional(CurveModel model_, int degree_, Eigen::VectorXd coords_)
        : model(std::move(model_)), degree(degree_), coords(std::move(coords_)) {
        if (degree < 0) throw ComputeError("moment functional needs a nonnegative degree");
        if (coords.size() != model.hilbert_function(degree))
            throw ComputeError("moment functional has " + std::to_string(coords.size()) +
                               " coordinates but HF(" + std::to_string(degree) + ") = " +
                               std::to_string(model.hilbert_function(degree)));
        if (!coords.allFinite()) throw ComputeError("moment functional has non-finite entries");
    }

    CurveModel model;
    int degree;
    Eigen::VectorXd coords;

    /// Pair the functional with an element of R_degree given by coordinates.
    double operator()(const Eigen::VectorXd& element) const {
        if (element.size() != coords.size())
            throw ComputeError("functional applied to an element of the wrong degree");
        return coords.dot(element);
    }

    /// Same functional rescaled to Euclidean norm 1.
    MomentFunctional normalized() const {
        const double n = coords.norm();
        if (!(n > 0)) throw ComputeError("cannot normalize the zero functional");
        return MomentFunctional(model, degree, coords / n);
    }
};

/// The functional g -> g(P) for a model-specific real point P (ambient affine
/// coordinates for plane and ring models, (s, t) for parametrized ones).
inline MomentFunctional evaluation_functional(const CurveModel& model, int degree,
                                              const std::vector<double>& point) {
    const std::vector<double> vals = model.eval_basis(degree, point);
    Eigen::VectorXd c(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) c[static_cast<Eigen::Index>(i)] = vals[i];
    return MomentFunctional(model, degree, std::move(c));
}

namespace detail {

inline std::vector<Eigen::VectorXd> coordinate_units(int p) {
    std::vector<Eigen::VectorXd> units;
    units.reserve(static_cast<std::size_t>(p));
    for (int a = 0; a < p; ++a) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
        u[a] = 1.0;
        units.push_back(std::move(u));
    }
    return units;
}

inline std::vector<VecQ> coordinate_units_exact(int p) {
    std::vector<VecQ> units(static_cast<std::size_t>(p), VecQ(static_cast<std::size_t>(p), Rat(0)));
    for (int a = 0; a < p; ++a) units[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)] = 1;
    return units;
}

/// Upper-triangle index pairs (a, b) with a <= b, row by row.
inline std::vector<std::pair<int, int>> sym_pairs(int p) {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(p) * (static_cast<std::size_t>(p) + 1) / 2);
    for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b) out.emplace_back(a, b);
    return out;
}

} // namespace detail

/// Catalecticant of ell on R_{2m}: entry (a, b) = ell(b_a b_b) over the
/// degree-m graded basis.
inline Eigen::MatrixXd catalecticant(const CurveModel& model, const MomentFunctional& ell, int m) {
    if (m < 0) throw ComputeError("catalecticant needs a nonnegative half-degree");
    if (ell.degree != 2 * m)
        throw ComputeError("catalecticant degree mismatch: functional lives on R_" +
                           std::to_string(ell.degree) + ", requested half-degree " +
                           std::to_string(m));
    if (ell.coords.size() != model.hilbert_function(2 * m))
        throw ComputeError("catalecticant: functional does not match this model's HF(2m)");
    const int p = model.hilbert_function(m);
    const std::vector<Eigen::VectorXd> units = detail::coordinate_units(p);
    Eigen::MatrixXd M(p, p);
    for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b) {
            const Eigen::VectorXd prod =
                model.multiply_d(m, units[static_cast<std::size_t>(a)], m,
                                 units[static_cast<std::size_t>(b)]);
            const double v = ell.coords.dot(prod);
            M(a, b) = v;
            M(b, a) = v;
        }
    return M;
}

/// Localized catalecticant of ell on R_{2j+2k} at a fixed f, given by exact
/// coordinates over the degree-2j basis: entry (a, b) = ell(f b_a b_b) over
/// the degree-k graded basis.
inline Eigen::MatrixXd localized_catalecticant(const CurveModel& model, const MomentFunctional& ell,
                                               const VecQ& f, int two_j, int k) {
    if (two_j < 0 || k < 0)
        throw ComputeError("localized catalecticant needs nonnegative degrees");
    if (ell.degree != two_j + 2 * k)
        throw ComputeError("localized catalecticant degree mismatch: functional lives on R_" +
                           std::to_string(ell.degree) + ", expected R_" +
                           std::to_string(two_j + 2 * k));
    if (static_cast<int>(f.size()) != model.hilbert_function(two_j))
        throw ComputeError("localized catalecticant: f has the wrong coordinate count");
    if (ell.coords.size() != model.hilbert_function(two_j + 2 * k))
        throw ComputeError("localized catalecticant: functional does not match this model");
    const int p = model.hilbert_function(k);
    Eigen::MatrixXd M(p, p);
    if (model.is_exact()) {
        const std::vector<VecQ> units = detail::coordinate_units_exact(p);
        for (int a = 0; a < p; ++a)
            for (int b = a; b < p; ++b) {
                const VecQ pair = model.multiply(k, units[static_cast<std::size_t>(a)], k,
                                                 units[static_cast<std::size_t>(b)]);
                const VecQ full = model.multiply(two_j, f, 2 * k, pair);
                double v = 0.0;
                for (std::size_t i = 0; i < full.size(); ++i)
                    v += ell.coords[static_cast<Eigen::Index>(i)] * rat_double(full[i]);
                M(a, b) = v;
                M(b, a) = v;
            }
        return M;
    }
    Eigen::VectorXd fd(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i)
        fd[static_cast<Eigen::Index>(i)] = rat_double(f[i]);
    const std::vector<Eigen::VectorXd> units = detail::coordinate_units(p);
    for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b) {
            const Eigen::VectorXd pair = model.multiply_d(k, units[static_cast<std::size_t>(a)],
                                                          k, units[static_cast<std::size_t>(b)]);
            const Eigen::VectorXd full = model.multiply_d(two_j, fd, 2 * k, pair);
            const double v = ell.coords.dot(full);
            M(a, b) = v;
            M(b, a) = v;
        }
    return M;
}

/// Localized catalecticant with f given in floating-point coordinates.
inline Eigen::MatrixXd localized_catalecticant(const CurveModel& model, const MomentFunctional& ell,
                                               const Eigen::VectorXd& f, int two_j, int k) {
    if (two_j < 0 || k < 0)
        throw ComputeError("localized catalecticant needs nonnegative degrees");
    if (ell.degree != two_j + 2 * k)
        throw ComputeError("localized catalecticant degree mismatch: functional lives on R_" +
                           std::to_string(ell.degree) + ", expected R_" +
                           std::to_string(two_j + 2 * k));
    if (f.size() != model.hilbert_function(two_j))
        throw ComputeError("localized catalecticant: f has the wrong coordinate count");
    if (ell.coords.size() != model.hilbert_function(two_j + 2 * k))
        throw ComputeError("localized catalecticant: functional does not match this model");
    if (!f.allFinite()) throw ComputeError("localized catalecticant: f has non-finite entries");
    const int p = model.hilbert_function(k);
    const std::vector<Eigen::VectorXd> units = detail::coordinate_units(p);
    Eigen::MatrixXd M(p, p);
    for (int a = 0; a < p; ++a)
        for (int b = a; b < p; ++b) {
            const Eigen::VectorXd pair = model.multiply_d(k, units[static_cast<std::size_t>(a)],
                                                          k, units[static_cast<std::size_t>(b)]);
            const Eigen::VectorXd full = model.multiply_d(two_j, f, 2 * k, pair);
            const double v = ell.coords.dot(full);
            M(a, b) = v;
            M(b, a) = v;
        }
    return M;
}

} // namespace sosmult
