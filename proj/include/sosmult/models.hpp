#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sosmult/errors.hpp"
#include "sosmult/linalg_exact.hpp"
#include "sosmult/monomial.hpp"
#include "sosmult/polynomial.hpp"
#include "sosmult/rational.hpp"

namespace sosmult {

namespace detail {

inline void trim_trailing_zeros(std::vector<Rat>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
}

/// Monic gcd of dense univariate rationals (coefficients by ascending power).
inline std::vector<Rat> univariate_gcd(std::vector<Rat> a, std::vector<Rat> b) {
    trim_trailing_zeros(a);
    trim_trailing_zeros(b);
    while (!b.empty()) {
        // a mod b
        const std::size_t db = b.size() - 1;
        const Rat lead = b.back();
        while (a.size() > db) {
            const Rat c = a.back() / lead;
            for (std::size_t i = 0; i <= db; ++i)
                a[a.size() - 1 - db + i] -= c * b[i];
            a.pop_back();
            trim_trailing_zeros(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
        trim_trailing_zeros(b);
    }
    if (!a.empty()) {
        const Rat lead = a.back();
        for (Rat& c : a) c /= lead;
    }
    return a;
}

/// phi(t, 1) as dense coefficients by ascending power of t.
inline std::vector<Rat> dehomogenize(const PolyQ& phi) {
    std::vector<Rat> v;
    for (const auto& [e, c] : phi.terms()) {
        const std::size_t k = static_cast<std::size_t>(e[0]);
        if (v.size() <= k) v.resize(k + 1, Rat(0));
        v[k] += c;
    }
    trim_trailing_zeros(v);
    return v;
}

} // namespace detail

/// Quotient ring of a plane curve {h = 0} in P^2 with a staircase monomial
/// basis: degree-m monomials whose exponent in the leading variable stays
/// below deg h. Reduction is exact division by h, monic in that variable.
/// When no variable has a nonzero pure-power coefficient, the deterministic
/// change of coordinates x0 <- x0 + lambda*x1 (lambda = 1, 2, ...) is applied
/// first and recorded; callers pass polynomials and points in the original
/// coordinates and the model translates.
class PlaneModel {
public:
    explicit PlaneModel(const PolyQ& h) {
        if (h.vars() != 3) throw ParseError("plane model needs a ternary form");
        if (h.is_zero() || !h.is_homogeneous()) throw ParseError("defining form must be homogeneous and nonzero");
        d_ = h.homogeneous_degree();
        if (d_ < 2) throw ParseError("defining form must have degree at least 2");
        PolyQ g = h;
        lead_ = monic_variable(g);
        if (lead_ < 0) {
            for (lambda_ = 1; lambda_ <= 4 * d_ + 1; ++lambda_) {
                g = shear(h, lambda_);
                lead_ = monic_variable(g);
                if (lead_ >= 0) break;
            }
            if (lead_ < 0) throw ComputeError("cannot make the defining form monic in any variable");
        }
        Expo top(3, 0);
        top[static_cast<std::size_t>(lead_)] = d_;
        h_ = g * (Rat(1) / g.coeff(top));
    }

    int degree() const { return d_; }
    int leading_variable() const { return lead_; }
    int shear_lambda() const { return lambda_; }
    const PolyQ& defining_form() const { return h_; } // internal coordinates, monic

    int hf(int m) const {
        if (m < 0) return 0;
        return static_cast<int>(binom(m + 2, 2) - binom(m - d_ + 2, 2));
    }

    /// Staircase monomials of degree m in descending graded lex order.
    std::vector<Expo> basis(int m) const {
        std::vector<Expo> out;
        for (const Expo& e : monomials_of_degree(3, m))
            if (e[static_cast<std::size_t>(lead_)] < d_) out.push_back(e);
        return out;
    }

    /// Remainder of F modulo h (inputs already in internal coordinates).
    PolyQ reduce(PolyQ F) const {
        for (;;) {
            const auto it = std::find_if(F.terms().begin(), F.terms().end(), [&](const auto& t) {
                return t.first[static_cast<std::size_t>(lead_)] >= d_;
            });
            if (it == F.terms().end()) return F;
            Expo q = it->first;
            q[static_cast<std::size_t>(lead_)] -= d_;
            F -= PolyQ::monomial(3, q, it->second) * h_;
        }
    }

    PolyQ to_internal(const PolyQ& F) const { return lambda_ == 0 ? F : shear(F, lambda_); }

    /// Original-coordinate ambient point -> internal coordinates.
    std::vector<double> point_to_internal(const std::vector<double>& p) const {
        std::vector<double> q = p;
        if (lambda_ != 0) q[0] -= static_cast<double>(lambda_) * p[1];
        return q;
    }

    VecQ coords(const PolyQ& reduced, int m) const {
        const std::vector<Expo> bs = basis(m);
        VecQ v(bs.size(), Rat(0));
        PolyQ rest = reduced;
        for (std::size_t i = 0; i < bs.size(); ++i) {
            const Rat c = rest.coeff(bs[i]);
            if (c != 0) {
                v[i] = c;
                rest.add_term(bs[i], -c);
            }
        }
        if (!rest.is_zero()) throw ComputeError("reduced form is outside the staircase basis");
        return v;
    }

    PolyQ element(int m, const VecQ& v) const {
        const std::vector<Expo> bs = basis(m);
        if (v.size() != bs.size()) throw ComputeError("coordinate size mismatch");
        PolyQ p = PolyQ::zero(3);
        for (std::size_t i = 0; i < bs.size(); ++i)
            if (v[i] != 0) p.add_term(bs[i], v[i]);
        return p;
    }

    VecQ restrict_form(const PolyQ& F, int m) const {
        if (!F.is_zero() && (!F.is_homogeneous() || F.degree() != m))
            throw ComputeError("restrict: wrong degree");
        return coords(reduce(to_internal(F)), m);
    }

    VecQ multiply(int a, const VecQ& pa, int b, const VecQ& pb) const {
        return coords(reduce(element(a, pa) * element(b, pb)), a + b);
    }

    std::vector<double> eval_basis(int m, const std::vector<double>& ambient_point) const {
        const std::vector<double> q = point_to_internal(ambient_point);
        std::vector<double> out;
        for (const Expo& e : basis(m)) {
            double v = 1.0;
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) v *= q[static_cast<std::size_t>(i)];
            out.push_back(v);
        }
        return out;
    }

private:
    static int monic_variable(const PolyQ& g) {
        const int d = g.degree();
        for (int i = 0; i < 3; ++i) {
            Expo e(3, 0);
            e[static_cast<std::size_t>(i)] = d;
            if (g.coeff(e) != 0) return i;
        }
        return -1;
    }

    static PolyQ shear(const PolyQ& F, int lambda) {
        const PolyQ x0 = PolyQ::variable(3, 0);
        const PolyQ x1 = PolyQ::variable(3, 1);
        const PolyQ x2 = PolyQ::variable(3, 2);
        return F.substitute({x0 + x1 * Rat(lambda), x1, x2});
    }

    PolyQ h_ = PolyQ::zero(3);
    int d_ = 0;
    int lead_ = -1;
    int lambda_ = 0;
};

/// Coordinate ring of the image of a rational parametrization
/// [phi_0 : ... : phi_n] : P^1 -> P^n with exact rational forms. The graded
/// piece of degree m is the span V_m of all degree-m monomials in the forms
/// inside the binary forms of degree d*m; a basis is chosen greedily by exact
/// rank in a fixed candidate order, so it is deterministic.
class ParamModelQ {
public:
    explicit ParamModelQ(std::vector<PolyQ> forms) : forms_(std::move(forms)) {
        if (forms_.size() < 2) throw ParseError("parametrization needs at least two forms");
        for (const PolyQ& f : forms_) {
            if (f.vars() != 2) throw ParseError("parametrization forms must be binary");
            if (f.is_zero() || !f.is_homogeneous()) throw ParseError("parametrization forms must be homogeneous and nonzero");
        }
        d_ = forms_[0].homogeneous_degree();
        for (const PolyQ& f : forms_)
            if (f.homogeneous_degree() != d_) throw ParseError("parametrization forms must share one degree");
        check_no_common_root();
    }

    int ambient_vars() const { return static_cast<int>(forms_.size()); }
    int form_degree() const { return d_; }
    const std::vector<PolyQ>& forms() const { return forms_; }

    struct Graded {
        std::vector<Expo> labels;    // selected monomials in the forms
        std::vector<PolyQ> elements; // their binary forms, degree d*m
        std::vector<VecQ> coords;    // dense coordinates of the elements
        std::unique_ptr<SpanSolver> span;
    };

    const Graded& graded(int m) const {
        std::lock_guard<std::mutex> lock(box_->mu);
        while (!box_->cache.count(m)) build_next_locked();
        return box_->cache.at(m);
    }

    int hf(int m) const { return static_cast<int>(graded(m).labels.size()); }

    VecQ restrict_form(const PolyQ& F, int m) const {
        if (F.vars() != ambient_vars()) throw ComputeError("restrict: wrong variable count");
        if (!F.is_zero() && (!F.is_homogeneous() || F.degree() != m))
            throw ComputeError("restrict: wrong degree");
        PolyQ pulled = F.substitute(forms_);
        return express(pulled, m);
    }

    VecQ multiply(int a, const VecQ& pa, int b, const VecQ& pb) const {
        return express(element(a, pa) * element(b, pb), a + b);
    }

    /// Binary form of degree d*m with the given coordinates.
    PolyQ element(int m, const VecQ& v) const {
        const Graded& g = graded(m);
        if (v.size() != g.elements.size()) throw ComputeError("coordinate size mismatch");
        PolyQ p = PolyQ::zero(2);
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] != 0) p += g.elements[i] * v[i];
        return p;
    }

    /// Values of the degree-m basis elements at parameter point (s, t).
    std::vector<double> eval_basis(int m, const std::vector<double>& st) const {
        const Graded& g = graded(m);
        std::vector<double> out;
        out.reserve(g.elements.size());
        for (const PolyQ& e : g.elements)
            out.push_back(poly_to_double(e).eval<double>(st));
        return out;
    }

private:
    void check_no_common_root() const {
        // root at (1:0) iff every form misses the pure x0^d term
        bool all_zero_top = true;
        Expo top{d_, 0};
        for (const PolyQ& f : forms_)
            if (f.coeff(top) != 0) {
                all_zero_top = false;
                break;
            }
        if (all_zero_top) throw ParseError("parametrization forms share the root (1:0)");
        std::vector<Rat> g = detail::dehomogenize(forms_[0]);
        for (std::size_t i = 1; i < forms_.size() && g.size() > 1; ++i)
            g = detail::univariate_gcd(g, detail::dehomogenize(forms_[i]));
        if (g.size() > 1) throw ParseError("parametrization forms share a common root");
    }

    VecQ express(const PolyQ& p, int m) const {
        const Graded& g = graded(m);
        const MonoBasis mb(2, d_ * m);
        if (!p.is_zero() && (!p.is_homogeneous() || p.degree() != d_ * m))
            throw ComputeError("element has the wrong degree");
        return g.span->solve(p.dense_coords(mb));
    }

    void build_next_locked() const {
        const int m = box_->cache.empty() ? 0 : box_->cache.rbegin()->first + 1;
        Graded g;
        if (m == 0) {
            g.labels = {Expo(static_cast<std::size_t>(ambient_vars()), 0)};
            g.elements = {PolyQ::one(2)};
        } else {
            const Graded& prev = box_->cache.at(m - 1);
            ExactEchelon ech(d_ * m + 1);
            std::set<Expo> seen;
            const MonoBasis mb(2, d_ * m);
            for (std::size_t pi = 0; pi < prev.labels.size(); ++pi)
                for (int i = 0; i < ambient_vars(); ++i) {
                    Expo label = prev.labels[pi];
                    ++label[static_cast<std::size_t>(i)];
                    if (!seen.insert(label).second) continue;
                    PolyQ cand = prev.elements[pi] * forms_[static_cast<std::size_t>(i)];
                    if (ech.insert(cand.dense_coords(mb))) {
                        g.labels.push_back(label);
                        g.elements.push_back(std::move(cand));
                    }
                }
        }
        const MonoBasis mb(2, d_ * m);
        for (const PolyQ& e : g.elements) g.coords.push_back(e.dense_coords(mb));
        g.span = std::make_unique<SpanSolver>(g.coords);
        box_->cache.emplace(m, std::move(g));
    }

    struct Box {
        std::mutex mu;
        std::map<int, Graded> cache;
    };

    std::vector<PolyQ> forms_;
    int d_ = 0;
    std::shared_ptr<Box> box_ = std::make_shared<Box>();
};

/// Floating-point fallback of ParamModelQ for parametrizations given with
/// double coefficients. Rank decisions cut singular values at
/// 1e-9 * (largest singular value); a warning handler hears about any basis
/// whose spectral gap at the cut is below 10^3.
class ParamModelD {
public:
    using Warn = std::function<void(const std::string&)>;

    explicit ParamModelD(std::vector<PolyD> forms, Warn warn = {})
        : forms_(std::move(forms)), warn_(std::move(warn)) {
        if (forms_.size() < 2) throw ParseError("parametrization needs at least two forms");
        for (const PolyD& f : forms_) {
            if (f.vars() != 2) throw ParseError("parametrization forms must be binary");
            if (f.is_zero() || !f.is_homogeneous()) throw ParseError("parametrization forms must be homogeneous and nonzero");
        }
        d_ = forms_[0].homogeneous_degree();
        for (const PolyD& f : forms_)
            if (f.homogeneous_degree() != d_) throw ParseError("parametrization forms must share one degree");
    }

    int ambient_vars() const { return static_cast<int>(forms_.size()); }
    int form_degree() const { return d_; }
    const std::vector<PolyD>& forms() const { return forms_; }

    struct Graded {
        std::vector<Expo> labels;
        std::vector<PolyD> elements;
        Eigen::MatrixXd basis;                              // columns are basis coordinates
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> solver; // least squares in the basis
    };

    const Graded& graded(int m) const {
        std::lock_guard<std::mutex> lock(box_->mu);
        while (!box_->cache.count(m)) build_next_locked();
        return box_->cache.at(m);
    }

    int hf(int m) const { return static_cast<int>(graded(m).labels.size()); }

    Eigen::VectorXd restrict_form(const PolyD& F, int m) const {
        if (F.vars() != ambient_vars()) throw ComputeError("restrict: wrong variable count");
        if (!F.is_zero() && (!F.is_homogeneous() || F.degree() != m))
            throw ComputeError("restrict: wrong degree");
        return express(F.substitute(forms_), m);
    }

    Eigen::VectorXd multiply(int a, const Eigen::VectorXd& pa, int b, const Eigen::VectorXd& pb) const {
        return express(element(a, pa) * element(b, pb), a + b);
    }

    PolyD element(int m, const Eigen::VectorXd& v) const {
        const Graded& g = graded(m);
        if (v.size() != static_cast<Eigen::Index>(g.elements.size())) throw ComputeError("coordinate size mismatch");
        PolyD p = PolyD::zero(2);
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (v[i] != 0) p += g.elements[static_cast<std::size_t>(i)] * v[i];
        return p;
    }

    std::vector<double> eval_basis(int m, const std::vector<double>& st) const {
        const Graded& g = graded(m);
        std::vector<double> out;
        out.reserve(g.elements.size());
        for (const PolyD& e : g.elements) out.push_back(e.eval<double>(st));
        return out;
    }

private:
    Eigen::VectorXd dense(const PolyD& p, const MonoBasis& mb) const {
        const std::vector<double> v = p.dense_coords(mb);
        Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
        return x;
    }

    Eigen::VectorXd express(const PolyD& p, int m) const {
        const Graded& g = graded(m);
        const MonoBasis mb(2, d_ * m);
        if (!p.is_zero() && (!p.is_homogeneous() || p.degree() != d_ * m))
            throw ComputeError("element has the wrong degree");
        const Eigen::VectorXd rhs = dense(p, mb);
        const Eigen::VectorXd c = g.solver.solve(rhs);
        const double resid = (g.basis * c - rhs).norm();
        if (resid > 1e-6 * (1.0 + rhs.norm()))
            throw ComputeError("element is outside the graded basis span");
        return c;
    }

    void build_next_locked() const {
        const int m = box_->cache.empty() ? 0 : box_->cache.rbegin()->first + 1;
        Graded g;
        const MonoBasis mb(2, d_ * m);
        if (m == 0) {
            g.labels = {Expo(static_cast<std::size_t>(ambient_vars()), 0)};
            g.elements = {PolyD::one(2)};
        } else {
            const Graded& prev = box_->cache.at(m - 1);
            // candidates in a fixed order, deduplicated by label
            std::vector<Expo> labels;
            std::vector<PolyD> cands;
            std::set<Expo> seen;
            for (std::size_t pi = 0; pi < prev.labels.size(); ++pi)
                for (int i = 0; i < ambient_vars(); ++i) {
                    Expo label = prev.labels[pi];
                    ++label[static_cast<std::size_t>(i)];
                    if (!seen.insert(label).second) continue;
                    labels.push_back(label);
                    cands.push_back(prev.elements[pi] * forms_[static_cast<std::size_t>(i)]);
                }
            Eigen::MatrixXd C(mb.size(), static_cast<Eigen::Index>(cands.size()));
            for (std::size_t j = 0; j < cands.size(); ++j)
                C.col(static_cast<Eigen::Index>(j)) = dense(cands[j], mb);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
            const Eigen::VectorXd sv = svd.singularValues();
            const double smax = sv.size() ? sv[0] : 0.0;
            const double cut = 1e-9 * smax;
            int rank = 0;
            for (Eigen::Index i = 0; i < sv.size(); ++i)
                if (sv[i] > cut) ++rank;
            if (warn_ && rank > 0 && rank < sv.size() && sv[rank - 1] < 1e3 * sv[rank])
                warn_("graded basis at degree " + std::to_string(m) +
                      ": spectral gap at the rank cut is below 1e3");
            // greedy selection in candidate order by orthogonal residual
            Eigen::MatrixXd ortho(mb.size(), rank);
            int taken = 0;
            for (std::size_t j = 0; j < cands.size() && taken < rank; ++j) {
                Eigen::VectorXd v = C.col(static_cast<Eigen::Index>(j));
                for (int t = 0; t < taken; ++t) v -= ortho.col(t).dot(v) * ortho.col(t);
                for (int t = 0; t < taken; ++t) v -= ortho.col(t).dot(v) * ortho.col(t);
                if (v.norm() > cut) {
                    ortho.col(taken) = v / v.norm();
                    ++taken;
                    g.labels.push_back(labels[j]);
                    g.elements.push_back(cands[j]);
                }
            }
            if (taken != rank) throw ComputeError("graded basis selection disagrees with the rank");
        }
        g.basis.resize(mb.size(), static_cast<Eigen::Index>(g.elements.size()));
        for (std::size_t j = 0; j < g.elements.size(); ++j)
            g.basis.col(static_cast<Eigen::Index>(j)) = dense(g.elements[j], mb);
        g.solver.compute(g.basis);
        box_->cache.emplace(m, std::move(g));
    }

    struct Box {
        std::mutex mu;
        std::map<int, Graded> cache;
    };

    std::vector<PolyD> forms_;
    int d_ = 0;
    Warn warn_;
    std::shared_ptr<Box> box_ = std::make_shared<Box>();
};

/// The full polynomial ring on P^n (no curve): graded pieces are all
/// monomials. Used for experiments on P^2 and ambient surface counts.
class RingModel {
public:
    explicit RingModel(int n) : n_(n) {
        if (n < 1) throw ParseError("ring model needs n >= 1");
    }

    int projective_dim() const { return n_; }
    int ambient_vars() const { return n_ + 1; }

    int hf(int m) const { return m < 0 ? 0 : static_cast<int>(binom(m + n_, n_)); }

    std::vector<Expo> basis(int m) const { return monomials_of_degree(n_ + 1, m); }

    VecQ restrict_form(const PolyQ& F, int m) const {
        if (F.vars() != n_ + 1) throw ComputeError("restrict: wrong variable count");
        if (!F.is_zero() && (!F.is_homogeneous() || F.degree() != m))
            throw ComputeError("restrict: wrong degree");
        return F.dense_coords(MonoBasis(n_ + 1, m));
    }

    VecQ multiply(int a, const VecQ& pa, int b, const VecQ& pb) const {
        const MonoBasis ma(n_ + 1, a), mbb(n_ + 1, b), mab(n_ + 1, a + b);
        const PolyQ p = PolyQ::from_dense(ma, pa) * PolyQ::from_dense(mbb, pb);
        return p.dense_coords(mab);
    }

    PolyQ element(int m, const VecQ& v) const { return PolyQ::from_dense(MonoBasis(n_ + 1, m), v); }

    std::vector<double> eval_basis(int m, const std::vector<double>& pt) const {
        std::vector<double> out;
        for (const Expo& e : basis(m)) {
            double v = 1.0;
            for (int i = 0; i <= n_; ++i)
                for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) v *= pt[static_cast<std::size_t>(i)];
            out.push_back(v);
        }
        return out;
    }

private:
    int n_;
};

/// One handle over the three graded models. Exact operations throw for the
/// floating-point parametrized model; callers can branch on is_exact().
class CurveModel {
public:
    using Variant = std::variant<PlaneModel, ParamModelQ, ParamModelD, RingModel>;

    explicit CurveModel(Variant v) : v_(std::make_shared<Variant>(std::move(v))) {}

    static CurveModel plane(const PolyQ& h) { return CurveModel(Variant(PlaneModel(h))); }
    static CurveModel param(std::vector<PolyQ> forms) { return CurveModel(Variant(ParamModelQ(std::move(forms)))); }
    static CurveModel param_float(std::vector<PolyD> forms, ParamModelD::Warn warn = {}) {
        return CurveModel(Variant(ParamModelD(std::move(forms), std::move(warn))));
    }
    static CurveModel ring(int n) { return CurveModel(Variant(RingModel(n))); }

    const Variant& variant() const { return *v_; }
    bool is_exact() const { return !std::holds_alternative<ParamModelD>(*v_); }
    bool is_ring() const { return std::holds_alternative<RingModel>(*v_); }

    /// Number of ambient homogeneous coordinates (n+1 for a model in P^n).
    int ambient_vars() const {
        return std::visit(
            [](const auto& m) -> int {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, PlaneModel>)
                    return 3;
                else
                    return m.ambient_vars();
            },
            *v_);
    }

    int hilbert_function(int m) const {
        if (m < 0) return 0;
        return std::visit([&](const auto& mod) { return mod.hf(m); }, *v_);
    }

    /// Largest degree datum of the presentation; scan caps scale with it.
    int ambient_degree_hint() const {
        return std::visit(
            [](const auto& m) -> int {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, PlaneModel>)
                    return m.degree();
                else if constexpr (std::is_same_v<M, ParamModelQ> || std::is_same_v<M, ParamModelD>)
                    return m.form_degree();
                else
                    return m.projective_dim();
            },
            *v_);
    }

    VecQ restrict(const PolyQ& F, int m) const {
        return std::visit(
            [&](const auto& mod) -> VecQ {
                using M = std::decay_t<decltype(mod)>;
                if constexpr (std::is_same_v<M, ParamModelD>)
                    throw ComputeError("model is floating point; exact restriction unavailable");
                else
                    return mod.restrict_form(F, m);
            },
            *v_);
    }

    VecQ restrict(const PolyQ& F) const {
        if (F.is_zero()) throw ComputeError("restrict: degree of the zero form is ambiguous");
        return restrict(F, F.homogeneous_degree());
    }

    VecQ multiply(int a, const VecQ& pa, int b, const VecQ& pb) const {
        return std::visit(
            [&](const auto& mod) -> VecQ {
                using M = std::decay_t<decltype(mod)>;
                if constexpr (std::is_same_v<M, ParamModelD>)
                    throw ComputeError("model is floating point; exact multiplication unavailable");
                else
                    return mod.multiply(a, pa, b, pb);
            },
            *v_);
    }

    Eigen::VectorXd restrict_d(const PolyD& F, int m) const {
        return std::visit(
            [&](const auto& mod) -> Eigen::VectorXd {
                using M = std::decay_t<decltype(mod)>;
                if constexpr (std::is_same_v<M, ParamModelD>) {
                    return mod.restrict_form(F, m);
                } else {
                    return to_eigen(mod.restrict_form(poly_to_exact(F), m));
                }
            },
            *v_);
    }

    Eigen::VectorXd multiply_d(int a, const Eigen::VectorXd& pa, int b, const Eigen::VectorXd& pb) const {
        return std::visit(
            [&](const auto& mod) -> Eigen::VectorXd {
                using M = std::decay_t<decltype(mod)>;
                if constexpr (std::is_same_v<M, ParamModelD>) {
                    return mod.multiply(a, pa, b, pb);
                } else {
                    return to_eigen(mod.multiply(a, from_eigen(pa), b, from_eigen(pb)));
                }
            },
            *v_);
    }

    /// Values of the degree-m basis at a model-specific real point:
    /// an ambient affine representative for plane and ring models, a
    /// parameter pair (s, t) for parametrized models.
    std::vector<double> eval_basis(int m, const std::vector<double>& pt) const {
        return std::visit([&](const auto& mod) { return mod.eval_basis(m, pt); }, *v_);
    }

private:
    static Eigen::VectorXd to_eigen(const VecQ& v) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = rat_double(v[i]);
        return x;
    }

    static VecQ from_eigen(const Eigen::VectorXd& v) {
        VecQ x(static_cast<std::size_t>(v.size()));
        for (Eigen::Index i = 0; i < v.size(); ++i) x[static_cast<std::size_t>(i)] = rat_of_double(v[i]);
        return x;
    }

    std::shared_ptr<Variant> v_;
};

} // namespace sosmult
