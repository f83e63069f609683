#pragma once

#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sosmult/errors.hpp"
#include "sosmult/monomial.hpp"
#include "sosmult/rational.hpp"

namespace sosmult {

/// Sparse multivariate polynomial over T (exact Rat or double). Terms are
/// kept in descending grlex order and never store zero coefficients.
template <class T>
class Polynomial {
public:
    using Terms = std::map<Expo, T, GrlexGreater>;

    Polynomial() = default;
    explicit Polynomial(int vars) : vars_(vars) {}

    static Polynomial zero(int vars) { return Polynomial(vars); }

    static Polynomial one(int vars) {
        Polynomial p(vars);
        p.add_term(Expo(static_cast<std::size_t>(vars), 0), T(1));
        return p;
    }

    static Polynomial monomial(int vars, const Expo& e, const T& c = T(1)) {
        Polynomial p(vars);
        p.add_term(e, c);
        return p;
    }

    /// Linear form c * x_i.
    static Polynomial variable(int vars, int i, const T& c = T(1)) {
        Expo e(static_cast<std::size_t>(vars), 0);
        e[static_cast<std::size_t>(i)] = 1;
        return monomial(vars, e, c);
    }

    int vars() const { return vars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Expo& e, const T& c) {
        if (static_cast<int>(e.size()) != vars_) throw ComputeError("exponent width mismatch");
        auto [it, fresh] = terms_.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == T(0)) terms_.erase(it);
        } else if (it->second == T(0)) {
            terms_.erase(it);
        }
    }

    T coeff(const Expo& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? T(0) : it->second;
    }

    /// Max total degree over terms; -1 for the zero polynomial.
    int degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, expo_degree(e));
        return d;
    }

    bool is_homogeneous() const {
        int d = -1;
        for (const auto& [e, c] : terms_) {
            const int de = expo_degree(e);
            if (d < 0) d = de;
            else if (de != d) return false;
        }
        return true;
    }

    /// Degree of a homogeneous polynomial; zero polynomial passes as any
    /// degree, reported as -1.
    int homogeneous_degree() const {
        if (!is_homogeneous()) throw ComputeError("polynomial is not homogeneous");
        return degree();
    }

    Polynomial operator-() const {
        Polynomial r(vars_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }

    Polynomial& operator+=(const Polynomial& o) {
        require_same_space(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o) {
        require_same_space(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    Polynomial& operator*=(const T& c) {
        if (c == T(0)) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, v] : terms_) v *= c;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const T& c) { return a *= c; }
    friend Polynomial operator*(const T& c, Polynomial a) { return a *= c; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.require_same_space(b);
        Polynomial r(a.vars_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) r.add_term(expo_mul(ea, eb), ca * cb);
        return r;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.vars_ == b.vars_ && a.terms_ == b.terms_;
    }

    Polynomial pow(int n) const {
        if (n < 0) throw ComputeError("negative power");
        Polynomial r = one(vars_);
        Polynomial base = *this;
        while (n > 0) {
            if (n & 1) r = r * base;
            base = base * base;
            n >>= 1;
        }
        return r;
    }

    /// Evaluate at a point with scalar type S (double, complex, Rat...).
    template <class S>
    S eval(const std::vector<S>& x) const {
        if (static_cast<int>(x.size()) != vars_) throw ComputeError("evaluation point width mismatch");
        S acc(0);
        for (const auto& [e, c] : terms_) {
            S t = scalar_cast<S>(c);
            for (int i = 0; i < vars_; ++i)
                for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) t *= x[static_cast<std::size_t>(i)];
            acc += t;
        }
        return acc;
    }

    /// Compose: substitute forms[i] for x_i. All forms must share a variable
    /// count; for homogeneous forms of common degree the result is again
    /// homogeneous.
    Polynomial substitute(const std::vector<Polynomial>& forms) const {
        if (static_cast<int>(forms.size()) != vars_) throw ComputeError("substitute: arity mismatch");
        const int tvars = forms.empty() ? 0 : forms[0].vars();
        // power cache per variable
        std::vector<std::vector<Polynomial>> pw(forms.size());
        for (std::size_t i = 0; i < forms.size(); ++i) pw[i].push_back(one(tvars));
        Polynomial r(tvars);
        for (const auto& [e, c] : terms_) {
            Polynomial t = one(tvars) * c;
            for (std::size_t i = 0; i < forms.size(); ++i) {
                const int k = e[i];
                while (static_cast<int>(pw[i].size()) <= k) pw[i].push_back(pw[i].back() * forms[i]);
                if (k > 0) t = t * pw[i][static_cast<std::size_t>(k)];
            }
            r += t;
        }
        return r;
    }

    /// Dense coefficient vector over monomials_of_degree(vars, deg).
    /// Requires the polynomial to live inside that graded piece.
    std::vector<T> dense_coords(const MonoBasis& mb) const {
        if (mb.vars != vars_) throw ComputeError("dense_coords: wrong variable count");
        std::vector<T> v(static_cast<std::size_t>(mb.size()), T(0));
        for (const auto& [e, c] : terms_) v[static_cast<std::size_t>(mb.at(e))] = c;
        return v;
    }

    static Polynomial from_dense(const MonoBasis& mb, const std::vector<T>& v) {
        if (static_cast<int>(v.size()) != mb.size()) throw ComputeError("from_dense: size mismatch");
        Polynomial p(mb.vars);
        for (int i = 0; i < mb.size(); ++i)
            if (v[static_cast<std::size_t>(i)] != T(0)) p.terms_.emplace(mb.list[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
        return p;
    }

    std::string str(const std::vector<std::string>& names = {}) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            if (!first) os << " + ";
            first = false;
            os << coeff_str(c);
            for (int i = 0; i < vars_; ++i) {
                const int k = e[static_cast<std::size_t>(i)];
                if (k == 0) continue;
                os << "*";
                if (static_cast<std::size_t>(i) < names.size()) os << names[static_cast<std::size_t>(i)];
                else os << "x" << i;
                if (k > 1) os << "^" << k;
            }
        }
        return os.str();
    }

private:
    void require_same_space(const Polynomial& o) const {
        if (vars_ != o.vars_) throw ComputeError("variable count mismatch");
    }

    template <class S, class C>
    static S scalar_cast(const C& c) {
        if constexpr (std::is_same_v<C, Rat>) {
            if constexpr (std::is_same_v<S, Rat>) return c;
            else return S(rat_double(c));
        } else {
            return S(c);
        }
    }

    static std::string coeff_str(const Rat& c) { return rat_str(c); }
    static std::string coeff_str(double c) {
        std::ostringstream os;
        os.precision(17);
        os << c;
        return os.str();
    }

    int vars_ = 0;
    Terms terms_;
};

using PolyQ = Polynomial<Rat>;
using PolyD = Polynomial<double>;

/// poly_mul per contract: same variable count (checked inside operator*)
/// and exact in rational mode.
template <class T>
Polynomial<T> poly_mul(const Polynomial<T>& p, const Polynomial<T>& q) {
    return p * q;
}

/// Exact conversion of a float-mode polynomial (doubles are rationals).
inline PolyQ poly_to_exact(const PolyD& p) {
    PolyQ r(p.vars());
    for (const auto& [e, c] : p.terms()) r.add_term(e, rat_of_double(c));
    return r;
}

inline PolyD poly_to_double(const PolyQ& p) {
    PolyD r(p.vars());
    for (const auto& [e, c] : p.terms()) r.add_term(e, rat_double(c));
    return r;
}

} // namespace sosmult
