#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "sosmult/errors.hpp"
#include "sosmult/rational.hpp"

namespace sosmult {

/// Exponent vector, one entry per variable x0..xn.
using Expo = std::vector<int>;

inline int expo_degree(const Expo& e) { return std::accumulate(e.begin(), e.end(), 0); }

/// Global monomial order: graded lexicographic with x0 > x1 > ... .
/// Returns true when a strictly precedes b in descending grlex listing,
/// i.e. a is the larger monomial.
struct GrlexGreater {
    bool operator()(const Expo& a, const Expo& b) const {
        const int da = expo_degree(a), db = expo_degree(b);
        if (da != db) return da > db;
        return a > b; // same degree: lexicographic on exponents, x0 first
    }
};

inline Expo expo_mul(const Expo& a, const Expo& b) {
    Expo r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

/// All monomials of the given total degree in `vars` variables, listed in
/// descending grlex order (x0^deg first). This listing fixes the coordinate
/// system of every ambient graded piece.
inline std::vector<Expo> monomials_of_degree(int vars, int deg) {
    if (vars <= 0 || deg < 0) return {};
    std::vector<Expo> out;
    Expo cur(static_cast<std::size_t>(vars), 0);
    // Recursive descent: leading variables take the largest exponents first.
    auto rec = [&](auto&& self, int idx, int rem) -> void {
        if (idx == vars - 1) {
            cur[idx] = rem;
            out.push_back(cur);
            return;
        }
        for (int e = rem; e >= 0; --e) {
            cur[idx] = e;
            self(self, idx + 1, rem - e);
        }
        cur[idx] = 0;
    };
    rec(rec, 0, deg);
    return out;
}

/// Indexed monomial listing for one graded piece; coordinates of dense
/// coefficient vectors refer to this.
struct MonoBasis {
    int vars = 0;
    int deg = 0;
    std::vector<Expo> list;
    std::map<Expo, int, GrlexGreater> index;

    MonoBasis() = default;
    MonoBasis(int vars_, int deg_) : vars(vars_), deg(deg_), list(monomials_of_degree(vars_, deg_)) {
        for (int i = 0; i < static_cast<int>(list.size()); ++i) index.emplace(list[i], i);
    }

    int size() const { return static_cast<int>(list.size()); }

    int at(const Expo& e) const {
        auto it = index.find(e);
        if (it == index.end()) throw ComputeError("monomial outside graded piece");
        return it->second;
    }
};

} // namespace sosmult
