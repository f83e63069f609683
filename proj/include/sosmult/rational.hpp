#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "sosmult/errors.hpp"

namespace sosmult {

using Int = mpz_class;
using Rat = mpq_class;

/// Parse a rational from "p/q" or "p" (base 10). Throws ParseError on
/// malformed input or zero denominator.
inline Rat rat_parse(const std::string& s) {
    if (s.empty()) throw ParseError("empty rational literal");
    Rat r;
    if (r.set_str(s, 10) != 0) throw ParseError("bad rational literal: '" + s + "'");
    if (r.get_den() == 0) throw ParseError("zero denominator: '" + s + "'");
    r.canonicalize();
    return r;
}

/// Canonical "p/q" (or "p" when the denominator is 1).
inline std::string rat_str(const Rat& r) { return r.get_str(10); }

/// p/q in lowest terms. GMP's two-argument constructor stores the pair
/// verbatim and its arithmetic assumes canonical form, so every fraction
/// built from a numerator and denominator must pass through here.
inline Rat rat_make(const Int& p, const Int& q) {
    if (q == 0) throw ComputeError("rat_make: zero denominator");
    Rat r(p, q);
    r.canonicalize();
    return r;
}

inline double rat_double(const Rat& r) { return r.get_d(); }

/// Exact conversion; every finite double is a rational.
inline Rat rat_of_double(double x) { return Rat(x); }

/// Binomial coefficient with the usual convention C(n,k) = 0 for n < k or
/// negative n. Desk-scale arguments only; the result must fit in 64 bits.
inline std::int64_t binom(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || n < k) return 0;
    if (k > n - k) k = n - k;
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline Int int_gcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

inline Int int_lcm(const Int& a, const Int& b) {
    Int l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

/// ceil(a/b) for integers with b > 0.
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return a / b + ((a % b != 0 && (a ^ b) >= 0) ? 1 : 0);
}

} // namespace sosmult
