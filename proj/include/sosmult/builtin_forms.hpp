#pragma once

#include <vector>

#include "sosmult/errors.hpp"
#include "sosmult/polynomial.hpp"

namespace sosmult {

/// Tricuspidal plane quartic
/// (x0^2+x1^2)^2 + 2 x2^2 (x0^2+x1^2) - (1/3) x2^4 - (8/3) x2 (x0^3 - 3 x0 x1^2),
/// the hypocycloid traced by t -> [(2cos t + cos 2t)/3 : (2sin t - sin 2t)/3 : 1]
/// with cusps at [1:0:1], [-1/2 : +-sqrt(3)/2 : 1].
inline PolyQ deltoid_form() {
    const PolyQ x0 = PolyQ::variable(3, 0);
    const PolyQ x1 = PolyQ::variable(3, 1);
    const PolyQ x2 = PolyQ::variable(3, 2);
    const PolyQ s = x0 * x0 + x1 * x1;
    return s * s + (x2 * x2 * s) * Rat(2) + (x2.pow(4)) * rat_make(-1, 3)
         + (x2 * (x0.pow(3) - x0 * x1 * x1 * Rat(3))) * rat_make(-8, 3);
}

/// Sum of the squares of all coordinates, x_0^2 + ... + x_{vars-1}^2.
inline PolyQ unit_quadric(int vars) {
    PolyQ s = PolyQ::zero(vars);
    for (int i = 0; i < vars; ++i) {
        const PolyQ xi = PolyQ::variable(vars, i);
        s += xi * xi;
    }
    return s;
}

/// (x2^2 - x1^2 - x0^2) (x0^2 + x1^2 + x2^2)^(j-1): nonnegative on the
/// deltoid (the conic factor vanishes at the three cusps and is positive on
/// the rest of the real curve), with nonzero derivation at each cusp.
inline PolyQ deltoid_witness(int j) {
    if (j < 1) throw ComputeError("deltoid_witness: j must be >= 1");
    const PolyQ x0 = PolyQ::variable(3, 0);
    const PolyQ x1 = PolyQ::variable(3, 1);
    const PolyQ x2 = PolyQ::variable(3, 2);
    return (x2 * x2 - x1 * x1 - x0 * x0) * unit_quadric(3).pow(j - 1);
}

/// x0^4 x1^2 + x0^2 x1^4 - 3 x0^2 x1^2 x2^2 + x2^6: nonnegative on R^3 but
/// not a sum of squares; its product with the unit quadric is one.
inline PolyQ motzkin_form() {
    PolyQ m = PolyQ::zero(3);
    m.add_term({4, 2, 0}, Rat(1));
    m.add_term({2, 4, 0}, Rat(1));
    m.add_term({2, 2, 2}, Rat(-3));
    m.add_term({0, 0, 6}, Rat(1));
    return m;
}

/// Degree-4 binary forms parametrizing a rational plane quartic with a real
/// triple point at [0:0:1] (the images of [1:0], [0:1], [1:1] coincide):
/// [x0:x1] -> [x0^2 x1 (x0-x1) : x0 x1^2 (x0-x1) : x0^4 + x1^4].
inline std::vector<PolyQ> quartic_triple_point_forms() {
    PolyQ f0 = PolyQ::zero(2), f1 = PolyQ::zero(2), f2 = PolyQ::zero(2);
    f0.add_term({3, 1}, Rat(1));
    f0.add_term({2, 2}, Rat(-1));
    f1.add_term({2, 2}, Rat(1));
    f1.add_term({1, 3}, Rat(-1));
    f2.add_term({4, 0}, Rat(1));
    f2.add_term({0, 4}, Rat(1));
    return {f0, f1, f2};
}

} // namespace sosmult
