#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "sosmult/builtins.hpp"
#include "sosmult/linalg_exact.hpp"
#include "sosmult/models.hpp"

using namespace sosmult;

namespace {

PolyQ random_form(std::mt19937& rng, int vars, int deg) {
    std::uniform_int_distribution<int> num(-5, 5);
    std::uniform_int_distribution<int> den(1, 4);
    PolyQ p = PolyQ::zero(vars);
    for (const Expo& e : monomials_of_degree(vars, deg)) {
        const int n = num(rng);
        if (n != 0) p.add_term(e, rat_make(n, den(rng)));
    }
    if (p.is_zero()) p.add_term(monomials_of_degree(vars, deg).front(), Rat(1));
    return p;
}

// Independent Hilbert-function oracle for a plane curve {h = 0}: the degree-m
// piece of the quotient has dimension C(m+2,2) minus the exact rank of
// multiplication by h from degree m - d.
int hf_by_rank(const PolyQ& h, int m) {
    const int d = h.homogeneous_degree();
    const MonoBasis target(3, m);
    std::vector<VecQ> rows;
    if (m >= d)
        for (const Expo& e : monomials_of_degree(3, m - d))
            rows.push_back((PolyQ::monomial(3, e) * h).dense_coords(target));
    const int rank = rows.empty() ? 0 : rank_and_nullspace(MatQ::from_rows(rows)).rank;
    return target.size() - rank;
}

VecQ unit_vec(std::size_t n, std::size_t i) {
    VecQ v(n, Rat(0));
    v[i] = 1;
    return v;
}

} // namespace

TEST_CASE("graded basis sizes on the contract examples") {
    CurveModel quartic = builtin_curve("quartic-triple-point");
    CHECK(quartic.hilbert_function(1) == 3);
    CHECK(quartic.hilbert_function(2) == 6);
    CHECK(quartic.hilbert_function(0) == 1);

    CurveModel deltoid = builtin_curve("deltoid");
    CHECK(deltoid.hilbert_function(2) == 6);
    CHECK(deltoid.hilbert_function(0) == 1);

    CurveModel p2 = builtin_curve("p2");
    CHECK(p2.hilbert_function(0) == 1);
    CHECK(p2.hilbert_function(3) == 10);

    // plane conic: HF(3) = C(5,2) - C(3,2) = 7
    PolyQ conic = unit_quadric(3);
    CHECK(CurveModel::plane(conic).hilbert_function(3) == 7);
}

TEST_CASE("plane-model Hilbert function is exact for d in 2..6, m in 0..12") {
    for (int d = 2; d <= 6; ++d) {
        PolyQ h = PolyQ::zero(3);
        Expo e0(3, 0), e1(3, 0), e2(3, 0), mixed(3, 0);
        e0[0] = d;
        e1[1] = d;
        e2[2] = d;
        mixed[0] = d - 1;
        mixed[1] = 1;
        h.add_term(e0, Rat(1));
        h.add_term(e1, Rat(1));
        h.add_term(e2, Rat(1));
        h.add_term(mixed, rat_make(-2, 3));
        const PlaneModel model(h);
        for (int m = 0; m <= 12; ++m) {
            const int closed = static_cast<int>(binom(m + 2, 2) - binom(m - d + 2, 2));
            CHECK(model.hf(m) == closed);
            CHECK(static_cast<int>(model.basis(m).size()) == closed);
            CHECK(hf_by_rank(h, m) == closed);
        }
    }
    // and the deltoid itself
    const PolyQ h = deltoid_form();
    for (int m = 0; m <= 12; ++m) CHECK(hf_by_rank(h, m) == static_cast<int>(binom(m + 2, 2) - binom(m - 2, 2)));
}

TEST_CASE("parametrized model dimensions match the rank oracle") {
    ParamModelQ model(quartic_triple_point_forms());
    // oracle: exact rank of the full candidate matrix (all monomials in the forms)
    const auto& forms = model.forms();
    for (int m = 1; m <= 4; ++m) {
        const MonoBasis mb(2, 4 * m);
        std::vector<VecQ> rows;
        for (const Expo& e : monomials_of_degree(3, m)) {
            PolyQ prod = PolyQ::one(2);
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) prod = prod * forms[static_cast<std::size_t>(i)];
            rows.push_back(prod.dense_coords(mb));
        }
        CHECK(model.hf(m) == rank_and_nullspace(MatQ::from_rows(rows)).rank);
    }
    // Hilbert polynomial 4m - 2 from m = 2 on
    CHECK(model.hf(2) == 6);
    CHECK(model.hf(3) == 10);
    CHECK(model.hf(4) == 14);
}

TEST_CASE("restrict on the contract examples") {
    CurveModel deltoid = builtin_curve("deltoid");
    const PolyQ h = deltoid_form();
    const VecQ zero = deltoid.restrict(h);
    for (const Rat& c : zero) CHECK(c == 0);

    // the conic through the cusps does not contain the curve
    const PolyQ conic = deltoid_witness(1);
    bool nonzero = false;
    for (const Rat& c : deltoid.restrict(conic))
        if (c != 0) nonzero = true;
    CHECK(nonzero);

    // coordinate pullback on the parametrized model: restrict(x_i) = phi_i
    CurveModel quartic = builtin_curve("quartic-triple-point");
    for (int i = 0; i < 3; ++i) {
        const VecQ v = quartic.restrict(PolyQ::variable(3, i));
        REQUIRE(v.size() == 3);
        for (int l = 0; l < 3; ++l) CHECK(v[static_cast<std::size_t>(l)] == (l == i ? 1 : 0));
    }
}

TEST_CASE("multiplication is unital, commutative, bilinear, and a ring map") {
    std::mt19937 rng(31337u);
    for (const char* name : {"deltoid", "quartic-triple-point", "p2"}) {
        CurveModel model = builtin_curve(name);
        const int a = 2, b = 1;
        const std::size_t na = static_cast<std::size_t>(model.hilbert_function(a));
        const std::size_t nb = static_cast<std::size_t>(model.hilbert_function(b));

        // unit
        const VecQ one = model.restrict(PolyQ::one(3), 0);
        for (std::size_t i = 0; i < nb; ++i) {
            const VecQ ei = unit_vec(nb, i);
            CHECK(model.multiply(0, one, b, ei) == ei);
        }

        for (int round = 0; round < 5; ++round) {
            VecQ p(na), q(na), r(nb);
            std::uniform_int_distribution<int> num(-4, 4);
            std::uniform_int_distribution<int> den(1, 3);
            for (Rat& c : p) c = rat_make(num(rng), den(rng));
            for (Rat& c : q) c = rat_make(num(rng), den(rng));
            for (Rat& c : r) c = rat_make(num(rng), den(rng));
            CHECK(model.multiply(a, p, b, r) == model.multiply(b, r, a, p));
            // bilinearity in the first slot
            VecQ pq(na);
            for (std::size_t i = 0; i < na; ++i) pq[i] = p[i] + Rat(3) * q[i];
            const VecQ lhs = model.multiply(a, pq, b, r);
            const VecQ m1 = model.multiply(a, p, b, r);
            const VecQ m2 = model.multiply(a, q, b, r);
            REQUIRE(lhs.size() == m1.size());
            for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == m1[i] + Rat(3) * m2[i]);
        }

        // ring map: restrict(F*G) = restrict(F) * restrict(G)
        for (int round = 0; round < 5; ++round) {
            const PolyQ F = random_form(rng, 3, 2);
            const PolyQ G = random_form(rng, 3, 3);
            const VecQ direct = model.restrict(F * G, 5);
            const VecQ mapped = model.multiply(2, model.restrict(F, 2), 3, model.restrict(G, 3));
            CHECK(direct == mapped);
        }
    }
}

TEST_CASE("plane reduction matches one explicit division step") {
    const PlaneModel model(deltoid_form());
    REQUIRE(model.leading_variable() == 0);
    // x0^3 * x0 = x0^4 reduces to x0^4 - h, which has no x0-power >= 4
    const PolyQ r = model.reduce(PolyQ::monomial(3, {4, 0, 0}));
    PolyQ expect = PolyQ::monomial(3, {4, 0, 0}) - model.defining_form();
    CHECK(r == expect);
    for (const auto& [e, c] : r.terms()) CHECK(e[0] < 4);
}

TEST_CASE("shear handles a defining form with no pure power") {
    // x0^2 x1 + x1^2 x2 + x2^2 x0 has no x_i^3 term; lambda = 1 already works
    PolyQ h = PolyQ::zero(3);
    h.add_term({2, 1, 0}, Rat(1));
    h.add_term({0, 2, 1}, Rat(1));
    h.add_term({1, 0, 2}, Rat(1));
    const PlaneModel model(h);
    CHECK(model.shear_lambda() >= 1);
    for (int m = 0; m <= 8; ++m)
        CHECK(model.hf(m) == static_cast<int>(binom(m + 2, 2) - binom(m - 1, 2)));
    // restrict of the original h must still vanish (model translates coordinates)
    for (const Rat& c : model.restrict_form(h, 3)) CHECK(c == 0);
    // ring map survives the coordinate change
    std::mt19937 rng(5u);
    const PolyQ F = random_form(rng, 3, 2);
    const PolyQ G = random_form(rng, 3, 2);
    CHECK(model.restrict_form(F * G, 4) ==
          model.multiply(2, model.restrict_form(F, 2), 2, model.restrict_form(G, 2)));
}

TEST_CASE("Hilbert differences stabilize to the curve degree for built-ins") {
    for (const char* name : {"deltoid", "quartic-triple-point"}) {
        CurveModel model = builtin_curve(name);
        std::vector<int> hf;
        for (int m = 0; m <= 10; ++m) hf.push_back(model.hilbert_function(m));
        for (std::size_t i = 0; i + 1 < hf.size(); ++i) CHECK(hf[i] <= hf[i + 1]);
        for (int m = 3; m <= 9; ++m) CHECK(hf[static_cast<std::size_t>(m + 1)] - hf[static_cast<std::size_t>(m)] == 4);
    }
}

TEST_CASE("parametrization validation") {
    const PolyQ x0 = PolyQ::variable(2, 0);
    const PolyQ x1 = PolyQ::variable(2, 1);
    CHECK_THROWS_AS(ParamModelQ({x0 * x0, x0 * x1}), ParseError);        // common root (0:1)
    CHECK_THROWS_AS(ParamModelQ({x0 * x1, x1 * x1}), ParseError);        // common root (1:0)
    CHECK_THROWS_AS(ParamModelQ({x0 * x0, x1}), ParseError);             // degree mismatch
    CHECK_THROWS_AS(ParamModelQ({x0 + x1}), ParseError);                 // single form
    CHECK_NOTHROW(ParamModelQ({x0 * x0, x0 * x1, x1 * x1}));             // rational normal conic
}

TEST_CASE("float parametrized model tracks the exact one") {
    CurveModel exact = builtin_curve("quartic-triple-point");
    std::vector<PolyD> forms_d;
    for (const PolyQ& f : quartic_triple_point_forms()) forms_d.push_back(poly_to_double(f));
    std::vector<std::string> warnings;
    CurveModel approx = CurveModel::param_float(forms_d, [&](const std::string& w) { warnings.push_back(w); });
    CHECK_FALSE(approx.is_exact());
    for (int m = 0; m <= 4; ++m) CHECK(approx.hilbert_function(m) == exact.hilbert_function(m));
    CHECK(warnings.empty()); // this basis is numerically clean

    // multiplication agrees with the exact model after conversion
    const int a = 1, b = 1;
    const int na = exact.hilbert_function(a);
    Eigen::VectorXd pa = Eigen::VectorXd::Zero(na), pb = Eigen::VectorXd::Zero(na);
    pa[0] = 1.0;
    pa[2] = -2.0;
    pb[1] = 3.0;
    const Eigen::VectorXd prod_f = approx.multiply_d(a, pa, b, pb);
    const Eigen::VectorXd prod_q = exact.multiply_d(a, pa, b, pb);
    REQUIRE(prod_f.size() == prod_q.size());
    CHECK((prod_f - prod_q).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("builtin name resolution") {
    CHECK(is_builtin_curve("deltoid"));
    CHECK_FALSE(is_builtin_curve("elliptic"));
    CHECK_THROWS_AS(builtin_curve("elliptic"), ParseError);
    CHECK(builtin_form("motzkin").homogeneous_degree() == 6);
    CHECK(builtin_form("deltoid-witness:3").homogeneous_degree() == 6);
    CHECK_THROWS_AS(builtin_form("deltoid-witness:"), ParseError);
    CHECK_THROWS_AS(builtin_form("deltoid-witness:x"), ParseError);
    CHECK_THROWS_AS(builtin_form("junk"), ParseError);
}
