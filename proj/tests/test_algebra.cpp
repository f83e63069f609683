#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <map>
#include <random>
#include <vector>

#include "sosmult/builtin_forms.hpp"
#include "sosmult/linalg_exact.hpp"
#include "sosmult/monomial.hpp"
#include "sosmult/polynomial.hpp"
#include "sosmult/rational.hpp"
#include "sosmult/sym_eig.hpp"

using namespace sosmult;

namespace {

PolyQ random_ternary(std::mt19937& rng, int max_deg) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 9);
    std::uniform_int_distribution<int> nterms(1, 6);
    PolyQ p = PolyQ::zero(3);
    const int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
        int e0 = deg(rng), e1 = deg(rng), e2 = deg(rng);
        p.add_term({e0, e1, e2}, rat_make(num(rng), den(rng)));
    }
    return p;
}

// Independent dense expander used as the oracle for poly_mul: accumulates
// the product of two ternary polynomials into a map keyed by (e0,e1,e2)
// triples, using plain integer indexing rather than the library's term map.
std::map<std::array<int, 3>, Rat> dense_product(const PolyQ& p, const PolyQ& q) {
    std::map<std::array<int, 3>, Rat> acc;
    for (const auto& [ep, cp] : p.terms())
        for (const auto& [eq, cq] : q.terms()) {
            std::array<int, 3> key{ep[0] + eq[0], ep[1] + eq[1], ep[2] + eq[2]};
            acc[key] += cp * cq;
        }
    for (auto it = acc.begin(); it != acc.end();)
        it = it->second == 0 ? acc.erase(it) : std::next(it);
    return acc;
}

} // namespace

TEST_CASE("rational parsing and printing") {
    CHECK(rat_str(rat_parse("3/6")) == "1/2");
    CHECK(rat_str(rat_parse("-4/2")) == "-2");
    CHECK(rat_str(rat_parse("7")) == "7");
    CHECK(rat_str(rat_parse("-8/3")) == "-8/3");
    CHECK(rat_parse("0/5") == 0);
    CHECK_THROWS_AS(rat_parse("x"), ParseError);
    CHECK_THROWS_AS(rat_parse("1/0"), ParseError);
    CHECK_THROWS_AS(rat_parse(""), ParseError);
}

TEST_CASE("binomial coefficients") {
    CHECK(binom(4, 2) == 6);
    CHECK(binom(0, 0) == 1);
    CHECK(binom(3, 5) == 0);
    CHECK(binom(-1, 2) == 0);
    CHECK(binom(14, 2) == 91);
    CHECK(binom(6, 3) == 20);
}

TEST_CASE("monomial order is graded lexicographic, x0 most significant") {
    const auto mons = monomials_of_degree(3, 2);
    REQUIRE(mons.size() == 6);
    CHECK(mons.front() == Expo{2, 0, 0});
    CHECK(mons.back() == Expo{0, 0, 2});
    GrlexGreater gt;
    for (std::size_t i = 0; i + 1 < mons.size(); ++i) CHECK(gt(mons[i], mons[i + 1]));
    // degree dominates: any degree-3 monomial precedes any degree-2 one
    CHECK(gt(Expo{0, 0, 3}, Expo{2, 0, 0}));
}

TEST_CASE("monomial basis indexing") {
    MonoBasis mb(3, 4);
    REQUIRE(mb.size() == 15);
    for (int i = 0; i < mb.size(); ++i) CHECK(mb.at(mb.list[static_cast<std::size_t>(i)]) == i);
    CHECK_THROWS_AS(mb.at(Expo{1, 1, 1}), ComputeError);
}

TEST_CASE("polynomial products match the trivial identities") {
    const PolyQ x0 = PolyQ::variable(3, 0);
    const PolyQ x1 = PolyQ::variable(3, 1);

    const PolyQ xy = poly_mul(x0, x1);
    CHECK(xy == PolyQ::monomial(3, {1, 1, 0}));

    const PolyQ sq = poly_mul(x0 + x1, x0 + x1);
    PolyQ expect = PolyQ::zero(3);
    expect.add_term({2, 0, 0}, Rat(1));
    expect.add_term({1, 1, 0}, Rat(2));
    expect.add_term({0, 2, 0}, Rat(1));
    CHECK(sq == expect);
}

TEST_CASE("deltoid form squared: degree and distinct monomial count") {
    const PolyQ h = deltoid_form();
    REQUIRE(h.homogeneous_degree() == 4);
    REQUIRE(h.terms().size() == 8);
    CHECK(h.coeff({0, 0, 4}) == Rat(-1, 3));
    CHECK(h.coeff({3, 0, 1}) == Rat(-8, 3));
    CHECK(h.coeff({1, 2, 1}) == Rat(8));

    const PolyQ h2 = poly_mul(h, h);
    CHECK(h2.homogeneous_degree() == 8);
    // frozen count from the independent dense expansion below
    CHECK(h2.terms().size() == 24);

    const auto oracle = dense_product(h, h);
    REQUIRE(oracle.size() == h2.terms().size());
    for (const auto& [key, c] : oracle)
        CHECK(h2.coeff({key[0], key[1], key[2]}) == c);
}

TEST_CASE("deltoid form vanishes at all three cusps") {
    const PolyQ h = deltoid_form();
    CHECK(h.eval<Rat>({Rat(1), Rat(0), Rat(1)}) == 0);
    // [-1/2 : +-sqrt(3)/2 : 1], cleared to x = (-1, +-sqrt(3), 2): evaluate
    // with sqrt(3) eliminated by substituting x1^2 -> 3 via the even powers.
    // h has x1 only in even powers except none, so split by hand: evaluate
    // h(-1, s, 2) as a polynomial in s and check it equals (s^2-3)*q(s).
    PolyQ hs = PolyQ::zero(1);
    for (const auto& [e, c] : h.terms()) {
        Rat v = c;
        for (int i = 0; i < e[0]; ++i) v *= Rat(-1);
        for (int i = 0; i < e[2]; ++i) v *= Rat(2);
        hs.add_term({e[1]}, v);
    }
    // remainder of hs modulo s^2 - 3 must vanish
    Rat even(0), odd(0);
    for (const auto& [e, c] : hs.terms()) {
        Rat pw(1);
        for (int i = 0; i + 1 < e[0]; i += 2) pw *= Rat(3);
        if (e[0] % 2 == 0)
            even += c * pw;
        else
            odd += c * pw;
    }
    CHECK(even == 0);
    CHECK(odd == 0);
}

TEST_CASE("rational multiplication is exact and associative") {
    std::mt19937 rng(20240811u);
    for (int round = 0; round < 25; ++round) {
        const PolyQ p = random_ternary(rng, 4);
        const PolyQ q = random_ternary(rng, 4);
        const PolyQ r = random_ternary(rng, 4);
        CHECK(poly_mul(poly_mul(p, q), r) == poly_mul(p, poly_mul(q, r)));
        CHECK(poly_mul(p, q) == poly_mul(q, p));
        const auto oracle = dense_product(p, q);
        const PolyQ pq = poly_mul(p, q);
        REQUIRE(oracle.size() == pq.terms().size());
        for (const auto& [key, c] : oracle)
            CHECK(pq.coeff({key[0], key[1], key[2]}) == c);
    }
}

TEST_CASE("evaluation and substitution agree") {
    std::mt19937 rng(7u);
    const PolyQ p = random_ternary(rng, 3);
    const PolyQ a = random_ternary(rng, 1);
    const PolyQ b = random_ternary(rng, 1);
    const PolyQ c = random_ternary(rng, 1);
    const PolyQ composed = p.substitute({a, b, c});
    const std::vector<Rat> pt{Rat(2, 3), Rat(-1, 5), Rat(4)};
    CHECK(composed.eval<Rat>(pt) ==
          p.eval<Rat>({a.eval<Rat>(pt), b.eval<Rat>(pt), c.eval<Rat>(pt)}));
}

TEST_CASE("dense coordinates roundtrip") {
    const PolyQ h = deltoid_form();
    MonoBasis mb(3, 4);
    const std::vector<Rat> v = h.dense_coords(mb);
    REQUIRE(static_cast<int>(v.size()) == mb.size());
    CHECK(PolyQ::from_dense(mb, v) == h);
}

TEST_CASE("mode conversion between exact and floating point") {
    const PolyQ h = deltoid_form();
    const PolyD hd = poly_to_double(h);
    CHECK(hd.coeff({4, 0, 0}) == 1.0);
    CHECK(hd.coeff({0, 0, 4}) == Catch::Approx(-1.0 / 3.0));
    const PolyQ back = poly_to_exact(poly_to_double(PolyQ::monomial(3, {1, 1, 0}, Rat(3, 4))));
    CHECK(back.coeff({1, 1, 0}) == Rat(3, 4));
}

TEST_CASE("rank_and_nullspace on the contract examples") {
    SECTION("identity") {
        MatQ I(3, 3);
        for (int i = 0; i < 3; ++i) I(i, i) = 1;
        const auto rn = rank_and_nullspace(I);
        CHECK(rn.rank == 3);
        CHECK(rn.nullspace.empty());
    }
    SECTION("zero matrix") {
        MatQ Z(2, 4);
        const auto rn = rank_and_nullspace(Z);
        CHECK(rn.rank == 0);
        CHECK(rn.nullspace.size() == 4);
    }
    SECTION("vandermonde nodes 0,1,2") {
        MatQ V(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Rat v(1);
                for (int k = 0; k < j; ++k) v *= Rat(i);
                V(i, j) = v;
            }
        const auto rn = rank_and_nullspace(V);
        CHECK(rn.rank == 3);
        CHECK(rn.nullspace.empty());
    }
}

TEST_CASE("rank_and_nullspace: planted rank and exact annihilation") {
    std::mt19937 rng(99u);
    std::uniform_int_distribution<int> entry(-5, 5);
    for (int round = 0; round < 30; ++round) {
        std::uniform_int_distribution<int> dim(1, 8);
        const int n = dim(rng), m = dim(rng);
        const int r = std::uniform_int_distribution<int>(0, std::min(n, m))(rng);
        // build full-rank factors by rejection (exact rank check)
        MatQ A(n, r), B(r, m);
        for (;;) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < r; ++j) A(i, j) = entry(rng);
            if (rank_and_nullspace(A).rank == r) break;
        }
        for (;;) {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < m; ++j) B(i, j) = entry(rng);
            if (rank_and_nullspace(B).rank == r) break;
        }
        MatQ M(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                Rat s(0);
                for (int k = 0; k < r; ++k) s += A(i, k) * B(k, j);
                M(i, j) = s;
            }
        const auto rn = rank_and_nullspace(M);
        CHECK(rn.rank == r);
        CHECK(static_cast<int>(rn.nullspace.size()) == m - r);
        for (const VecQ& v : rn.nullspace)
            for (int i = 0; i < n; ++i) {
                Rat s(0);
                for (int j = 0; j < m; ++j) s += M(i, j) * v[static_cast<std::size_t>(j)];
                CHECK(s == 0);
            }
        // returned vectors are independent
        ExactEchelon ech(m);
        for (const VecQ& v : rn.nullspace) CHECK(ech.insert(v));
    }
}

TEST_CASE("span solver returns exact coordinates") {
    const std::vector<VecQ> basis{{Rat(1), Rat(0), Rat(1)}, {Rat(0), Rat(1), Rat(1)}};
    SpanSolver span(basis);
    const VecQ c = span.solve({Rat(2), Rat(3), Rat(5)});
    REQUIRE(c.size() == 2);
    CHECK(c[0] == 2);
    CHECK(c[1] == 3);
    CHECK_FALSE(span.contains({Rat(1), Rat(1), Rat(1)}));
    CHECK_THROWS_AS(span.solve({Rat(1), Rat(1), Rat(1)}), ComputeError);
    CHECK_THROWS_AS(SpanSolver(std::vector<VecQ>{{Rat(1), Rat(2)}, {Rat(2), Rat(4)}}), ComputeError);
}

TEST_CASE("sym_eig on the contract examples") {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
    D(0, 0) = 2;
    D(1, 1) = 1;
    const SymEig e1 = sym_eig(D);
    CHECK(e1.values[0] == Catch::Approx(2.0).margin(1e-12));
    CHECK(e1.values[1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(e1.values[2] == Catch::Approx(0.0).margin(1e-12));

    Eigen::MatrixXd R(2, 2);
    R << 0, 1, 1, 0;
    const SymEig e2 = sym_eig(R);
    CHECK(e2.values[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(e2.values[1] == Catch::Approx(-1.0).margin(1e-12));

    // Gram matrix of x0^2 + (x1-x2)^2 in the basis (x0, x1, x2)
    Eigen::MatrixXd G(3, 3);
    G << 1, 0, 0, 0, 1, -1, 0, -1, 1;
    const SymEig e3 = sym_eig(G);
    CHECK(e3.values[0] == Catch::Approx(2.0).margin(1e-12));
    CHECK(e3.values[1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(e3.values[2] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("sym_eig reconstruction bound for random symmetric matrices") {
    std::mt19937 rng(424242u);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const int n : {1, 5, 40, 200}) {
        Eigen::MatrixXd M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) M(i, j) = M(j, i) = u(rng);
        const SymEig e = sym_eig(M); // throws if the bound fails
        const Eigen::MatrixXd R = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        CHECK(max_abs(M - R) <= 1e-10 * (1.0 + max_abs(M)));
        CHECK(max_abs(e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(n, n)) < 1e-10);
        for (int i = 0; i + 1 < n; ++i) CHECK(e.values[i] >= e.values[i + 1]);
    }
}

TEST_CASE("corank counts small eigenvalues against a relative tolerance") {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, 3);
    M(0, 0) = 1.0;
    M(1, 1) = 1e-14;
    M(2, 2) = -1e-14;
    CHECK(corank(M, 1e-10) == 2);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
    D(0, 0) = 2;
    D(1, 1) = 1;
    CHECK(corank(D, 1e-10) == 1);
    CHECK(corank(Eigen::MatrixXd::Identity(4, 4), 1e-10) == 0);
}

TEST_CASE("facet_normal finds the kernel line of a corank-one matrix") {
    Eigen::MatrixXd G(3, 3);
    G << 1, 0, 0, 0, 1, -1, 0, -1, 1;
    const Eigen::VectorXd v = facet_normal(G, 1e-10);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(v[0]) < 1e-10);
    CHECK(v[1] == Catch::Approx(s).margin(1e-10));
    CHECK(v[2] == Catch::Approx(s).margin(1e-10));
    CHECK_THROWS_AS(facet_normal(Eigen::MatrixXd::Identity(3, 3), 1e-10), ComputeError);
    Eigen::MatrixXd two_kernel = Eigen::MatrixXd::Zero(3, 3);
    two_kernel(0, 0) = 1.0;
    CHECK_THROWS_AS(facet_normal(two_kernel, 1e-10), ComputeError);
}
