#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <variant>
#include <vector>

#include "sosmult/bounds.hpp"
#include "sosmult/builtin_forms.hpp"
#include "sosmult/builtins.hpp"
#include "sosmult/certify.hpp"
#include "sosmult/models.hpp"
#include "sosmult/moment.hpp"
#include "sosmult/sampling.hpp"
#include "sosmult/sym_eig.hpp"

using namespace sosmult;

namespace {

Eigen::VectorXd to_eigen(const VecQ& v) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = rat_double(v[i]);
    return x;
}

/// |P|^2 * sum x_i^2 - (sum P_i x_i)^2: ambient PSD quadric vanishing
/// exactly on the line through P, with P rationalized entrywise.
PolyQ distance_quadric(const std::vector<double>& P) {
    const int n = static_cast<int>(P.size());
    VecQ pr(P.size());
    Rat n2(0);
    for (std::size_t i = 0; i < P.size(); ++i) {
        pr[i] = rat_of_double(P[i]);
        n2 += pr[i] * pr[i];
    }
    PolyQ ell = PolyQ::zero(n);
    PolyQ sq = PolyQ::zero(n);
    for (int i = 0; i < n; ++i) {
        const PolyQ xi = PolyQ::variable(n, i);
        ell += xi * pr[static_cast<std::size_t>(i)];
        sq += xi * xi;
    }
    return sq * n2 - ell * ell;
}

/// A few fixed positive definite ambient ternary quadrics.
std::vector<PolyQ> base_quadrics() {
    const PolyQ x0 = PolyQ::variable(3, 0);
    const PolyQ x1 = PolyQ::variable(3, 1);
    const PolyQ x2 = PolyQ::variable(3, 2);
    std::vector<PolyQ> qs;
    qs.push_back(unit_quadric(3));
    qs.push_back(x0 * x0 * 2 + x1 * x1 + x2 * x2 + x0 * x1 * Rat(1, 3));
    qs.push_back(x0 * x0 + x1 * x1 * 3 + x2 * x2 * 2 - x1 * x2 * Rat(1, 2));
    return qs;
}

/// Ambient representatives of sampled real curve points. Parametrized
/// models hand back (s, t) pairs, so those are pushed through the forms.
std::vector<std::vector<double>> ambient_points(const CurveModel& model,
                                                const std::vector<PolyQ>& forms, int count) {
    const auto raw = sample_real_points(model, count);
    if (forms.empty()) return raw;
    std::vector<std::vector<double>> out;
    for (const auto& st : raw) {
        std::vector<double> amb;
        double mx = 0.0;
        for (const PolyQ& F : forms) {
            amb.push_back(F.eval<double>(st));
            mx = std::max(mx, std::abs(amb.back()));
        }
        if (!(mx > 0.0)) continue;
        for (double& v : amb) v /= mx;
        out.push_back(std::move(amb));
    }
    return out;
}

/// Strictly positive elements of R_{2j}: the restriction of a positive
/// definite ambient quadric power plus a distance-quadric product pinned
/// at a sampled real point.
std::vector<Eigen::VectorXd> pos_interior_samples(const CurveModel& model,
                                                  const std::vector<PolyQ>& forms, int j,
                                                  int count) {
    const std::vector<PolyQ> qs = base_quadrics();
    const auto pts = ambient_points(model, forms, count + 2);
    REQUIRE(static_cast<int>(pts.size()) >= count);
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < count; ++i) {
        const PolyQ& q = qs[static_cast<std::size_t>(i) % qs.size()];
        const PolyQ& q2 = qs[(static_cast<std::size_t>(i) + 1) % qs.size()];
        const PolyQ interior = q.pow(j);
        const PolyQ contact = distance_quadric(pts[static_cast<std::size_t>(i)]) * q2.pow(j - 1);
        out.push_back(to_eigen(model.restrict(interior, 2 * j)) +
                      to_eigen(model.restrict(contact, 2 * j)));
    }
    return out;
}

} // namespace

TEST_CASE("multiplier problem has the documented block and constraint shape") {
    const CurveModel deltoid = builtin_curve("deltoid");
    const Eigen::VectorXd f = to_eigen(deltoid.restrict(deltoid_witness(2), 4));

    const MultiplierProblem mp = build_multiplier_problem(deltoid, f, 2, 1);
    REQUIRE(mp.sdp.block_orders == std::vector<int>{3, 10});
    CHECK(mp.sdp.constraints.size() == 23); // HF(6) = 22 equalities + 1 normalization
    CHECK(mp.sdp.normalization == 22);
    CHECK(mp.f_unit.lpNorm<Eigen::Infinity>() == Catch::Approx(1.0));

    const CurveModel p2 = CurveModel::ring(2);
    const Eigen::VectorXd m = to_eigen(p2.restrict(motzkin_form(), 6));
    const MultiplierProblem mm = build_multiplier_problem(p2, m, 3, 1);
    REQUIRE(mm.sdp.block_orders == std::vector<int>{3, 15});
    CHECK(mm.sdp.constraints.size() == 46); // HF(8) = 45 + 1

    const MultiplierProblem m0 = build_multiplier_problem(p2, m, 3, 0);
    REQUIRE(m0.sdp.block_orders.size() == 2);
    CHECK(m0.sdp.block_orders[0] == 1); // A is 1x1, forced to A = 1
}

TEST_CASE("multiplier problem rejects bad input") {
    const CurveModel deltoid = builtin_curve("deltoid");
    const Eigen::VectorXd f = to_eigen(deltoid.restrict(deltoid_witness(2), 4));
    CHECK_THROWS_AS(build_multiplier_problem(deltoid, f, 0, 1), ParseError);
    CHECK_THROWS_AS(build_multiplier_problem(deltoid, f, 2, -1), ParseError);
    CHECK_THROWS_AS(build_multiplier_problem(deltoid, f, 1, 1), ParseError); // wrong size for j=1
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(f.size());
    CHECK_THROWS_AS(build_multiplier_problem(deltoid, zero, 2, 1), ComputeError);
}

TEST_CASE("deltoid witness: separators below degree four, certificate at it") {
    const CurveModel deltoid = builtin_curve("deltoid");
    const Eigen::VectorXd f = to_eigen(deltoid.restrict(deltoid_witness(2), 4));

    const CertifyOutcome at0 = certify_multiplier(deltoid, f, 2, 0);
    REQUIRE(std::holds_alternative<StrictSeparator>(at0));

    const CertifyOutcome at1 = certify_multiplier(deltoid, f, 2, 1);
    REQUIRE(std::holds_alternative<StrictSeparator>(at1));
    const auto& sep = std::get<StrictSeparator>(at1);
    CHECK(sep.margin >= 1e-6);
    CHECK(sep.ell.coords.norm() == Catch::Approx(1.0));
    CHECK(sep.ell.degree == 6);
    SeparatorCheckDetail sd;
    CHECK(verify_separator(deltoid, f, sep, 1e-6, &sd));
    CHECK(sd.margin == Catch::Approx(sep.margin));

    const CertifyOutcome at2 = certify_multiplier(deltoid, f, 2, 2);
    REQUIRE(std::holds_alternative<MultiplierCertificate>(at2));
    const auto& cert = std::get<MultiplierCertificate>(at2);
    CHECK(cert.gram_A.trace() == Catch::Approx(1.0).margin(1e-8));
    CHECK(cert.residual <= 1e-6);
    CHECK(verify_certificate(deltoid, f, cert, 1e-6));
}

TEST_CASE("motzkin form on the projective plane: separator then certificate") {
    const CurveModel p2 = CurveModel::ring(2);
    const Eigen::VectorXd f = to_eigen(p2.restrict(motzkin_form(), 6));

    const CertifyOutcome at0 = certify_multiplier(p2, f, 3, 0);
    REQUIRE(std::holds_alternative<StrictSeparator>(at0));
    CHECK(verify_separator(p2, f, std::get<StrictSeparator>(at0), 1e-6));

    const CertifyOutcome at1 = certify_multiplier(p2, f, 3, 1);
    REQUIRE(std::holds_alternative<MultiplierCertificate>(at1));
    CHECK(verify_certificate(p2, f, std::get<MultiplierCertificate>(at1), 1e-6));
}

TEST_CASE("an explicit square certifies with the trivial multiplier") {
    const CurveModel deltoid = builtin_curve("deltoid");
    const PolyQ x0 = PolyQ::variable(3, 0);
    const Eigen::VectorXd f = to_eigen(deltoid.restrict(x0 * x0, 2));

    const CertifyOutcome out = certify_multiplier(deltoid, f, 1, 0);
    REQUIRE(std::holds_alternative<MultiplierCertificate>(out));
    const auto& cert = std::get<MultiplierCertificate>(out);
    REQUIRE(cert.gram_A.rows() == 1);
    CHECK(cert.gram_A(0, 0) == Catch::Approx(1.0).margin(1e-8));
    // B is the rank-1 Gram of the restricted linear form x0
    REQUIRE(cert.gram_B.rows() == 3);
    CHECK(cert.gram_B(0, 0) == Catch::Approx(1.0).margin(1e-6));
    for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v)
            if (u != 0 || v != 0) CHECK(std::abs(cert.gram_B(u, v)) <= 1e-6);
    CHECK(verify_certificate(deltoid, f, cert, 1e-6));
}

TEST_CASE("verification rejects a perturbed certificate") {
    const CurveModel deltoid = builtin_curve("deltoid");
    const Eigen::VectorXd f = to_eigen(deltoid.restrict(deltoid_witness(2), 4));
    const CertifyOutcome at2 = certify_multiplier(deltoid, f, 2, 2);
    REQUIRE(std::holds_alternative<MultiplierCertificate>(at2));
    MultiplierCertificate bad = std::get<MultiplierCertificate>(at2);
    bad.gram_B(0, 0) += 1e-2;
    CertificateCheckDetail d;
    CHECK(!verify_certificate(deltoid, f, bad, 1e-6, &d));
    CHECK(!d.why.empty());
}

TEST_CASE("verification rejects weak separator candidates") {
    const CurveModel deltoid = builtin_curve("deltoid");
    const Eigen::VectorXd f = to_eigen(deltoid.restrict(deltoid_witness(2), 4));

    // a single point evaluation has a rank-1 catalecticant: PSD, never PD
    const auto pts = sample_real_points(deltoid, 4);
    REQUIRE(!pts.empty());
    const StrictSeparator point_eval{2, 1, evaluation_functional(deltoid, 6, pts[0]).normalized(),
                                     0.0};
    CHECK(!verify_separator(deltoid, f, point_eval, 1e-6));

    // against a strictly positive f, any admissible functional has a PSD
    // localized catalecticant, so the negativity half must fail
    const CurveModel p1 = CurveModel::ring(1);
    const Eigen::VectorXd fpos = to_eigen(p1.restrict(unit_quadric(2), 2));
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(p1.hilbert_function(4));
    for (const auto& P : sample_real_points(p1, 12)) {
        const auto vals = p1.eval_basis(4, P);
        for (std::size_t i = 0; i < vals.size(); ++i) avg[static_cast<Eigen::Index>(i)] += vals[i];
    }
    avg /= avg.norm();
    const StrictSeparator pd_ell{1, 1, MomentFunctional(p1, 4, avg), 0.0};
    SeparatorCheckDetail d;
    CHECK(!verify_separator(p1, fpos, pd_ell, 1e-6, &d));
    CHECK(d.cat_min_eig > 0.0);          // the functional itself is fine
    CHECK(d.localized_max_eig > 0.0);    // but f > 0 forces the localized side PSD
}

TEST_CASE("search table for the deltoid witness matches the documented run") {
    const CurveModel deltoid = builtin_curve("deltoid");
    const Eigen::VectorXd f = to_eigen(deltoid.restrict(deltoid_witness(2), 4));

    const SearchResult res = search_min_multiplier_degree(deltoid, f, 2, 3, /*exhaustive=*/true);
    REQUIRE(res.table.size() == 4);
    CHECK(std::holds_alternative<StrictSeparator>(res.table[0].outcome));
    CHECK(std::holds_alternative<StrictSeparator>(res.table[1].outcome));
    CHECK(std::holds_alternative<MultiplierCertificate>(res.table[2].outcome));
    CHECK(std::holds_alternative<MultiplierCertificate>(res.table[3].outcome));
    CHECK(res.first_certificate_k == 2);

    // early stop without --exhaustive
    const SearchResult quick = search_min_multiplier_degree(deltoid, f, 2, 3);
    CHECK(quick.table.size() == 3);
    CHECK(quick.first_certificate_k == 2);
}

TEST_CASE("rational quartic: interior elements certify below the curve bound") {
    const CurveModel quartic = builtin_curve("quartic-triple-point");
    const auto samples = pos_interior_samples(quartic, quartic_triple_point_forms(), 1, 5);
    REQUIRE(samples.size() == 5);
    for (const Eigen::VectorXd& f : samples) {
        const CertifyOutcome out = certify_multiplier(quartic, f, 1, 1);
        REQUIRE(std::holds_alternative<MultiplierCertificate>(out));
        CHECK(verify_certificate(quartic, f, std::get<MultiplierCertificate>(out), 1e-6));
    }
}

TEST_CASE("certificates persist at higher multiplier degrees") {
    // monotonicity: a verified certificate at k implies one at k+1
    int instances = 0;
    auto count_monotone = [&](const CurveModel& model, const Eigen::VectorXd& f, int j,
                              const SearchResult& res) {
        for (std::size_t i = 0; i + 1 < res.table.size(); ++i) {
            if (!std::holds_alternative<MultiplierCertificate>(res.table[i].outcome)) continue;
            REQUIRE(std::holds_alternative<MultiplierCertificate>(res.table[i + 1].outcome));
            const auto& next = std::get<MultiplierCertificate>(res.table[i + 1].outcome);
            CHECK(verify_certificate(model, f, next, 1e-6));
            ++instances;
        }
    };

    const CurveModel deltoid = builtin_curve("deltoid");
    const Eigen::VectorXd fw = to_eigen(deltoid.restrict(deltoid_witness(2), 4));
    count_monotone(deltoid, fw, 2, search_min_multiplier_degree(deltoid, fw, 2, 3, true));

    const CurveModel p2 = CurveModel::ring(2);
    const Eigen::VectorXd fm = to_eigen(p2.restrict(motzkin_form(), 6));
    count_monotone(p2, fm, 3, search_min_multiplier_degree(p2, fm, 3, 2, true));

    for (const Eigen::VectorXd& f : pos_interior_samples(deltoid, {}, 1, 3))
        count_monotone(deltoid, f, 1, search_min_multiplier_degree(deltoid, f, 1, 3, true));

    const CurveModel quartic = builtin_curve("quartic-triple-point");
    for (const Eigen::VectorXd& f :
         pos_interior_samples(quartic, quartic_triple_point_forms(), 1, 5))
        count_monotone(quartic, f, 1, search_min_multiplier_degree(quartic, f, 1, 2, true));

    CHECK(instances >= 10);
}

TEST_CASE("upper-bound law: interior elements certify at the curve bound") {
    struct Setup {
        const char* name;
        std::vector<PolyQ> forms;
    };
    const std::vector<Setup> curves = {{"deltoid", {}},
                                       {"quartic-triple-point", quartic_triple_point_forms()}};
    for (const Setup& s : curves) {
        const CurveModel model = builtin_curve(s.name);
        const int kstar =
            static_cast<int>(multiplier_degree_bound_curve(curve_invariants(model)));
        REQUIRE(kstar == 2);
        for (const Eigen::VectorXd& f : pos_interior_samples(model, s.forms, 1, 3)) {
            const CertifyOutcome out = certify_multiplier(model, f, 1, kstar);
            INFO(s.name);
            REQUIRE(std::holds_alternative<MultiplierCertificate>(out));
            CHECK(verify_certificate(model, f, std::get<MultiplierCertificate>(out), 1e-6));
        }
    }

    // boundary-contact witness on the deltoid certifies at the bound too
    const CurveModel deltoid = builtin_curve("deltoid");
    const Eigen::VectorXd fw = to_eigen(deltoid.restrict(deltoid_witness(1), 2));
    const CertifyOutcome out = certify_multiplier(deltoid, fw, 1, 2);
    REQUIRE(std::holds_alternative<MultiplierCertificate>(out));
    CHECK(verify_certificate(deltoid, fw, std::get<MultiplierCertificate>(out), 1e-6));
}

TEST_CASE("no suite instance verifies both a certificate and a separator") {
    // weak duality probe: whenever certify returns one kind, the verifier
    // for the other kind rejects everything we can build from the run
    const CurveModel deltoid = builtin_curve("deltoid");
    const Eigen::VectorXd f = to_eigen(deltoid.restrict(deltoid_witness(2), 4));

    const CertifyOutcome at1 = certify_multiplier(deltoid, f, 2, 1);
    REQUIRE(std::holds_alternative<StrictSeparator>(at1));
    const CertifyOutcome at2 = certify_multiplier(deltoid, f, 2, 2);
    REQUIRE(std::holds_alternative<MultiplierCertificate>(at2));
    const auto& cert = std::get<MultiplierCertificate>(at2);
    const auto& sep = std::get<StrictSeparator>(at1);

    // pair the separator at k=1 against the k=2 certificate through the
    // pairing identity: ell(f*g) = <localized cat, A> < 0 while
    // ell(sum B) = <cat, B> >= 0, so the same functional can never verify
    // against the k it separated
    const Eigen::MatrixXd loc = localized_catalecticant(deltoid, sep.ell, f, 4, 1);
    const Eigen::MatrixXd cat = catalecticant(deltoid, sep.ell, 3);
    CHECK(min_eigenvalue(cat) >= 1e-6);
    CHECK(max_eigenvalue(loc) <= -1e-6);
    CHECK(verify_certificate(deltoid, f, cert, 1e-6));
}
