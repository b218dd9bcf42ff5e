#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drsn/painleve.hpp"
#include "drsn/saddle_node.hpp"
#include "test_util.hpp"

#include <random>

using namespace drsn;
using drsn::test::coeff_distance;
using drsn::test::coeff_distance_below;

namespace {
const int K = 8, D = 6;

MultiSeries mono(int m, int n1, int n2, cplx c = 1.0) {
    return MultiSeries::monomial({m, n1, n2}, c, K, D);
}

SaddleNodeField linear_field(cplx lambda, cplx a1, cplx a2) {
    BasisFields b = BasisFields::make(lambda, a1, a2, K, D);
    return make_saddle_node(b.Y0, lambda);
}
} // namespace

TEST_CASE("residue read-off") {
    // A(x) = diag(-l + 3x, l + 2x) -> residue 5
    SaddleNodeField Y = linear_field(cplx(1.0, 0.3), 3.0, 2.0);
    CHECK(std::abs(residue(Y) - 5.0) < 1e-14);

    // A(x) = diag(-l, l) -> 0
    SaddleNodeField Y0 = linear_field(cplx(1.0, 0.3), 0.0, 0.0);
    CHECK(std::abs(residue(Y0)) < 1e-14);
}

TEST_CASE("classification") {
    CHECK(classify(cplx(1.0, 0)) == Degeneracy::strictly_non_degenerate);
    CHECK(classify(cplx(-0.5, 0)) == Degeneracy::degenerate);
    CHECK(classify(cplx(0, 1.0)) == Degeneracy::non_degenerate);
    CHECK(classify(cplx(0, 0)) == Degeneracy::degenerate);
    CHECK(classify(cplx(-1.0 / 63, 0)) == Degeneracy::degenerate);
    // past the denominator bound the heuristic reports non-degenerate
    CHECK(classify(cplx(-1.0 / 101, 0), 64) == Degeneracy::non_degenerate);
    CHECK(classify(cplx(-0.5, 1e-6)) == Degeneracy::non_degenerate);
}

TEST_CASE("diagonalize the Painleve I linear part") {
    PolyVectorField Y = p1_field(K, D);
    auto [sn, map] = diagonalize_constant_linear_part(Y);

    // oracle: lambda^2 = 192 zeta / 25, arg in (-pi/2, pi/2]
    cplx z = p1_translation_constant();
    cplx lam2 = 192.0 * z / 25.0;
    CHECK(std::abs(sn.lambda * sn.lambda - lam2) < 1e-12);
    CHECK(sn.lambda.real() > 0);

    // diagonal linear part in the new coordinates
    CHECK(std::abs(sn.field.comp_y1.coeff(0, 1, 0) + sn.lambda) < 1e-12);
    CHECK(std::abs(sn.field.comp_y2.coeff(0, 0, 1) - sn.lambda) < 1e-12);
    CHECK(std::abs(sn.field.comp_y1.coeff(0, 0, 1)) < 1e-12);
    CHECK(std::abs(sn.field.comp_y2.coeff(0, 1, 0)) < 1e-12);

    // residue 1, strictly non-degenerate
    CHECK(std::abs(residue(sn) - 1.0) < 1e-12);
    CHECK(classify(sn) == Degeneracy::strictly_non_degenerate);

    // the linear change is unimodular, so it preserves dy1^dy2
    MultiSeries det = y_jacobian_det(map);
    CHECK(coeff_distance(det, MultiSeries::constant(1.0, K, D)) < 1e-12);

    // conjugacy equation holds
    PolyVectorField resid = verify_conjugacy(Y, map, sn.field);
    CHECK(resid.comp_y1.max_abs() < 1e-12);
    CHECK(resid.comp_y2.max_abs() < 1e-12);
}

TEST_CASE("diagonalize is the identity on an already-diagonal field") {
    SaddleNodeField Y = linear_field(cplx(1.0, 0.0), 0.5, 0.5);
    auto [sn, map] = diagonalize_constant_linear_part(Y.field);
    CHECK(std::abs(sn.lambda - 1.0) < 1e-12);
    CHECK(coeff_distance(map.comp_y1, mono(0, 1, 0)) < 1e-12);
    CHECK(coeff_distance(map.comp_y2, mono(0, 0, 1)) < 1e-12);
}

TEST_CASE("diagonalize rejects non-opposite eigenvalues") {
    PolyVectorField Y;
    Y.comp_x = mono(2, 0, 0);
    Y.comp_y1 = mono(0, 1, 0, 1.0);  // eigenvalues 1 and 2
    Y.comp_y2 = mono(0, 0, 1, 2.0);
    CHECK_THROWS_AS(diagonalize_constant_linear_part(Y), not_saddle_node_error);
}

TEST_CASE("restrict_to_x0") {
    // x-divisible perturbations vanish on the slice
    SaddleNodeField Y = linear_field(cplx(2.0, 0.1), 0.4, 0.6);
    Y.field.comp_y1 += mono(1, 0, 2, cplx(0.5, 0.2));
    auto [f1, f2] = restrict_to_x0(Y);
    CHECK(coeff_distance(f1, mono(0, 1, 0) * (-Y.lambda)) < 1e-14);
    CHECK(coeff_distance(f2, mono(0, 0, 1) * Y.lambda) < 1e-14);

    // Painleve I slice matches the displayed coefficients
    auto p1 = p1_field(K, D);
    MultiSeries r1 = p1.comp_y1.restrict_x0();
    MultiSeries r2 = p1.comp_y2.restrict_x0();
    CHECK(std::abs(r1.coeff(0, 0, 1) + 4.0 / 5) < 1e-14);
    CHECK(std::abs(r2.coeff(0, 2, 0) + 24.0 / 5) < 1e-14);
    CHECK(std::abs(r2.coeff(0, 1, 0) + 48.0 / 5 * p1_translation_constant()) < 1e-14);
}

TEST_CASE("orbital linearization of proportional restrictions") {
    const cplx lambda(1.0, 0.0);
    MultiSeries y1 = mono(0, 1, 0), y2 = mono(0, 0, 1);

    auto make_restriction = [&](const MultiSeries& h) {
        MultiSeries U = MultiSeries::constant(lambda, K, D) + h;
        return std::make_pair(-(U * y1), U * y2);
    };

    SUBCASE("h = 0") {
        auto lin = orbital_linearize_x0(make_restriction(MultiSeries(K, D)), lambda);
        CHECK(lin.gamma.max_abs() < 1e-14);
        CHECK(lin.d.max_abs() < 1e-14);
    }
    SUBCASE("purely resonant h stays in d") {
        MultiSeries h = mono(0, 1, 1, cplx(0.3, -0.1));
        auto lin = orbital_linearize_x0(make_restriction(h), lambda);
        CHECK(lin.gamma.max_abs() < 1e-14);
        CHECK(std::abs(lin.d.coeff(1) - cplx(0.3, -0.1)) < 1e-12);
    }
    SUBCASE("h = y1 solves at degree one with gamma = -1") {
        auto lin = orbital_linearize_x0(make_restriction(mono(0, 1, 0)), lambda);
        CHECK(std::abs(lin.gamma.coeff(0, 1, 0) + 1.0) < 1e-12);
        CHECK(lin.residual < obstruction_eps);
    }
    SUBCASE("non-proportional restriction is rejected") {
        auto bad = make_restriction(MultiSeries(K, D));
        bad.second += mono(0, 2, 0, 0.5); // breaks proportionality
        CHECK_THROWS_AS(orbital_linearize_x0(bad, lambda), not_div_integrable_error);
    }
}

TEST_CASE("resonant freedom in gamma leaves d unchanged") {
    const cplx lambda(1.0, 0.2);
    MultiSeries y1 = mono(0, 1, 0), y2 = mono(0, 0, 1);
    MultiSeries h = mono(0, 1, 0, 0.2) + mono(0, 1, 1, cplx(0.1, 0.05)) + mono(0, 0, 2, 0.15);
    MultiSeries U = MultiSeries::constant(lambda, K, D) + h;
    auto restr = std::make_pair(-(U * y1), U * y2);

    auto lin0 = orbital_linearize_x0(restr, lambda);
    UniSeries gres(D / 2 + 1);
    gres.set(1, cplx(0.2, -0.3));
    auto lin1 = orbital_linearize_x0(restr, lambda, &gres);
    for (int k = 0; k < lin0.d.order(); ++k)
        CHECK(std::abs(lin0.d.coeff(k) - lin1.d.coeff(k)) < 1e-10);
}

TEST_CASE("Poincare-Dulac route on a Hamiltonian restriction") {
    // restriction of the diagonalized Painleve I field is Hamiltonian and
    // div-integrable but not proportional to the C basis
    auto [sn, mapP] = diagonalize_constant_linear_part(p1_field(K, D));
    auto restr = restrict_to_x0(sn);

    // divergence-free data
    MultiSeries divr = restr.first.dy1() + restr.second.dy2();
    CHECK(divr.max_abs() < 1e-12);

    RestrictionNormalization rn = linearize_restriction(restr, sn.lambda);
    CHECK(rn.route == "poincare_dulac");
    CHECK(rn.obstruction < obstruction_eps);

    // pushed restriction equals (lambda + d(v)) C within truncation
    PolyVectorField X{MultiSeries(K, D), restr.first, restr.second};
    PolyVectorField Z = push_forward(X, rn.map);
    MultiSeries unit = MultiSeries::constant(sn.lambda, K, D) + to_multi_v(rn.d, K, D);
    CHECK(coeff_distance(Z.comp_y1, -(unit * mono(0, 1, 0))) < 1e-8);
    CHECK(coeff_distance(Z.comp_y2, unit * mono(0, 0, 1)) < 1e-8);

    // divergence-free corrections by flows: unit Jacobian below the
    // derivative boundary
    CHECK(coeff_distance_below(y_jacobian_det(rn.map), MultiSeries::constant(1.0, K, D), K, D) <
          1e-9);
}

TEST_CASE("PD route flags a genuine obstruction") {
    const cplx lambda(1.0, 0.0);
    MultiSeries y1 = mono(0, 1, 0), y2 = mono(0, 0, 1);
    // symmetric resonant pair a_k = b_k cannot be absorbed into d(v)
    MultiSeries f1 = y1 * (-lambda) + mono(0, 2, 1, 0.4);
    MultiSeries f2 = y2 * lambda + mono(0, 1, 2, 0.4);
    CHECK_THROWS_AS(linearize_restriction({f1, f2}, lambda), not_div_integrable_error);
}

TEST_CASE("residue is invariant under tangent-to-identity conjugation") {
    std::mt19937_64 rng(99);
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        SaddleNodeField Y = make_random_field(seed, K, D);
        cplx r0 = residue(Y);

        MultiSeries tau(K, D);
        tau.set({1, 1, 0}, cplx(0.12, -0.2));
        tau.set({0, 1, 1}, cplx(0.08, 0.1));
        auto [m1, m2] = exp_flow_map(tau, 1, 1);
        ConjugacyMap m = ConjugacyMap::from_components(m1, m2, "test");
        CHECK(m.is_tangent_to_identity);
        PolyVectorField Z = push_forward(Y.field, m);
        CHECK(std::abs(residue(Z) - r0) < 1e-8);
    }
}

TEST_CASE("random field generator produces valid strict fields") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SaddleNodeField Y = make_random_field(seed, 10, 8);
        CHECK(classify(Y) == Degeneracy::strictly_non_degenerate);
        CHECK(std::abs(Y.field.comp_y1.coeff(0, 1, 0) + Y.lambda) < 1e-12);
        // restriction is div-integrable by construction
        RestrictionNormalization rn = linearize_restriction(restrict_to_x0(Y), Y.lambda);
        CHECK(rn.obstruction < obstruction_eps);
    }
}
