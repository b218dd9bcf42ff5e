#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drsn/series.hpp"
#include "test_util.hpp"

#include <random>

using namespace drsn;
using drsn::test::coeff_distance;
using drsn::test::coeff_distance_below;
using drsn::test::random_series;
using drsn::test::random_series_no_const;

namespace {
const int K = 8, D = 6;

MultiSeries mono(int m, int n1, int n2, cplx c = 1.0) {
    return MultiSeries::monomial({m, n1, n2}, c, K, D);
}
} // namespace

TEST_CASE("arithmetic on monomials") {
    // (x y1) * y2 = x y1 y2
    MultiSeries p = mono(1, 1, 0) * mono(0, 0, 1);
    CHECK(coeff_distance(p, mono(1, 1, 1)) == doctest::Approx(0.0));

    // annihilator
    std::mt19937_64 rng(7);
    MultiSeries f = random_series(rng, K, D);
    CHECK((f * MultiSeries(K, D)).empty());

    // (1+x)(1-x) at x_order 3 keeps 1 - x^2
    MultiSeries one = MultiSeries::constant(1.0, 3, D);
    MultiSeries x3 = MultiSeries::monomial({1, 0, 0}, 1.0, 3, D);
    MultiSeries prod = (one + x3) * (one - x3);
    CHECK(coeff_distance(prod, one - MultiSeries::monomial({2, 0, 0}, 1.0, 3, D)) ==
          doctest::Approx(0.0));
}

TEST_CASE("arithmetic refuses mixed truncations") {
    MultiSeries a(4, 3), b(5, 3);
    CHECK_THROWS_AS(a + b, order_mismatch_error);
    CHECK_THROWS_AS(a * b, order_mismatch_error);
}

TEST_CASE("ring axioms on random series") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        MultiSeries a = random_series(rng, K, D), b = random_series(rng, K, D),
                    c = random_series(rng, K, D);
        double n = 16 * (a.size() + b.size() + c.size());
        CHECK(coeff_distance((a * b) * c, a * (b * c)) < coeff_eps * n);
        CHECK(coeff_distance(a * (b + c), a * b + a * c) < coeff_eps * n);
        CHECK(coeff_distance(a * b, b * a) < coeff_eps * n);
    }
}

TEST_CASE("compose_fibered") {
    // f = y1 y2, g1 = y1 * exp(x) truncation, g2 = y2
    MultiSeries expx(K, D);
    double fact = 1;
    for (int k = 0; k < K; ++k) {
        if (k > 0) fact *= k;
        expx.set({k, 0, 0}, 1.0 / fact);
    }
    MultiSeries f = mono(0, 1, 1);
    MultiSeries g1 = expx * mono(0, 1, 0);
    MultiSeries g2 = mono(0, 0, 1);
    MultiSeries got = compose_fibered(f, g1, g2);
    CHECK(coeff_distance(got, expx * mono(0, 1, 1)) < 1e-12);

    // identity substitution
    std::mt19937_64 rng(3);
    MultiSeries h = random_series(rng, K, D);
    CHECK(coeff_distance(compose_fibered(h, mono(0, 1, 0), mono(0, 0, 1)), h) < 1e-12);

    // linear f passes through
    MultiSeries lin = mono(0, 1, 0);
    MultiSeries sub = mono(0, 1, 0) + mono(0, 1, 1);
    CHECK(coeff_distance(compose_fibered(lin, sub, mono(0, 0, 1)), sub) < 1e-12);

    // constant term rejected
    MultiSeries bad = mono(0, 1, 0) + MultiSeries::constant(0.5, K, D);
    CHECK_THROWS_AS(compose_fibered(f, bad, g2), substitution_error);
}

TEST_CASE("compose_fibered associativity") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        MultiSeries f = random_series(rng, K, D, 8);
        MultiSeries g1 = random_series_no_const(rng, K, D, 6), g2 = random_series_no_const(rng, K, D, 6);
        MultiSeries h1 = random_series_no_const(rng, K, D, 6), h2 = random_series_no_const(rng, K, D, 6);
        MultiSeries lhs = compose_fibered(compose_fibered(f, g1, g2), h1, h2);
        MultiSeries rhs =
            compose_fibered(f, compose_fibered(g1, h1, h2), compose_fibered(g2, h1, h2));
        CHECK(coeff_distance(lhs, rhs) < 1e-9);
    }
}

TEST_CASE("lie_derivative eigenvalues and Leibniz") {
    MultiSeries zero(K, D);
    PolyVectorField C{zero, -mono(0, 1, 0), mono(0, 0, 1)};
    PolyVectorField R{zero, mono(0, 1, 0), mono(0, 0, 1)};

    // L_C(y1^k1 y2^k2) = (k2 - k1) * monomial
    MultiSeries m = mono(0, 2, 1);
    CHECK(coeff_distance(lie_derivative(C, m), m * cplx(-1.0, 0)) < 1e-13);

    // constants are flat
    std::mt19937_64 rng(23);
    PolyVectorField V{random_series(rng, K, D), random_series(rng, K, D), random_series(rng, K, D)};
    CHECK(lie_derivative(V, MultiSeries::constant(3.0, K, D)).empty());

    // Euler operator on a degree-2 monomial
    CHECK(coeff_distance(lie_derivative(R, mono(0, 1, 1)), mono(0, 1, 1) * 2.0) < 1e-13);

    // Leibniz rule on random data
    for (int trial = 0; trial < 10; ++trial) {
        MultiSeries f = random_series(rng, K, D, 8), g = random_series(rng, K, D, 8);
        MultiSeries lhs = lie_derivative(V, f * g);
        MultiSeries rhs = f * lie_derivative(V, g) + g * lie_derivative(V, f);
        // exact below the truncation boundary in both gradings
        CHECK(coeff_distance_below(lhs, rhs, K - 1, D) < 1e-9);
    }
}

TEST_CASE("exp_flow_map") {
    auto [i1, i2] = exp_flow_map(MultiSeries(K, D), 1, 1);
    CHECK(coeff_distance(i1, mono(0, 1, 0)) == doctest::Approx(0.0));
    CHECK(coeff_distance(i2, mono(0, 0, 1)) == doctest::Approx(0.0));

    // tau = x, weights (1,1): components y_i * exp(x)
    auto [e1, e2] = exp_flow_map(mono(1, 0, 0), 1, 1);
    double fact = 1;
    for (int k = 1; k < K; ++k) {
        fact *= k;
        CHECK(std::abs(e1.coeff(k, 1, 0) - 1.0 / fact) < 1e-13);
        CHECK(std::abs(e2.coeff(k, 0, 1) - 1.0 / fact) < 1e-13);
    }

    CHECK_THROWS_AS(exp_flow_map(MultiSeries::constant(1.0, K, D), 1, 1), flow_time_error);
}

TEST_CASE("tangential flow has unit y-Jacobian to truncation") {
    std::mt19937_64 rng(31);
    MultiSeries v = mono(0, 1, 1, cplx(0.3, 0.1)) + mono(0, 2, 2, cplx(-0.2, 0.05));
    auto [g1, g2] = exp_flow_map(v, -1, 1);
    MultiSeries det = g1.dy1() * g2.dy2() - g1.dy2() * g2.dy1();
    CHECK(coeff_distance_below(det, MultiSeries::constant(1.0, K, D), K, D) < 1e-10);
}

TEST_CASE("resonant_split") {
    MultiSeries f = mono(0, 1, 1) + mono(0, 1, 0);
    auto [res, nonres] = resonant_split(f);
    CHECK(coeff_distance(res, mono(0, 1, 1)) == doctest::Approx(0.0));
    CHECK(coeff_distance(nonres, mono(0, 1, 0)) == doctest::Approx(0.0));

    MultiSeries pure = mono(0, 2, 2, cplx(2.0, 1.0));
    auto [r2, n2] = resonant_split(pure);
    CHECK(coeff_distance(r2, pure) == doctest::Approx(0.0));
    CHECK(n2.empty());

    // x-powers are irrelevant to resonance
    MultiSeries g = mono(1, 2, 0) + mono(2, 1, 1);
    auto [r3, n3] = resonant_split(g);
    CHECK(coeff_distance(r3, mono(2, 1, 1)) == doctest::Approx(0.0));
    CHECK(coeff_distance(n3, mono(1, 2, 0)) == doctest::Approx(0.0));

    // projection pair on random input
    std::mt19937_64 rng(41);
    MultiSeries h = random_series(rng, K, D);
    auto [hr, hn] = resonant_split(h);
    CHECK(coeff_distance(hr + hn, h) == doctest::Approx(0.0));
    auto [hrr, hrn] = resonant_split(hr);
    CHECK(hrn.empty());
    CHECK(coeff_distance(hrr, hr) == doctest::Approx(0.0));
    auto [hnr, hnn] = resonant_split(hn);
    CHECK(hnr.empty());
    CHECK(coeff_distance(hnn, hn) == doctest::Approx(0.0));
}

TEST_CASE("exp and recip series") {
    std::mt19937_64 rng(53);
    MultiSeries f = random_series_no_const(rng, K, D, 8, 0.4);
    MultiSeries e = exp_series(f);
    // exp(f) * exp(-f) = 1
    CHECK(coeff_distance(e * exp_series(-f), MultiSeries::constant(1.0, K, D)) < 1e-10);

    MultiSeries u = MultiSeries::constant(cplx(2.0, 0.5), K, D) + f;
    CHECK(coeff_distance(u * recip_series(u), MultiSeries::constant(1.0, K, D)) < 1e-10);
}

TEST_CASE("valid_x bookkeeping through x^2 d/dx") {
    std::mt19937_64 rng(61);
    MultiSeries f = random_series(rng, K, D);
    CHECK(f.valid_x() == K);
    CHECK(f.dx().valid_x() == K - 1);
    MultiSeries x2 = mono(2, 0, 0);
    CHECK((x2 * f.dx()).valid_x() == K); // restored by the x^2 factor
}

TEST_CASE("uniseries basics") {
    UniSeries f(6);
    f.set(0, 1.0);
    f.set(1, cplx(0, 2.0));
    UniSeries g = f * f;
    CHECK(std::abs(g.coeff(2) - cplx(-4.0, 0)) < 1e-14);
    CHECK(std::abs((recip_series(f) * f).coeff(0) - 1.0) < 1e-14);
    UniSeries h = exp_series(UniSeries({0.0, 1.0, 0.0, 0.0, 0.0, 0.0}, 6));
    CHECK(std::abs(h.coeff(3) - 1.0 / 6) < 1e-14);
    CHECK(std::abs(f.antideriv().coeff(2) - cplx(0, 1.0)) < 1e-14);
}
