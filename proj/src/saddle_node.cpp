#include "drsn/saddle_node.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace drsn {

namespace {

MultiSeries x_squared(int K, int D) { return MultiSeries::monomial({2, 0, 0}, 1.0, K, D); }

void check_drsn_shape(const PolyVectorField& f, cplx lambda) {
    const int K = f.comp_x.x_order(), D = f.comp_x.y_order();
    if ((f.comp_x - x_squared(K, D)).max_abs() > eq_tol)
        throw not_saddle_node_error("comp_x is not x^2");
    if (std::abs(f.comp_y1.coeff(0, 0, 0)) > eq_tol || std::abs(f.comp_y2.coeff(0, 0, 0)) > eq_tol)
        throw not_saddle_node_error("components do not vanish at the origin");
    if (std::abs(f.comp_y1.coeff(0, 1, 0) + lambda) > eq_tol ||
        std::abs(f.comp_y2.coeff(0, 0, 1) - lambda) > eq_tol ||
        std::abs(f.comp_y1.coeff(0, 0, 1)) > eq_tol || std::abs(f.comp_y2.coeff(0, 1, 0)) > eq_tol)
        throw not_saddle_node_error("y-linear part at x = 0 is not diag(-lambda, lambda)");
    if (std::abs(lambda) < eq_tol) throw not_saddle_node_error("lambda must be nonzero");
}

} // namespace

SaddleNodeField make_saddle_node(PolyVectorField field, cplx lambda) {
    check_drsn_shape(field, lambda);
    SaddleNodeField Y;
    Y.field = std::move(field);
    Y.lambda = lambda;
    Y.residue = residue(Y.field);
    return Y;
}

BasisFields BasisFields::make(cplx lambda, cplx a1, cplx a2, int K, int D) {
    BasisFields b;
    MultiSeries zero(K, D);
    MultiSeries y1 = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2 = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    MultiSeries xy1 = MultiSeries::monomial({1, 1, 0}, 1.0, K, D);
    MultiSeries xy2 = MultiSeries::monomial({1, 0, 1}, 1.0, K, D);
    b.C_basis = {zero, -y1, y2};
    b.R_basis = {zero, y1, y2};
    b.Y0 = {x_squared(K, D), y1 * (-lambda) + xy1 * a1, y2 * lambda + xy2 * a2};
    return b;
}

cplx residue(const PolyVectorField& field) {
    return field.comp_y1.coeff(1, 1, 0) + field.comp_y2.coeff(1, 0, 1);
}

Degeneracy classify(cplx res, int q_max) {
    if (res.real() > residue_eps) return Degeneracy::strictly_non_degenerate;
    // test membership in Q_{<=0}: res ~ -p/q with p >= 0, q in [1, q_max]
    if (std::abs(res.imag()) <= residue_eps) {
        double t = -res.real(); // candidate p/q >= 0
        if (t < residue_eps) return Degeneracy::degenerate; // res ~ 0
        if (t >= 0) {
            for (int q = 1; q <= q_max; ++q) {
                double p = std::round(t * q);
                if (p >= 0 && std::abs(t - p / q) <= residue_eps) return Degeneracy::degenerate;
            }
        }
    }
    return Degeneracy::non_degenerate;
}

std::pair<SaddleNodeField, ConjugacyMap> diagonalize_constant_linear_part(const PolyVectorField& Y) {
    const int K = Y.comp_x.x_order(), D = Y.comp_x.y_order();
    if ((Y.comp_x - x_squared(K, D)).max_abs() > eq_tol)
        throw not_saddle_node_error("comp_x is not x^2");

    const cplx m11 = Y.comp_y1.coeff(0, 1, 0), m12 = Y.comp_y1.coeff(0, 0, 1);
    const cplx m21 = Y.comp_y2.coeff(0, 1, 0), m22 = Y.comp_y2.coeff(0, 0, 1);
    const cplx tr = m11 + m22, det = m11 * m22 - m12 * m21;
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    cplx mu1 = (tr + disc) / 2.0, mu2 = (tr - disc) / 2.0;
    if (std::abs(mu1 + mu2) > eq_tol || std::abs(mu1) < eq_tol)
        throw not_saddle_node_error("constant linear part does not have opposite nonzero eigenvalues");

    // lambda = eigenvalue with arg in (-pi/2, pi/2]; -lambda sits first
    double arg1 = std::arg(mu1);
    cplx lambda = (arg1 > -M_PI / 2.0 + 1e-15 && arg1 <= M_PI / 2.0 + 1e-15) ? mu1 : mu2;

    auto eigenvector = [&](cplx mu) -> std::pair<cplx, cplx> {
        // (M - mu) v = 0
        cplx a11 = m11 - mu, a12 = m12, a21 = m21, a22 = m22 - mu;
        std::pair<cplx, cplx> v;
        if (std::abs(a11) + std::abs(a12) >= std::abs(a21) + std::abs(a22))
            v = std::abs(a12) > std::abs(a11) ? std::pair<cplx, cplx>{1.0, -a11 / a12}
                                              : std::pair<cplx, cplx>{-a12 / a11, 1.0};
        else
            v = std::abs(a22) > std::abs(a21) ? std::pair<cplx, cplx>{1.0, -a21 / a22}
                                              : std::pair<cplx, cplx>{-a22 / a21, 1.0};
        double s = std::max(std::abs(v.first), std::abs(v.second));
        return {v.first / s, v.second / s};
    };

    auto [p11, p21] = eigenvector(-lambda);
    auto [p12, p22] = eigenvector(lambda);
    cplx detP = p11 * p22 - p12 * p21;
    if (std::abs(detP) < 1e-12)
        throw not_saddle_node_error("defective constant linear part");
    cplx s = std::sqrt(detP); // scale to determinant one
    p11 /= s; p21 /= s; p12 /= s; p22 /= s;
    detP = p11 * p22 - p12 * p21;
    cplx i11 = p22 / detP, i12 = -p12 / detP, i21 = -p21 / detP, i22 = p11 / detP;

    // map z = P^-1 y; push-forward components (P^-1 b(x, P z))
    MultiSeries y1m = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2m = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    MultiSeries Pz1 = y1m * p11 + y2m * p12;
    MultiSeries Pz2 = y1m * p21 + y2m * p22;
    MultiSeries b1 = compose_fibered(Y.comp_y1, Pz1, Pz2);
    MultiSeries b2 = compose_fibered(Y.comp_y2, Pz1, Pz2);

    PolyVectorField Z;
    Z.comp_x = Y.comp_x;
    Z.comp_y1 = b1 * i11 + b2 * i12;
    Z.comp_y2 = b1 * i21 + b2 * i22;

    ConjugacyMap map;
    map.comp_y1 = y1m * i11 + y2m * i12;
    map.comp_y2 = y1m * i21 + y2m * i22;
    map.provenance.push_back("diagonalize_linear_part");
    map.is_tangent_to_identity = map.check_tangency();

    return {make_saddle_node(Z, lambda), map};
}

std::pair<MultiSeries, MultiSeries> restrict_to_x0(const SaddleNodeField& Y) {
    return {Y.field.comp_y1.restrict_x0(), Y.field.comp_y2.restrict_x0()};
}

namespace {

// L_C eigenvalue of a scalar monomial
inline int c_eigen(const MultiIndex& idx) { return idx.n2 - idx.n1; }

} // namespace

OrbitalLinearization orbital_linearize_x0(const std::pair<MultiSeries, MultiSeries>& restriction,
                                          cplx lambda, const UniSeries* gamma_res) {
    const MultiSeries& f1 = restriction.first;
    const MultiSeries& f2 = restriction.second;
    const int K = f1.x_order(), D = f1.y_order();

    MultiSeries u1(K, D), u2(K, D);
    try {
        u1 = (-f1).div_y(1);
        u2 = f2.div_y(2);
    } catch (const division_error&) {
        throw not_div_integrable_error("restriction is not proportional to the C basis");
    }
    if ((u1 - u2).max_abs() > obstruction_eps)
        throw not_div_integrable_error(
            "restriction is not proportional to the C basis (defect " +
            std::to_string((u1 - u2).max_abs()) + ")");

    MultiSeries U = u2; // lambda + h(y)
    if (std::abs(U.coeff(0, 0, 0) - lambda) > eq_tol)
        throw not_div_integrable_error("restriction unit does not start at lambda");

    MultiSeries gamma(K, D);
    for (int deg = 1; deg <= D; ++deg) {
        // degree-deg part of U (1 - L_C gamma); only lower-degree gamma enters
        MultiSeries lc(K, D);
        for (const auto& [idx, c] : gamma.terms()) lc.set(idx, c * cplx(c_eigen(idx), 0));
        MultiSeries E = U - U * lc;
        for (const auto& [idx, c] : E.terms()) {
            if (idx.m != 0 || idx.ydeg() != deg || idx.resonant()) continue;
            gamma.add(idx, c / (lambda * cplx(c_eigen(idx), 0)));
        }
    }
    if (gamma_res) {
        for (int k = 0; k < gamma_res->order(); ++k)
            if (2 * k <= D) gamma.add({0, k, k}, gamma_res->coeff(k));
    }

    // push the restriction forward and read off the unit.  The conjugating
    // flow carries weights (+1, -1): with L = C and the displayed equation
    // L_C(gamma) = U_nres / U, the pushed unit is U (1 - L_C(gamma)) o phi^-1,
    // which is resonant exactly for this orientation.
    auto [g1, g2] = exp_flow_map(gamma, 1, -1);
    ConjugacyMap phi = ConjugacyMap::from_components(g1, g2, "orbital_linearize_x0");
    PolyVectorField X{MultiSeries(K, D), f1, f2};
    PolyVectorField Z = push_forward(X, phi);
    MultiSeries w1 = (-Z.comp_y1).div_y(1, 1e-10);
    MultiSeries w2 = Z.comp_y2.div_y(2, 1e-10);
    MultiSeries unit = (w1 + w2) * 0.5;
    auto [res, nonres] = resonant_split(unit - MultiSeries::constant(lambda, K, D));

    OrbitalLinearization out;
    out.gamma = gamma;
    out.d = v_part(res);
    out.residual = std::max(nonres.max_abs(), (w1 - w2).max_abs());
    if (out.residual > obstruction_eps)
        throw not_div_integrable_error("non-resonant defect survives orbital linearization: " +
                                       std::to_string(out.residual));
    return out;
}

namespace {

// time-1 flow of the polynomial vector field W = (w1, w2) as a map
ConjugacyMap flow_time_one(const MultiSeries& w1, const MultiSeries& w2) {
    const int K = w1.x_order(), D = w1.y_order();
    PolyVectorField W{MultiSeries(K, D), w1, w2};
    MultiSeries c1 = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries c2 = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    MultiSeries r1 = c1, r2 = c2;
    double fact = 1.0;
    for (int k = 1; k <= D + 1; ++k) {
        c1 = lie_derivative(W, c1);
        c2 = lie_derivative(W, c2);
        if (c1.empty() && c2.empty()) break;
        fact *= k;
        r1 += c1 * cplx(1.0 / fact, 0);
        r2 += c2 * cplx(1.0 / fact, 0);
    }
    return ConjugacyMap::from_components(r1, r2, "pd_flow");
}

} // namespace

RestrictionNormalization linearize_restriction(const std::pair<MultiSeries, MultiSeries>& restriction,
                                               cplx lambda, const UniSeries* gamma_res) {
    const MultiSeries& f1 = restriction.first;
    const MultiSeries& f2 = restriction.second;
    const int K = f1.x_order(), D = f1.y_order();

    // proportional restrictions go through the gamma machinery
    bool proportional = true;
    try {
        MultiSeries u1 = (-f1).div_y(1);
        MultiSeries u2 = f2.div_y(2);
        proportional = (u1 - u2).max_abs() <= obstruction_eps;
    } catch (const division_error&) {
        proportional = false;
    }

    RestrictionNormalization out;
    if (proportional) {
        OrbitalLinearization lin = orbital_linearize_x0(restriction, lambda, gamma_res);
        auto [g1, g2] = exp_flow_map(lin.gamma, 1, -1);
        out.map = ConjugacyMap::from_components(g1, g2, "orbital_linearize_x0");
        out.d = lin.d;
        out.obstruction = lin.residual;
        out.route = "gamma";
        return out;
    }

    // Poincare-Dulac route: eigen-corrections per total degree
    PolyVectorField cur{MultiSeries(K, D), f1, f2};
    ConjugacyMap total = ConjugacyMap::identity(K, D);
    UniSeries d(D / 2 + 1);
    double obstruction = 0.0;

    for (int deg = 2; deg <= D; ++deg) {
        MultiSeries target1 = (-MultiSeries::constant(lambda, K, D) - to_multi_v(d, K, D)) *
                              MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
        MultiSeries target2 = (MultiSeries::constant(lambda, K, D) + to_multi_v(d, K, D)) *
                              MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
        MultiSeries E1 = cur.comp_y1 - target1;
        MultiSeries E2 = cur.comp_y2 - target2;

        MultiSeries w1(K, D), w2(K, D);
        for (const auto& [idx, c] : E1.terms()) {
            if (idx.ydeg() != deg) continue;
            int ev = idx.n2 - idx.n1 + 1;
            if (ev == 0) continue; // resonant v^k y1 d/dy1
            w1.set(idx, -c / (lambda * cplx(ev, 0)));
        }
        for (const auto& [idx, c] : E2.terms()) {
            if (idx.ydeg() != deg) continue;
            int ev = idx.n2 - idx.n1 - 1;
            if (ev == 0) continue; // resonant v^k y2 d/dy2
            w2.set(idx, -c / (lambda * cplx(ev, 0)));
        }
        // resonant pair at odd degrees: absorb the antisymmetric part into d,
        // flag the symmetric part
        if (deg % 2 == 1) {
            int k = (deg - 1) / 2;
            cplx a = E1.coeff(0, k + 1, k), b = E2.coeff(0, k, k + 1);
            d.set(k, d.coeff(k) + (b - a) / 2.0);
            obstruction = std::max(obstruction, std::abs(a + b) / 2.0);
            if (std::abs(a + b) / 2.0 > obstruction_eps)
                throw not_div_integrable_error(
                    "resonant obstruction at degree " + std::to_string(deg) + ": " +
                    std::to_string(std::abs(a + b) / 2.0));
        }
        if (w1.empty() && w2.empty()) continue;
        ConjugacyMap step = flow_time_one(w1, w2);
        cur = push_forward(cur, step);
        total = compose(step, total);
    }

    out.map = total;
    out.map.provenance = {"linearize_restriction"};
    out.d = d;
    out.obstruction = obstruction;
    out.route = "poincare_dulac";
    return out;
}

SaddleNodeField make_random_field(std::uint64_t seed, int K, int D) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto rc = [&](double scale) { return cplx(unif(rng), unif(rng)) * scale; };

    cplx lambda = cplx(0.8 + 0.4 * std::abs(unif(rng)), unif(rng) * 0.5);
    cplx a1, a2;
    for (;;) {
        a1 = rc(0.8);
        a2 = rc(0.8);
        a2 += cplx(1.0, 0); // bias toward Re(a1+a2) > 0
        if (classify(a1 + a2) == Degeneracy::strictly_non_degenerate) break;
    }

    BasisFields basis = BasisFields::make(lambda, a1, a2, K, D);

    // prepared core Y0 + (d(v) + x D1) C + (x R1) R with small analytic data
    MultiSeries Dfun(K, D), Rfun(K, D);
    for (int k = 1; 2 * k <= D; ++k) Dfun.add({0, k, k}, rc(0.2 * std::pow(0.4, k)));
    std::uniform_int_distribution<int> pick_m(1, std::max(1, K / 3));
    std::uniform_int_distribution<int> pick_n(0, 2);
    for (int t = 0; t < 8; ++t) {
        int n1 = pick_n(rng), n2 = pick_n(rng);
        if (n1 + n2 == 0) n1 = 1;
        Dfun.add({pick_m(rng), n1, n2}, rc(0.15));
        n1 = pick_n(rng);
        n2 = pick_n(rng);
        if (n1 + n2 == 0) n2 = 1;
        Rfun.add({pick_m(rng), n1, n2}, rc(0.15)); // radial part carries x
    }

    PolyVectorField core;
    core.comp_x = basis.Y0.comp_x;
    core.comp_y1 = basis.Y0.comp_y1 + (Dfun * basis.C_basis.comp_y1) + (Rfun * basis.R_basis.comp_y1);
    core.comp_y2 = basis.Y0.comp_y2 + (Dfun * basis.C_basis.comp_y2) + (Rfun * basis.R_basis.comp_y2);

    // conjugate by random tangent-to-identity maps: a tangential flow, a
    // radial flow, and a translation exercising the center-manifold stage
    MultiSeries tau(K, D), sigma(K, D);
    for (int t = 0; t < 6; ++t) {
        MultiIndex i1{pick_m(rng) - 1, pick_n(rng), pick_n(rng)};
        if (i1.ydeg() + i1.m < 1) i1.m = 1;
        tau.add(i1, rc(0.1));
        MultiIndex i2{pick_m(rng) - 1, pick_n(rng), pick_n(rng)};
        if (i2.ydeg() + i2.m < 1) i2.n1 = 1;
        sigma.add(i2, rc(0.1));
    }
    auto [t1, t2] = exp_flow_map(tau, 1, 1);
    auto [s1, s2] = exp_flow_map(sigma, -1, 1);
    ConjugacyMap m1 = ConjugacyMap::from_components(t1, t2, "gen_radial");
    ConjugacyMap m2 = ConjugacyMap::from_components(s1, s2, "gen_tangential");
    MultiSeries tr1(K, D), tr2(K, D);
    tr1.set({2, 0, 0}, rc(0.3));
    tr1.set({3, 0, 0}, rc(0.3));
    tr2.set({2, 0, 0}, rc(0.3));
    ConjugacyMap m3 = ConjugacyMap::from_components(
        MultiSeries::monomial({0, 1, 0}, 1.0, K, D) + tr1,
        MultiSeries::monomial({0, 0, 1}, 1.0, K, D) + tr2, "gen_translation");

    PolyVectorField Y = push_forward(push_forward(push_forward(core, m1), m2), m3);
    return make_saddle_node(Y, lambda);
}

} // namespace drsn
