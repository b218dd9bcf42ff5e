#include "drsn/normal_form.hpp"

#include "drsn/borel.hpp"

#include <algorithm>
#include <cmath>

namespace drsn {

namespace {

UniSeries linear_part(const MultiSeries& comp, int n1, int n2) {
    UniSeries r(comp.x_order());
    for (const auto& [idx, c] : comp.terms())
        if (idx.n1 == n1 && idx.n2 == n2) r.set(idx.m, c);
    return r;
}

// coefficient of x^k in a product of univariate partial solutions; used by
// the coefficientwise Riccati recursions
cplx conv_at(const UniSeries& a, const UniSeries& b, int k) {
    cplx s{};
    for (int i = 0; i <= k; ++i) s += a.coeff(i) * b.coeff(k - i);
    return s;
}

} // namespace

CenterManifoldResult center_manifold(const SaddleNodeField& Y) {
    const int K = Y.x_order(), D = Y.y_order();
    const cplx lambda = Y.lambda;

    UniSeries yh1(K), yh2(K);
    for (int k = 1; k < K; ++k) {
        MultiSeries g1 = to_multi_x(yh1, K, D);
        MultiSeries g2 = to_multi_x(yh2, K, D);
        cplx c1 = compose_fibered(Y.field.comp_y1, g1, g2).coeff(k, 0, 0);
        cplx c2 = compose_fibered(Y.field.comp_y2, g1, g2).coeff(k, 0, 0);
        // x^k coefficient of x^2 y' = comp(x, y(x)); only the diagonal term
        // involves the unknown order-k coefficient
        yh1.set(k, (c1 - cplx(k - 1, 0) * yh1.coeff(k - 1)) / lambda);
        yh2.set(k, (cplx(k - 1, 0) * yh2.coeff(k - 1) - c2) / lambda);
    }

    MultiSeries y1m = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2m = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    ConjugacyMap map = ConjugacyMap::from_components(y1m - to_multi_x(yh1, K, D),
                                                     y2m - to_multi_x(yh2, K, D), "center_manifold");
    ConjugacyMap inv = ConjugacyMap::from_components(y1m + to_multi_x(yh1, K, D),
                                                     y2m + to_multi_x(yh2, K, D), "center_manifold");

    CenterManifoldResult out;
    out.yhat1 = yh1;
    out.yhat2 = yh2;
    out.map = map;
    PolyVectorField pushed = push_forward(Y.field, map, &inv);
    out.remainder = std::max(linear_part(pushed.comp_y1, 0, 0).max_abs(),
                             linear_part(pushed.comp_y2, 0, 0).max_abs());
    out.field = Y;
    out.field.field = pushed;
    return out;
}

DiagonalizeResult diagonalize_linear_terms(const SaddleNodeField& Y1) {
    const int K = Y1.x_order(), D = Y1.y_order();
    const cplx lambda = Y1.lambda;

    UniSeries lin11 = linear_part(Y1.field.comp_y1, 1, 0);
    UniSeries lin12 = linear_part(Y1.field.comp_y1, 0, 1);
    UniSeries lin21 = linear_part(Y1.field.comp_y2, 1, 0);
    UniSeries lin22 = linear_part(Y1.field.comp_y2, 0, 1);
    lin11.set(0, lin11.coeff(0) + lambda); // strip the diagonal constants
    lin22.set(0, lin22.coeff(0) - lambda);
    UniSeries b1 = lin11.div_x(1), c1 = lin12.div_x(1);
    UniSeries c2 = lin21.div_x(1), b2 = lin22.div_x(1);

    // x^2 p1' = (2l + x(b2 - 1 - b1)) p1 + c2 - x^2 c1 p1^2
    // x^2 p2' = (-2l + x(b1 - 1 - b2)) p2 + c1 - x^2 c2 p2^2
    UniSeries p1(K), p2(K);
    UniSeries e1 = b2 - b1, e2 = b1 - b2;
    e1.set(0, e1.coeff(0) - 1.0);
    e2.set(0, e2.coeff(0) - 1.0);
    p1.set(0, -c2.coeff(0) / (2.0 * lambda));
    p2.set(0, c1.coeff(0) / (2.0 * lambda));
    for (int k = 1; k < K; ++k) {
        cplx q1 = conv_at(c1, p1 * p1, k - 2);
        cplx q2 = conv_at(c2, p2 * p2, k - 2);
        cplx r1 = conv_at(e1, p1, k - 1);
        cplx r2 = conv_at(e2, p2, k - 1);
        p1.set(k, (cplx(k - 1, 0) * p1.coeff(k - 1) - c2.coeff(k) - r1 + q1) / (2.0 * lambda));
        p2.set(k, (cplx(k - 1, 0) * p2.coeff(k - 1) - c1.coeff(k) - r2 + q2) / (-2.0 * lambda));
    }

    MultiSeries y1m = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2m = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    MultiSeries xp1 = to_multi_x(p1.mul_x(1), K, D);
    MultiSeries xp2 = to_multi_x(p2.mul_x(1), K, D);
    ConjugacyMap map = ConjugacyMap::from_components(y1m + xp2 * y2m, y2m + xp1 * y1m,
                                                     "diagonalize_linear_terms");

    DiagonalizeResult out;
    out.p1 = p1;
    out.p2 = p2;
    out.a1hat = b1 + (c1 * p1).mul_x(1);
    out.a2hat = b2 + (c2 * p2).mul_x(1);
    out.map = map;
    out.field = Y1;
    out.field.field = push_forward(Y1.field, map);
    out.remainder = std::max(linear_part(out.field.field.comp_y1, 0, 1).max_abs(),
                             linear_part(out.field.field.comp_y2, 1, 0).max_abs());
    return out;
}

GaugeResult scalar_gauge(const SaddleNodeField& Y2) {
    const int K = Y2.x_order(), D = Y2.y_order();
    const cplx lambda = Y2.lambda;

    UniSeries lin11 = linear_part(Y2.field.comp_y1, 1, 0);
    UniSeries lin22 = linear_part(Y2.field.comp_y2, 0, 1);
    lin11.set(0, lin11.coeff(0) + lambda);
    lin22.set(0, lin22.coeff(0) - lambda);
    UniSeries a1h = lin11.div_x(1);
    UniSeries a2h = lin22.div_x(1);
    cplx a1 = a1h.coeff(0), a2 = a2h.coeff(0);

    auto gauge = [&](const UniSeries& ah, cplx a) {
        UniSeries g = ah;
        g.set(0, g.coeff(0) - a);
        return exp_series(g.antideriv());
    };
    UniSeries q1 = gauge(a1h, a1), q2 = gauge(a2h, a2);

    MultiSeries y1m = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2m = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    ConjugacyMap map = ConjugacyMap::from_components(to_multi_x(q1, K, D) * y1m,
                                                     to_multi_x(q2, K, D) * y2m, "scalar_gauge");

    GaugeResult out;
    out.q1 = q1;
    out.q2 = q2;
    out.map = map;
    out.field = Y2;
    out.field.field = push_forward(Y2.field, map);
    out.field.a1 = a1;
    out.field.a2 = a2;
    UniSeries d1 = linear_part(out.field.field.comp_y1, 1, 0);
    UniSeries d2 = linear_part(out.field.field.comp_y2, 0, 1);
    d1.set(0, d1.coeff(0) + lambda);
    d1.set(1, d1.coeff(1) - a1);
    d2.set(0, d2.coeff(0) - lambda);
    d2.set(1, d2.coeff(1) - a2);
    out.remainder = std::max(d1.max_abs(), d2.max_abs());
    return out;
}

StraightenResult straighten_hypersurfaces(const SaddleNodeField& Y3) {
    const int K = Y3.x_order(), D = Y3.y_order();
    const cplx lambda = Y3.lambda, a1 = Y3.a1, a2 = Y3.a2;

    MultiSeries y1m = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2m = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    MultiSeries lin1 = y1m * (-lambda) + MultiSeries::monomial({1, 1, 0}, a1, K, D);
    MultiSeries lin2 = y2m * lambda + MultiSeries::monomial({1, 0, 1}, a2, K, D);
    MultiSeries F1 = Y3.field.comp_y1 - lin1;
    MultiSeries F2 = Y3.field.comp_y2 - lin2;

    StraighteningState st;
    st.psi1 = MultiSeries(K, D);
    st.psi2 = MultiSeries(K, D);
    st.T1 = MultiSeries(K, D);
    st.T2 = MultiSeries(K, D);

    auto delta_at = [&](int j, int n1, int n2) {
        // delta_{j,n}(x) = l1(x) n1 + l2(x) n2 - l_j(x), with l1 = -l + a1 x,
        // l2 = l + a2 x; linear in x by construction
        cplx k0 = lambda * cplx(n2 - n1, 0) + (j == 1 ? lambda : -lambda);
        cplx k1 = a1 * cplx(n1, 0) + a2 * cplx(n2, 0) - (j == 1 ? a1 : a2);
        UniSeries d(K);
        d.set(0, k0);
        d.set(1, k1);
        return d;
    };

    for (int deg = 2; deg <= D; ++deg) {
        MultiSeries z1 = compose_fibered(F1, y1m + st.psi1, y2m + st.psi2) -
                         st.T1 * st.psi1.dy1() - st.T2 * st.psi1.dy2();
        MultiSeries z2 = compose_fibered(F2, y1m + st.psi1, y2m + st.psi2) -
                         st.T1 * st.psi2.dy1() - st.T2 * st.psi2.dy2();
        for (int n1 = 0; n1 <= deg; ++n1) {
            int n2 = deg - n1;
            const bool edge = (n1 == 0 || n2 == 0);
            for (int j = 1; j <= 2; ++j) {
                MultiSeries& z = j == 1 ? z1 : z2;
                UniSeries zeta(K);
                for (const auto& [idx, c] : z.terms())
                    if (idx.n1 == n1 && idx.n2 == n2) zeta.set(idx.m, c);
                st.zeta_cache[{j, n1, n2}] = zeta;
                if (edge) {
                    UniSeries delta = delta_at(j, n1, n2);
                    st.delta_table[{j, n1, n2}] = delta;
                    cplx k = delta.coeff(0);
                    if (std::abs(k) < eq_tol)
                        throw internal_invariant_error(
                            "straighten: resonance denominator underflow");
                    UniSeries psi = solve_irregular_ode(zeta, k, delta.coeff(1) / k);
                    MultiSeries& target = j == 1 ? st.psi1 : st.psi2;
                    for (int m = 0; m < K; ++m)
                        if (psi.coeff(m) != cplx{}) target.set({m, n1, n2}, psi.coeff(m));
                } else {
                    MultiSeries& target = j == 1 ? st.T1 : st.T2;
                    for (int m = 0; m < K; ++m)
                        if (zeta.coeff(m) != cplx{}) target.set({m, n1, n2}, zeta.coeff(m));
                }
            }
        }
    }

    PolyVectorField prep;
    prep.comp_x = Y3.field.comp_x;
    prep.comp_y1 = lin1 + st.T1;
    prep.comp_y2 = lin2 + st.T2;

    // the inverse direction was solved: (id + psi) pushes prep back to Y3
    ConjugacyMap psi_map =
        ConjugacyMap::from_components(y1m + st.psi1, y2m + st.psi2, "straighten_inverse");
    PolyVectorField check = verify_conjugacy(prep, psi_map, Y3.field);

    StraightenResult out;
    out.state = st;
    out.map = invert(psi_map);
    out.map.provenance = {"straighten_hypersurfaces"};
    out.field = Y3;
    out.field.field = prep;
    out.remainder = std::max(check.comp_y1.max_abs_below_x(check.comp_y1.valid_x()),
                             check.comp_y2.max_abs_below_x(check.comp_y2.valid_x()));
    return out;
}

PreparedSplit split_prepared(const SaddleNodeField& Y) {
    const int K = Y.x_order(), D = Y.y_order();
    MultiSeries y1m = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2m = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    MultiSeries u1 = Y.field.comp_y1.div_y(1, 1e-10);
    MultiSeries u2 = Y.field.comp_y2.div_y(2, 1e-10);
    MultiSeries lin1 = MultiSeries::constant(-Y.lambda, K, D) +
                       MultiSeries::monomial({1, 0, 0}, Y.a1, K, D);
    MultiSeries lin2 = MultiSeries::constant(Y.lambda, K, D) +
                       MultiSeries::monomial({1, 0, 0}, Y.a2, K, D);
    MultiSeries e1 = u1 - lin1; // R - D
    MultiSeries e2 = u2 - lin2; // R + D
    PreparedSplit s;
    s.tangential = (e2 - e1) * 0.5;
    s.radial = (e2 + e1) * 0.5;
    return s;
}

UniSeries resonant_homological_time(const UniSeries& q, cplx a, int k, bool radial,
                                    double* condition) {
    const int vord = q.order();
    UniSeries w(vord);
    if (k == 1) {
        // v (a + 2 delta_{k,1} q) w' = -q: integrate the slope series
        UniSeries den(vord);
        den.set(0, a);
        if (radial)
            for (int j = 0; j < vord; ++j) den.set(j, den.coeff(j) + 2.0 * q.coeff(j));
        if (condition) *condition = std::max(*condition, 1.0 / std::abs(a));
        UniSeries slope = (q.div_x(1) * cplx(-1.0, 0)) * recip_series(den);
        for (int j = 0; j + 1 < vord; ++j) w.set(j + 1, slope.coeff(j) / cplx(j + 1, 0));
    } else {
        // w_j = -q_j / (a j + k - 1), degree by degree in v
        for (int j = 1; j < vord; ++j) {
            cplx den = a * cplx(j, 0) + cplx(k - 1, 0);
            if (std::abs(den) < 1e-10)
                throw degenerate_residue_error("resonant_homological_time: denominator ~ 0");
            if (condition) *condition = std::max(*condition, 1.0 / std::abs(den));
            w.set(j, -q.coeff(j) / den);
        }
    }
    return w;
}

OrderNResult normalize_to_order(const SaddleNodeField& Y_prep, int N) {
    const int K = Y_prep.x_order(), D = Y_prep.y_order();
    const cplx lambda = Y_prep.lambda;
    const cplx a = Y_prep.a1 + Y_prep.a2;
    if (classify(a) == Degeneracy::degenerate)
        throw degenerate_residue_error("normalize_to_order: residue in Q_{<=0}");

    SaddleNodeField cur = Y_prep;
    ConjugacyMap total = ConjugacyMap::identity(K, D);
    double condition = 1.0;

    for (int k = 1; k < N; ++k) {
        for (int pass = 0; pass < 2; ++pass) {
            const bool radial_step = pass == 0;
            PreparedSplit sp = split_prepared(cur);
            const MultiSeries& part = radial_step ? sp.radial : sp.tangential;

            MultiSeries slice = part.slice_x(k);
            auto [res_s, nonres_s] = resonant_split(slice);
            UniSeries rres = v_part(res_s);
            UniSeries vord_rres(D / 2 + 1);
            for (int j = 0; j < rres.order() && j < vord_rres.order(); ++j)
                vord_rres.set(j, rres.coeff(j));

            // current resonant tangential unit d(v) at x^0
            auto [d_res, d_non] = resonant_split(sp.tangential.restrict_x0());
            UniSeries dcur = v_part(d_res);

            UniSeries tau0 = resonant_homological_time(vord_rres, a, k, radial_step, &condition);

            // L_C(tau1) = -(G + 2 delta_{k,1,radial} G v tau0') / (l + d(v)),
            // G the non-resonant slice
            MultiSeries G = nonres_s;
            MultiSeries rhs = G;
            if (radial_step && k == 1) {
                UniSeries vt0p(tau0.order());
                for (int j = 1; j < tau0.order(); ++j) vt0p.set(j, tau0.coeff(j) * cplx(j, 0));
                rhs = G + (G * to_multi_v(vt0p, K, D)) * 2.0;
            }
            MultiSeries unit = MultiSeries::constant(lambda, K, D) + to_multi_v(dcur, K, D);
            rhs = -(rhs * recip_series(unit));

            MultiSeries tau1(K, D);
            double res_leak = 0;
            for (const auto& [idx, c] : rhs.terms()) {
                if (idx.m != 0) continue;
                if (idx.resonant()) {
                    res_leak = std::max(res_leak, std::abs(c));
                    continue;
                }
                tau1.set({0, idx.n1, idx.n2}, c / cplx(idx.n2 - idx.n1, 0));
            }
            if (res_leak > pipeline_eps)
                throw internal_invariant_error("normalize_to_order: resonant leak in tau1 data");

            MultiSeries tau = to_multi_v(tau0, K, D).mul_x(k - 1) + tau1.mul_x(k);
            auto [m1, m2] = exp_flow_map(tau, radial_step ? 1 : -1, 1);
            ConjugacyMap step = ConjugacyMap::from_components(
                m1, m2, (radial_step ? "order_radial_" : "order_tangential_") + std::to_string(k));
            cur.field = push_forward(cur.field, step);
            total = compose(step, total);
        }
    }

    OrderNResult out;
    out.field = cur;
    out.map = total;
    out.map.provenance = {"normalize_to_order_" + std::to_string(N)};
    out.condition = condition;
    PreparedSplit sp = split_prepared(cur);
    auto [dres, dnon] = resonant_split(sp.tangential.restrict_x0());
    out.d_N = v_part(dres);
    out.remainder = std::max(sp.radial.max_abs_below_x(std::min(N, cur.field.comp_y1.valid_x())),
                             (sp.tangential - to_multi_v(out.d_N, K, D))
                                 .max_abs_below_x(std::min(N, cur.field.comp_y1.valid_x())));
    return out;
}

PolyVectorField normal_form_field(const NormalFormData& nf, int K, int D) {
    MultiSeries y1m = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2m = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    MultiSeries u1 = MultiSeries::constant(-nf.lambda, K, D) +
                     MultiSeries::monomial({1, 0, 0}, nf.a1, K, D) + to_multi_v(nf.c1, K, D);
    MultiSeries u2 = MultiSeries::constant(nf.lambda, K, D) +
                     MultiSeries::monomial({1, 0, 0}, nf.a2, K, D) + to_multi_v(nf.c2, K, D);
    PolyVectorField f;
    f.comp_x = MultiSeries::monomial({2, 0, 0}, 1.0, K, D);
    f.comp_y1 = u1 * y1m;
    f.comp_y2 = u2 * y2m;
    return f;
}

NormalizeResult normalize(const SaddleNodeField& Y, const NormalizeOptions& opts) {
    const int K = Y.x_order(), D = Y.y_order();
    const int N = opts.N;
    if (N < 1) throw config_error("normalize: N must be >= 1");
    if (D < 2 * N)
        throw config_error("normalize: y_order must be at least 2N to carry d^(N) faithfully");
    if (classify(Y) == Degeneracy::degenerate)
        throw degenerate_residue_error("normalize: degenerate residue");

    NormalizeResult out;
    out.data.lambda = Y.lambda;
    auto note = [&](const std::string& name, double r) {
        out.data.stage_remainders.emplace_back(name, r);
    };

    // stage 0: normalize the restriction to {x = 0}
    RestrictionNormalization rn =
        linearize_restriction(restrict_to_x0(Y), Y.lambda, opts.gamma_res);
    SaddleNodeField cur = Y;
    cur.field = push_forward(Y.field, rn.map);
    ConjugacyMap total = rn.map;
    note("restriction_" + rn.route, rn.obstruction);

    CenterManifoldResult cm = center_manifold(cur);
    total = compose(cm.map, total);
    note("center_manifold", cm.remainder);

    DiagonalizeResult dg = diagonalize_linear_terms(cm.field);
    total = compose(dg.map, total);
    note("diagonalize_linear_terms", dg.remainder);

    GaugeResult gg = scalar_gauge(dg.field);
    total = compose(gg.map, total);
    note("scalar_gauge", gg.remainder);

    StraightenResult stn = straighten_hypersurfaces(gg.field);
    total = compose(stn.map, total);
    note("straighten_hypersurfaces", stn.remainder);

    OrderNResult ord = normalize_to_order(stn.field, N);
    total = compose(ord.map, total);
    note("normalize_to_order", ord.remainder);

    SaddleNodeField YN = ord.field;
    out.data.a1 = YN.a1;
    out.data.a2 = YN.a2;
    out.data.d_N = ord.d_N;
    out.data.condition = ord.condition;

    // independent extraction of c1, c2 from the two components
    MultiSeries u1 = YN.field.comp_y1.div_y(1, 1e-10).restrict_x0() +
                     MultiSeries::constant(YN.lambda, K, D);
    MultiSeries u2 = YN.field.comp_y2.div_y(2, 1e-10).restrict_x0() -
                     MultiSeries::constant(YN.lambda, K, D);
    auto [c1r, c1n] = resonant_split(u1);
    auto [c2r, c2n] = resonant_split(u2);
    out.data.c1 = v_part(c1r);
    out.data.c2 = v_part(c2r);
    out.data.nonresonant_defect = std::max(c1n.max_abs(), c2n.max_abs());

    // end-to-end conjugacy residual against the assembled normal form
    PolyVectorField model = normal_form_field(out.data, K, D);
    PolyVectorField resid = verify_conjugacy(Y.field, total, model);
    int cut = std::min({N, resid.comp_y1.valid_x(), resid.comp_y2.valid_x()});
    out.data.residual_max =
        std::max(resid.comp_y1.max_abs_below_x(cut), resid.comp_y2.max_abs_below_x(cut));

    out.map = total;
    out.map.is_tangent_to_identity = total.check_tangency();
    out.Y_N = YN;
    return out;
}

} // namespace drsn
