#include "drsn/conjugacy.hpp"

#include <algorithm>

namespace drsn {

ConjugacyMap ConjugacyMap::identity(int x_order, int y_order) {
    ConjugacyMap m;
    m.comp_y1 = MultiSeries::monomial({0, 1, 0}, 1.0, x_order, y_order);
    m.comp_y2 = MultiSeries::monomial({0, 0, 1}, 1.0, x_order, y_order);
    m.is_tangent_to_identity = true;
    return m;
}

ConjugacyMap ConjugacyMap::from_components(MultiSeries y1, MultiSeries y2, std::string tag) {
    ConjugacyMap m;
    m.comp_y1 = std::move(y1);
    m.comp_y2 = std::move(y2);
    m.provenance.push_back(std::move(tag));
    m.is_tangent_to_identity = m.check_tangency();
    return m;
}

bool ConjugacyMap::check_tangency() const {
    auto ok = [](const MultiSeries& f, int which) {
        for (const auto& [idx, c] : f.terms()) {
            if (idx.m + idx.ydeg() >= 2) continue;
            MultiIndex lin{0, which == 1 ? 1 : 0, which == 2 ? 1 : 0};
            if (idx == lin) {
                if (std::abs(c - cplx(1.0, 0.0)) > eq_tol) return false;
            } else if (std::abs(c) > eq_tol) {
                return false;
            }
        }
        if (std::abs(f.coeff(0, which == 1 ? 1 : 0, which == 2 ? 1 : 0) - cplx(1.0, 0.0)) > eq_tol)
            return false;
        return true;
    };
    return ok(comp_y1, 1) && ok(comp_y2, 2);
}

ConjugacyMap compose(const ConjugacyMap& outer, const ConjugacyMap& inner) {
    ConjugacyMap m;
    m.comp_y1 = compose_fibered(outer.comp_y1, inner.comp_y1, inner.comp_y2);
    m.comp_y2 = compose_fibered(outer.comp_y2, inner.comp_y1, inner.comp_y2);
    m.provenance = inner.provenance;
    m.provenance.insert(m.provenance.end(), outer.provenance.begin(), outer.provenance.end());
    m.is_tangent_to_identity = m.check_tangency();
    return m;
}

ConjugacyMap invert(const ConjugacyMap& map) {
    const int K = map.x_order(), D = map.y_order();
    MultiSeries y1 = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2 = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    // linear y-part at origin must be the identity
    if (std::abs(map.comp_y1.coeff(0, 1, 0) - cplx(1.0, 0.0)) > eq_tol ||
        std::abs(map.comp_y2.coeff(0, 0, 1) - cplx(1.0, 0.0)) > eq_tol ||
        std::abs(map.comp_y1.coeff(0, 0, 1)) > eq_tol ||
        std::abs(map.comp_y2.coeff(0, 1, 0)) > eq_tol)
        throw substitution_error("invert: y-linear part at the origin is not the identity");

    MultiSeries g1 = map.comp_y1 - y1; // total order >= 1, no pure y-linear part
    MultiSeries g2 = map.comp_y2 - y2;
    MultiSeries p1 = y1, p2 = y2;
    // each pass raises the total order of the error by one
    for (int it = 0; it < K + D + 2; ++it) {
        MultiSeries n1 = y1 - compose_fibered(g1, p1, p2);
        MultiSeries n2 = y2 - compose_fibered(g2, p1, p2);
        double change = (n1 - p1).max_abs() + (n2 - p2).max_abs();
        p1 = std::move(n1);
        p2 = std::move(n2);
        if (change < coeff_eps) break;
    }
    ConjugacyMap inv;
    inv.comp_y1 = std::move(p1);
    inv.comp_y2 = std::move(p2);
    inv.provenance = map.provenance;
    std::reverse(inv.provenance.begin(), inv.provenance.end());
    for (auto& tag : inv.provenance) tag = "inverse(" + tag + ")";
    inv.is_tangent_to_identity = map.is_tangent_to_identity;
    return inv;
}

PolyVectorField push_forward(const PolyVectorField& Y, const ConjugacyMap& map,
                             const ConjugacyMap* inverse_hint) {
    MultiSeries w1 = lie_derivative(Y, map.comp_y1);
    MultiSeries w2 = lie_derivative(Y, map.comp_y2);
    ConjugacyMap inv = inverse_hint ? *inverse_hint : invert(map);
    PolyVectorField Z;
    Z.comp_x = Y.comp_x;
    Z.comp_y1 = compose_fibered(w1, inv.comp_y1, inv.comp_y2);
    Z.comp_y2 = compose_fibered(w2, inv.comp_y1, inv.comp_y2);
    return Z;
}

PolyVectorField verify_conjugacy(const PolyVectorField& Y, const ConjugacyMap& map,
                                 const PolyVectorField& Y_target) {
    PolyVectorField R;
    R.comp_x = Y.comp_x - compose_fibered(Y_target.comp_x, map.comp_y1, map.comp_y2);
    R.comp_y1 =
        lie_derivative(Y, map.comp_y1) - compose_fibered(Y_target.comp_y1, map.comp_y1, map.comp_y2);
    R.comp_y2 =
        lie_derivative(Y, map.comp_y2) - compose_fibered(Y_target.comp_y2, map.comp_y1, map.comp_y2);
    return R;
}

MultiSeries y_jacobian_det(const ConjugacyMap& map) {
    return map.comp_y1.dy1() * map.comp_y2.dy2() - map.comp_y1.dy2() * map.comp_y2.dy1();
}

} // namespace drsn
