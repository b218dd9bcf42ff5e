#include "drsn/painleve.hpp"

#include <cmath>
#include <map>
#include <tuple>

namespace drsn {

cplx p1_translation_constant() { return cplx(0.0, 1.0 / std::sqrt(6.0)); }

PolyVectorField p1_field(int K, int D) {
    const cplx z = p1_translation_constant();
    PolyVectorField Y;
    Y.comp_x = MultiSeries::monomial({2, 0, 0}, 1.0, K, D);
    Y.comp_y1 = MultiSeries(K, D);
    Y.comp_y1.set({0, 0, 1}, -4.0 / 5);
    Y.comp_y1.set({1, 1, 0}, 2.0 / 5);
    Y.comp_y1.set({1, 0, 0}, 2.0 / 5 * z);
    Y.comp_y2 = MultiSeries(K, D);
    Y.comp_y2.set({0, 2, 0}, -24.0 / 5);
    Y.comp_y2.set({0, 1, 0}, -48.0 / 5 * z);
    Y.comp_y2.set({1, 0, 1}, 3.0 / 5);
    return Y;
}

PolyVectorField p1_hamiltonian_field(int K, int D) {
    // d/dt + z2 d/dz1 + (6 z1^2 + t) d/dz2 on the (t, z1, z2) slots
    PolyVectorField Z;
    Z.comp_x = MultiSeries::constant(1.0, K, D);
    Z.comp_y1 = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    Z.comp_y2 = MultiSeries(K, D);
    Z.comp_y2.set({0, 2, 0}, 6.0);
    Z.comp_y2.set({1, 0, 0}, 1.0);
    return Z;
}

namespace {

// substitute y1 <- y1 + shift
MultiSeries translate_y1(const MultiSeries& f, cplx shift) {
    MultiSeries r(f.x_order(), f.y_order());
    r.set_valid_x(f.valid_x());
    for (const auto& [idx, c] : f.terms()) {
        double binom = 1.0;
        cplx s_pow(1.0, 0.0);
        for (int j = idx.n1; j >= 0; --j) {
            r.add({idx.m, j, idx.n2}, c * binom * s_pow);
            binom = binom * j / (idx.n1 - j + 1);
            s_pow *= shift;
        }
    }
    return r;
}

// accumulate monomials on the x^{1/5} lattice: key (e5, n1, n2)
using Quint = std::map<std::tuple<int, int, int>, cplx>;

void add_quint(Quint& q, int e5, int n1, int n2, cplx c) {
    if (std::abs(c) < coeff_eps) return;
    auto key = std::make_tuple(e5, n1, n2);
    q[key] += c;
}

// monomial t^a z1^b z2^c becomes y1^b y2^c x^{(-4a-2b-3c)/5}; extra is an
// additional x-exponent in fifths carried by the chart prefactors
void push_component(Quint& q, const MultiSeries& comp, int extra_e5, cplx scale) {
    for (const auto& [idx, c] : comp.terms())
        add_quint(q, -4 * idx.m - 2 * idx.n1 - 3 * idx.n2 + extra_e5, idx.n1, idx.n2, c * scale);
}

MultiSeries quint_to_series(const Quint& q, int K, int D) {
    MultiSeries r(K, D);
    for (const auto& [key, c] : q) {
        auto [e5, n1, n2] = key;
        if (std::abs(c) < 1e-12) continue;
        if (e5 < 0 || e5 % 5 != 0)
            throw shape_error("boutroux_transform: fractional x-power survives the chart");
        r.set({e5 / 5, n1, n2}, c);
    }
    return r;
}

} // namespace

PolyVectorField boutroux_transform(const PolyVectorField& H) {
    const int K = H.comp_x.x_order(), D = H.comp_x.y_order();
    PolyVectorField expected = p1_hamiltonian_field(K, D);
    if ((H.comp_x - expected.comp_x).max_abs() > 1e-12 ||
        (H.comp_y1 - expected.comp_y1).max_abs() > 1e-12 ||
        (H.comp_y2 - expected.comp_y2).max_abs() > 1e-12)
        throw shape_error("boutroux_transform: input is not the (P_I) Hamiltonian field");

    // L_Z of the chart coordinates, on the exponent lattice (fifths of x):
    //   x  = t^{-5/4}:  dx  = -(5/4) t^{-9/4} comp_t
    //   y1 = z1 t^{-1/2}: dy1 = t^{-1/2} comp_z1 - (1/2) z1 t^{-3/2} comp_t
    //   y2 = z2 t^{-3/4}: dy2 = t^{-3/4} comp_z2 - (3/4) z2 t^{-7/4} comp_t
    // t^q carries x-exponent -4q in fifths.
    Quint qx, qy1, qy2;
    push_component(qx, H.comp_x, 9, -5.0 / 4);
    push_component(qy1, H.comp_y1, 2, 1.0);
    {
        // z1 t^{-3/2} comp_t: shift n1 by one
        Quint tmp;
        push_component(tmp, H.comp_x, 6, -1.0 / 2);
        for (const auto& [key, c] : tmp) {
            auto [e5, n1, n2] = key;
            add_quint(qy1, e5, n1 + 1, n2, c);
        }
    }
    push_component(qy2, H.comp_y2, 3, 1.0);
    {
        Quint tmp;
        push_component(tmp, H.comp_x, 7, -3.0 / 4);
        for (const auto& [key, c] : tmp) {
            auto [e5, n1, n2] = key;
            add_quint(qy2, e5, n1, n2 + 1, c);
        }
    }

    // multiply by -(4/5) x^{1/5}
    auto scale = [](Quint& q) {
        Quint out;
        for (const auto& [key, c] : q) {
            auto [e5, n1, n2] = key;
            out[{e5 + 1, n1, n2}] = c * (-4.0 / 5);
        }
        q = std::move(out);
    };
    scale(qx);
    scale(qy1);
    scale(qy2);

    PolyVectorField Y;
    Y.comp_x = quint_to_series(qx, K, D);
    Y.comp_y1 = quint_to_series(qy1, K, D);
    Y.comp_y2 = quint_to_series(qy2, K, D);

    const cplx z = p1_translation_constant();
    Y.comp_y1 = translate_y1(Y.comp_y1, z);
    Y.comp_y2 = translate_y1(Y.comp_y2, z);
    Y.comp_x = translate_y1(Y.comp_x, z);
    return Y;
}

HamiltonianCheck check_transversally_hamiltonian(const PolyVectorField& Y,
                                                 const TransverseStructure& ts) {
    const int K = Y.comp_x.x_order(), D = Y.comp_x.y_order();
    HamiltonianCheck out;
    // L_Y(dx) = d(comp_x) must lie in <dx>, i.e. comp_x depends on x only;
    // L_Y(dy1^dy2/x) in <dx> reduces to div_y(b1,b2)/x - (comp_x/x^2) = 0
    // for comp_x = x^2: certificate = d(b1)/dy1 + d(b2)/dy2 - x.
    (void)K;
    (void)D;
    bool fibered_ok = true;
    for (const auto& [idx, c] : Y.comp_x.terms())
        if (idx.ydeg() != 0 && std::abs(c) > ts.ideal_tolerance) fibered_ok = false;
    out.certificate = Y.comp_y1.dy1() + Y.comp_y2.dy2() - Y.comp_x.div_x(1, ts.ideal_tolerance);
    out.ok = fibered_ok && out.certificate.max_abs() <= ts.ideal_tolerance;
    return out;
}

bool check_transversally_symplectic(const ConjugacyMap& map, double tol) {
    MultiSeries det = y_jacobian_det(map);
    MultiSeries one = MultiSeries::constant(1.0, map.x_order(), map.y_order());
    return (det - one).max_abs() <= tol;
}

bool check_transversally_symplectic_samples(
    const std::function<std::array<cplx, 3>(const std::array<cplx, 3>&)>& map,
    const std::vector<std::array<cplx, 3>>& points, double tol) {
    for (const auto& p : points) {
        const double h = 1e-5 * std::max({std::abs(p[1]), std::abs(p[2]), 1e-3});
        auto at = [&](cplx d1, cplx d2) { return map({p[0], p[1] + d1, p[2] + d2}); };
        auto pp = at(h, 0), pm = at(-h, 0), qp = at(0, h), qm = at(0, -h);
        cplx j11 = (pp[1] - pm[1]) / (2 * h), j21 = (pp[2] - pm[2]) / (2 * h);
        cplx j12 = (qp[1] - qm[1]) / (2 * h), j22 = (qp[2] - qm[2]) / (2 * h);
        if (std::abs(j11 * j22 - j12 * j21 - 1.0) > tol) return false;
    }
    return true;
}

} // namespace drsn
