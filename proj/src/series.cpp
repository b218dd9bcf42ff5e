#include "drsn/series.hpp"

#include <algorithm>
#include <cmath>

namespace drsn {

MultiSeries::MultiSeries(int x_order, int y_order)
    : x_order_(x_order), y_order_(y_order), valid_x_(x_order) {
    if (x_order < 0 || y_order < 0)
        throw order_mismatch_error("truncation orders must be nonnegative");
}

MultiSeries MultiSeries::constant(cplx c, int x_order, int y_order) {
    MultiSeries f(x_order, y_order);
    f.set({0, 0, 0}, c);
    return f;
}

MultiSeries MultiSeries::monomial(MultiIndex idx, cplx c, int x_order, int y_order) {
    MultiSeries f(x_order, y_order);
    f.set(idx, c);
    return f;
}

cplx MultiSeries::coeff(MultiIndex idx) const {
    auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? cplx{} : it->second;
}

void MultiSeries::set(MultiIndex idx, cplx c) {
    if (idx.m < 0 || idx.n1 < 0 || idx.n2 < 0)
        throw order_mismatch_error("negative powers are not representable");
    if (idx.m >= x_order_ || idx.ydeg() > y_order_) return;
    if (std::abs(c) < coeff_eps)
        coeffs_.erase(idx);
    else
        coeffs_[idx] = c;
}

void MultiSeries::add(MultiIndex idx, cplx c) { set(idx, coeff(idx) + c); }

void MultiSeries::require_same_orders(const MultiSeries& o, const char* op) const {
    if (!same_orders(o))
        throw order_mismatch_error(std::string(op) + ": mixed truncation orders (" +
                                   std::to_string(x_order_) + "," + std::to_string(y_order_) +
                                   ") vs (" + std::to_string(o.x_order_) + "," +
                                   std::to_string(o.y_order_) + ")");
}

MultiSeries MultiSeries::operator+(const MultiSeries& o) const {
    require_same_orders(o, "add");
    MultiSeries r(*this);
    r.valid_x_ = std::min(valid_x_, o.valid_x_);
    for (const auto& [idx, c] : o.coeffs_) r.add(idx, c);
    return r;
}

MultiSeries MultiSeries::operator-(const MultiSeries& o) const {
    require_same_orders(o, "sub");
    MultiSeries r(*this);
    r.valid_x_ = std::min(valid_x_, o.valid_x_);
    for (const auto& [idx, c] : o.coeffs_) r.add(idx, -c);
    return r;
}

int MultiSeries::min_x() const {
    int m = valid_x_ < x_order_ ? valid_x_ : x_order_ + 1;
    for (const auto& [idx, c] : coeffs_) {
        m = std::min(m, idx.m);
        break; // map is ordered by (m, n1, n2)
    }
    return m;
}

MultiSeries MultiSeries::operator*(const MultiSeries& o) const {
    require_same_orders(o, "mul");
    MultiSeries r(x_order_, y_order_);
    // a product coefficient at x-power m is contaminated only if one factor
    // is read in its unknown region, which needs m >= valid + min_x(other)
    r.valid_x_ = std::min({x_order_, valid_x_ + o.min_x(), o.valid_x_ + min_x()});
    for (const auto& [ia, ca] : coeffs_) {
        for (const auto& [ib, cb] : o.coeffs_) {
            MultiIndex idx{ia.m + ib.m, ia.n1 + ib.n1, ia.n2 + ib.n2};
            if (idx.m >= x_order_ || idx.ydeg() > y_order_) continue;
            r.coeffs_[idx] += ca * cb;
        }
    }
    for (auto it = r.coeffs_.begin(); it != r.coeffs_.end();)
        it = std::abs(it->second) < coeff_eps ? r.coeffs_.erase(it) : std::next(it);
    return r;
}

MultiSeries MultiSeries::operator*(cplx s) const {
    MultiSeries r(x_order_, y_order_);
    r.valid_x_ = valid_x_;
    for (const auto& [idx, c] : coeffs_) r.set(idx, c * s);
    return r;
}

MultiSeries MultiSeries::operator-() const { return *this * cplx(-1.0, 0.0); }

MultiSeries MultiSeries::dx() const {
    MultiSeries r(x_order_, y_order_);
    r.valid_x_ = std::max(0, valid_x_ - 1);
    for (const auto& [idx, c] : coeffs_)
        if (idx.m > 0) r.set({idx.m - 1, idx.n1, idx.n2}, c * cplx(idx.m, 0));
    return r;
}

MultiSeries MultiSeries::dy1() const {
    MultiSeries r(x_order_, y_order_);
    r.valid_x_ = valid_x_;
    for (const auto& [idx, c] : coeffs_)
        if (idx.n1 > 0) r.set({idx.m, idx.n1 - 1, idx.n2}, c * cplx(idx.n1, 0));
    return r;
}

MultiSeries MultiSeries::dy2() const {
    MultiSeries r(x_order_, y_order_);
    r.valid_x_ = valid_x_;
    for (const auto& [idx, c] : coeffs_)
        if (idx.n2 > 0) r.set({idx.m, idx.n1, idx.n2 - 1}, c * cplx(idx.n2, 0));
    return r;
}

MultiSeries MultiSeries::mul_x(int j) const {
    MultiSeries r(x_order_, y_order_);
    r.valid_x_ = std::min(x_order_, valid_x_ + j);
    for (const auto& [idx, c] : coeffs_) r.set({idx.m + j, idx.n1, idx.n2}, c);
    return r;
}

MultiSeries MultiSeries::div_x(int j, double drop_tol) const {
    MultiSeries r(x_order_, y_order_);
    r.valid_x_ = std::max(0, valid_x_ - j);
    for (const auto& [idx, c] : coeffs_) {
        if (idx.m < j) {
            if (std::abs(c) <= drop_tol) continue;
            throw division_error("div_x: series not divisible by x^" + std::to_string(j));
        }
        r.set({idx.m - j, idx.n1, idx.n2}, c);
    }
    return r;
}

MultiSeries MultiSeries::div_y(int which, double drop_tol) const {
    MultiSeries r(x_order_, y_order_);
    r.valid_x_ = valid_x_;
    for (const auto& [idx, c] : coeffs_) {
        int n1 = idx.n1 - (which == 1 ? 1 : 0);
        int n2 = idx.n2 - (which == 2 ? 1 : 0);
        if (n1 < 0 || n2 < 0) {
            if (std::abs(c) <= drop_tol) continue;
            throw division_error("div_y: series not divisible by y" + std::to_string(which));
        }
        r.set({idx.m, n1, n2}, c);
    }
    return r;
}

MultiSeries MultiSeries::slice_x(int m) const {
    MultiSeries r(x_order_, y_order_);
    r.valid_x_ = valid_x_;
    for (const auto& [idx, c] : coeffs_)
        if (idx.m == m) r.set({0, idx.n1, idx.n2}, c);
    return r;
}

MultiSeries MultiSeries::drop_below_x(int m) const {
    MultiSeries r(x_order_, y_order_);
    r.valid_x_ = valid_x_;
    for (const auto& [idx, c] : coeffs_)
        if (idx.m >= m) r.set(idx, c);
    return r;
}

MultiSeries MultiSeries::truncated(int x_order, int y_order) const {
    MultiSeries r(x_order, y_order);
    r.valid_x_ = std::min(valid_x_, x_order);
    for (const auto& [idx, c] : coeffs_) r.set(idx, c);
    return r;
}

cplx MultiSeries::eval(cplx x, cplx y1, cplx y2) const {
    // powers table, then a straight sum; series are small
    std::vector<cplx> xp(static_cast<std::size_t>(x_order_) + 1, cplx(1.0, 0.0));
    std::vector<cplx> y1p(static_cast<std::size_t>(y_order_) + 1, cplx(1.0, 0.0));
    std::vector<cplx> y2p(static_cast<std::size_t>(y_order_) + 1, cplx(1.0, 0.0));
    for (std::size_t k = 1; k < xp.size(); ++k) xp[k] = xp[k - 1] * x;
    for (std::size_t k = 1; k < y1p.size(); ++k) y1p[k] = y1p[k - 1] * y1;
    for (std::size_t k = 1; k < y2p.size(); ++k) y2p[k] = y2p[k - 1] * y2;
    cplx s{};
    for (const auto& [idx, c] : coeffs_)
        s += c * xp[static_cast<std::size_t>(idx.m)] * y1p[static_cast<std::size_t>(idx.n1)] *
             y2p[static_cast<std::size_t>(idx.n2)];
    return s;
}

double MultiSeries::max_abs() const {
    double m = 0.0;
    for (const auto& [idx, c] : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double MultiSeries::max_abs_below_x(int mx) const {
    double m = 0.0;
    for (const auto& [idx, c] : coeffs_)
        if (idx.m < mx) m = std::max(m, std::abs(c));
    return m;
}

MultiSeries compose_fibered(const MultiSeries& f, const MultiSeries& g1, const MultiSeries& g2) {
    if (!f.same_orders(g1) || !f.same_orders(g2))
        throw order_mismatch_error("compose_fibered: mixed truncation orders");
    if (std::abs(g1.coeff(0, 0, 0)) > coeff_eps || std::abs(g2.coeff(0, 0, 0)) > coeff_eps)
        throw substitution_error("compose_fibered: substituted series has a constant term");

    const int K = f.x_order(), D = f.y_order();
    int vx = std::min({f.valid_x(), g1.valid_x(), g2.valid_x()});

    // powers of g1 and g2 up to total y-degree D
    std::vector<MultiSeries> p1(static_cast<std::size_t>(D) + 1, MultiSeries(K, D));
    std::vector<MultiSeries> p2(static_cast<std::size_t>(D) + 1, MultiSeries(K, D));
    p1[0] = MultiSeries::constant(1.0, K, D);
    p2[0] = MultiSeries::constant(1.0, K, D);
    for (int k = 1; k <= D; ++k) {
        p1[static_cast<std::size_t>(k)] = p1[static_cast<std::size_t>(k - 1)] * g1;
        p2[static_cast<std::size_t>(k)] = p2[static_cast<std::size_t>(k - 1)] * g2;
    }

    MultiSeries r(K, D);
    for (const auto& [idx, c] : f.terms()) {
        MultiSeries term = p1[static_cast<std::size_t>(idx.n1)] * p2[static_cast<std::size_t>(idx.n2)];
        for (const auto& [jdx, cc] : term.terms())
            r.add({jdx.m + idx.m, jdx.n1, jdx.n2}, c * cc);
    }
    r.set_valid_x(vx);
    return r;
}

MultiSeries exp_series(const MultiSeries& f) {
    if (std::abs(f.coeff(0, 0, 0)) > coeff_eps)
        throw substitution_error("exp_series: nonzero constant term");
    const int K = f.x_order(), D = f.y_order();
    MultiSeries r = MultiSeries::constant(1.0, K, D);
    MultiSeries pw = MultiSeries::constant(1.0, K, D);
    double fact = 1.0;
    // f has no constant term, so f^k dies after max(K, D)+1 powers
    const int kmax = K + D + 1;
    for (int k = 1; k <= kmax; ++k) {
        pw = pw * f;
        if (pw.empty()) break;
        fact *= k;
        r += pw * cplx(1.0 / fact, 0.0);
    }
    r.set_valid_x(f.valid_x());
    return r;
}

MultiSeries recip_series(const MultiSeries& u) {
    cplx u0 = u.coeff(0, 0, 0);
    if (std::abs(u0) < coeff_eps)
        throw division_error("recip_series: not a unit");
    const int K = u.x_order(), D = u.y_order();
    MultiSeries w = u * (1.0 / u0) - MultiSeries::constant(1.0, K, D); // w(0)=0
    MultiSeries r = MultiSeries::constant(1.0, K, D);
    MultiSeries pw = MultiSeries::constant(1.0, K, D);
    const int kmax = K + D + 1;
    for (int k = 1; k <= kmax; ++k) {
        pw = pw * w;
        if (pw.empty()) break;
        r += pw * cplx((k % 2 == 0) ? 1.0 : -1.0, 0.0);
    }
    r = r * (1.0 / u0);
    r.set_valid_x(u.valid_x());
    return r;
}

std::pair<MultiSeries, MultiSeries> resonant_split(const MultiSeries& f) {
    MultiSeries res(f.x_order(), f.y_order()), nonres(f.x_order(), f.y_order());
    res.set_valid_x(f.valid_x());
    nonres.set_valid_x(f.valid_x());
    for (const auto& [idx, c] : f.terms())
        (idx.resonant() ? res : nonres).set(idx, c);
    return {res, nonres};
}

MultiSeries lie_derivative(const PolyVectorField& V, const MultiSeries& f) {
    if (!V.comp_x.same_orders(f) || !V.comp_y1.same_orders(f) || !V.comp_y2.same_orders(f))
        throw order_mismatch_error("lie_derivative: mixed truncation orders");
    return V.comp_x * f.dx() + V.comp_y1 * f.dy1() + V.comp_y2 * f.dy2();
}

std::pair<MultiSeries, MultiSeries> exp_flow_map(const MultiSeries& tau, int w1, int w2) {
    if (std::abs(tau.coeff(0, 0, 0)) > coeff_eps)
        throw flow_time_error("exp_flow_map: flow time has a constant term");
    const int K = tau.x_order(), D = tau.y_order();
    MultiSeries e1 = exp_series(tau * cplx(w1, 0));
    MultiSeries e2 = exp_series(tau * cplx(w2, 0));
    MultiSeries y1 = MultiSeries::monomial({0, 1, 0}, 1.0, K, D);
    MultiSeries y2 = MultiSeries::monomial({0, 0, 1}, 1.0, K, D);
    return {y1 * e1, y2 * e2};
}

// ---------------------------------------------------------------------------

UniSeries::UniSeries(std::vector<cplx> c, int order) : order_(order), c_(std::move(c)) {
    c_.resize(static_cast<std::size_t>(order_), cplx{});
}

void UniSeries::set(int k, cplx v) {
    if (k < 0 || k >= order_) return;
    c_[static_cast<std::size_t>(k)] = std::abs(v) < coeff_eps ? cplx{} : v;
}

UniSeries UniSeries::operator+(const UniSeries& o) const {
    if (order_ != o.order_) throw order_mismatch_error("UniSeries add: mixed orders");
    UniSeries r(order_);
    for (int k = 0; k < order_; ++k) r.set(k, coeff(k) + o.coeff(k));
    return r;
}

UniSeries UniSeries::operator-(const UniSeries& o) const {
    if (order_ != o.order_) throw order_mismatch_error("UniSeries sub: mixed orders");
    UniSeries r(order_);
    for (int k = 0; k < order_; ++k) r.set(k, coeff(k) - o.coeff(k));
    return r;
}

UniSeries UniSeries::operator*(const UniSeries& o) const {
    if (order_ != o.order_) throw order_mismatch_error("UniSeries mul: mixed orders");
    UniSeries r(order_);
    for (int i = 0; i < order_; ++i) {
        if (coeff(i) == cplx{}) continue;
        for (int j = 0; i + j < order_; ++j) r.set(i + j, r.coeff(i + j) + coeff(i) * o.coeff(j));
    }
    return r;
}

UniSeries UniSeries::operator*(cplx s) const {
    UniSeries r(order_);
    for (int k = 0; k < order_; ++k) r.set(k, coeff(k) * s);
    return r;
}

UniSeries UniSeries::deriv() const {
    UniSeries r(order_);
    for (int k = 1; k < order_; ++k) r.set(k - 1, coeff(k) * cplx(k, 0));
    return r;
}

UniSeries UniSeries::antideriv() const {
    UniSeries r(order_);
    for (int k = 0; k + 1 < order_; ++k) r.set(k + 1, coeff(k) / cplx(k + 1, 0));
    return r;
}

UniSeries UniSeries::div_x(int j) const {
    UniSeries r(order_);
    for (int k = 0; k < order_; ++k) {
        if (k < j && std::abs(coeff(k)) > coeff_eps)
            throw division_error("UniSeries div_x: not divisible");
        if (k >= j) r.set(k - j, coeff(k));
    }
    return r;
}

UniSeries UniSeries::mul_x(int j) const {
    UniSeries r(order_);
    for (int k = 0; k + j < order_; ++k) r.set(k + j, coeff(k));
    return r;
}

cplx UniSeries::eval(cplx x) const {
    cplx s{};
    for (int k = order_ - 1; k >= 0; --k) s = s * x + coeff(k);
    return s;
}

double UniSeries::max_abs() const {
    double m = 0.0;
    for (const auto& c : c_) m = std::max(m, std::abs(c));
    return m;
}

UniSeries exp_series(const UniSeries& f) {
    if (std::abs(f.coeff(0)) > coeff_eps)
        throw substitution_error("exp_series: nonzero constant term");
    UniSeries r(f.order());
    r.set(0, 1.0);
    UniSeries pw = r;
    double fact = 1.0;
    for (int k = 1; k < f.order(); ++k) {
        pw = pw * f;
        fact *= k;
        r = r + pw * cplx(1.0 / fact, 0.0);
    }
    return r;
}

UniSeries recip_series(const UniSeries& u) {
    cplx u0 = u.coeff(0);
    if (std::abs(u0) < coeff_eps) throw division_error("UniSeries recip: not a unit");
    UniSeries w = u * (1.0 / u0);
    w.set(0, 0.0);
    UniSeries r(u.order());
    r.set(0, 1.0);
    UniSeries pw = r;
    for (int k = 1; k < u.order(); ++k) {
        pw = pw * w;
        r = r + pw * cplx((k % 2 == 0) ? 1.0 : -1.0, 0.0);
    }
    return r * (1.0 / u0);
}

MultiSeries to_multi_x(const UniSeries& f, int x_order, int y_order) {
    MultiSeries r(x_order, y_order);
    for (int k = 0; k < f.order(); ++k) r.set({k, 0, 0}, f.coeff(k));
    return r;
}

MultiSeries to_multi_v(const UniSeries& f, int x_order, int y_order) {
    MultiSeries r(x_order, y_order);
    for (int k = 0; k < f.order(); ++k) r.set({0, k, k}, f.coeff(k));
    return r;
}

UniSeries x_part(const MultiSeries& f) {
    UniSeries r(f.x_order());
    for (const auto& [idx, c] : f.terms()) {
        if (idx.n1 != 0 || idx.n2 != 0)
            throw division_error("x_part: series depends on y");
        r.set(idx.m, c);
    }
    return r;
}

UniSeries v_part(const MultiSeries& f) {
    UniSeries r(f.y_order() / 2 + 1);
    for (const auto& [idx, c] : f.terms()) {
        if (idx.m != 0 || idx.n1 != idx.n2)
            throw division_error("v_part: series is not a function of v = y1*y2");
        r.set(idx.n1, c);
    }
    return r;
}

} // namespace drsn
