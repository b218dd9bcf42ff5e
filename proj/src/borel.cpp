#include "drsn/borel.hpp"

#include <algorithm>
#include <cmath>

namespace drsn {

namespace {

// Gauss-Legendre 16-point nodes/weights on [-1, 1]
constexpr int gl_n = 16;
constexpr double gl_x[gl_n] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double gl_w[gl_n] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <class F>
cplx gl_panel(F&& f, double a, double b) {
    cplx s{};
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < gl_n; ++i) s += gl_w[i] * f(mid + half * gl_x[i]);
    return s * half;
}

// roots of a complex polynomial (ascending coefficients) by Durand-Kerner
std::vector<cplx> poly_roots(std::vector<cplx> c) {
    while (!c.empty() && std::abs(c.back()) < 1e-300) c.pop_back();
    if (c.size() < 2) return {};
    int n = static_cast<int>(c.size()) - 1;
    for (auto& v : c) v /= c.back();
    std::vector<cplx> r(static_cast<std::size_t>(n));
    cplx seed(0.4, 0.9);
    cplx p(1.0, 0.0);
    for (int i = 0; i < n; ++i, p *= seed) r[static_cast<std::size_t>(i)] = p;
    for (int it = 0; it < 300; ++it) {
        double move = 0;
        for (int i = 0; i < n; ++i) {
            cplx num = c[static_cast<std::size_t>(n)];
            for (int k = n - 1; k >= 0; --k)
                num = num * r[static_cast<std::size_t>(i)] + c[static_cast<std::size_t>(k)];
            cplx den(1.0, 0.0);
            for (int j = 0; j < n; ++j)
                if (j != i) den *= r[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(j)];
            if (std::abs(den) < 1e-300) den = 1e-300;
            cplx d = num / den;
            r[static_cast<std::size_t>(i)] -= d;
            move = std::max(move, std::abs(d));
        }
        if (move < 1e-13) break;
    }
    return r;
}

// small dense complex solve with partial pivoting
bool solve_linear(std::vector<std::vector<cplx>>& A, std::vector<cplx>& b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::abs(A[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
                piv = r;
        if (std::abs(A[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]) < 1e-13)
            return false;
        std::swap(A[static_cast<std::size_t>(piv)], A[static_cast<std::size_t>(col)]);
        std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
        for (int r = col + 1; r < n; ++r) {
            cplx f = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] /
                     A[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
            if (f == cplx{}) continue;
            for (int cc = col; cc < n; ++cc)
                A[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
                    f * A[static_cast<std::size_t>(col)][static_cast<std::size_t>(cc)];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        cplx s = b[static_cast<std::size_t>(r)];
        for (int cc = r + 1; cc < n; ++cc)
            s -= A[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] *
                 b[static_cast<std::size_t>(cc)];
        b[static_cast<std::size_t>(r)] = s / A[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
    }
    return true;
}

} // namespace

cplx PadeApproximant::eval(cplx t) const {
    auto horner = [](const std::vector<cplx>& c, cplx z) {
        cplx s{};
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
        return s;
    };
    return horner(num, t) / horner(den, t);
}

double PadeApproximant::distance_to_pole(cplx t) const {
    double d = 1e300;
    for (const auto& p : poles) d = std::min(d, std::abs(t - p));
    return d;
}

cplx BorelSeries::eval_taylor(cplx t) const {
    cplx s{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * t + *it;
    return s;
}

cplx BorelSeries::eval(cplx t) const { return pade ? pade->eval(t) : eval_taylor(t); }

BorelSeries borel(const UniSeries& f, BorelKind kind) {
    BorelSeries g;
    g.kind = kind;
    const int K = f.order();
    if (kind == BorelKind::B) {
        g.coeffs.resize(static_cast<std::size_t>(K));
        double fact = 1.0;
        for (int k = 0; k < K; ++k) {
            if (k > 0) fact *= k;
            g.coeffs[static_cast<std::size_t>(k)] = f.coeff(k) / fact;
        }
    } else {
        g.constant_term = f.coeff(0);
        if (K > 1) g.coeffs.resize(static_cast<std::size_t>(K - 1));
        double fact = 1.0;
        for (int k = 0; k + 1 < K; ++k) {
            if (k > 0) fact *= k;
            g.coeffs[static_cast<std::size_t>(k)] = f.coeff(k + 1) / fact;
        }
    }
    return g;
}

BorelSeries convolve(const BorelSeries& g, const BorelSeries& h) {
    if (g.kind != BorelKind::B_bis || h.kind != BorelKind::B_bis)
        throw kind_error("convolve: both operands must be B_bis transforms");
    // (g*h)(t) = int_0^t g(s) h(t-s) ds; Taylor coefficients
    // c_{i+j+1} += g_i h_j i! j! / (i+j+1)!
    const int n = static_cast<int>(std::max(g.coeffs.size(), h.coeffs.size()));
    BorelSeries r;
    r.kind = BorelKind::B_bis;
    r.coeffs.assign(static_cast<std::size_t>(n), cplx{});
    std::vector<double> fact(static_cast<std::size_t>(2 * n + 2), 1.0);
    for (std::size_t k = 1; k < fact.size(); ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
    for (std::size_t i = 0; i < g.coeffs.size(); ++i)
        for (std::size_t j = 0; j < h.coeffs.size(); ++j) {
            std::size_t k = i + j + 1;
            if (k >= r.coeffs.size()) continue;
            r.coeffs[k] += g.coeffs[i] * h.coeffs[j] * fact[i] * fact[j] / fact[k];
        }
    return r;
}

PadeApproximant pade_continue(BorelSeries& g, int p, int q) {
    const int have = static_cast<int>(g.coeffs.size());
    for (; p >= 0 && q >= 0; --p, --q) {
        if (p + q + 1 > have)
            throw insufficient_data_error("pade_continue: not enough coefficients");
        auto c = [&](int k) {
            return (k >= 0 && k < have) ? g.coeffs[static_cast<std::size_t>(k)] : cplx{};
        };
        PadeApproximant r;
        r.p = p;
        r.q = q;
        r.den.assign(static_cast<std::size_t>(q) + 1, cplx{});
        r.den[0] = 1.0;
        bool ok = true;
        if (q > 0) {
            // sum_{j=0..q} den_j c_{p+i-j} = 0, i = 1..q
            std::vector<std::vector<cplx>> A(static_cast<std::size_t>(q),
                                             std::vector<cplx>(static_cast<std::size_t>(q)));
            std::vector<cplx> rhs(static_cast<std::size_t>(q));
            for (int i = 1; i <= q; ++i) {
                for (int j = 1; j <= q; ++j)
                    A[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] =
                        c(p + i - j);
                rhs[static_cast<std::size_t>(i - 1)] = -c(p + i);
            }
            ok = solve_linear(A, rhs);
            if (ok)
                for (int j = 1; j <= q; ++j)
                    r.den[static_cast<std::size_t>(j)] = rhs[static_cast<std::size_t>(j - 1)];
        }
        if (!ok) continue; // degenerate system: fall back to (p-1, q-1)
        r.num.assign(static_cast<std::size_t>(p) + 1, cplx{});
        for (int k = 0; k <= p; ++k) {
            cplx s{};
            for (int j = 0; j <= std::min(k, q); ++j)
                s += r.den[static_cast<std::size_t>(j)] * c(k - j);
            r.num[static_cast<std::size_t>(k)] = s;
        }
        r.poles = poly_roots(r.den);
        g.pade = r;
        return r;
    }
    throw continuation_error("pade_continue: no nondegenerate approximant found");
}

namespace {

double norm_weight(double beta, double t, NormKind kind) {
    double w = std::exp(-beta * t);
    if (kind == NormKind::bis) w *= 1.0 + beta * beta * t * t;
    return w;
}

} // namespace

NormResult weighted_norm(const UniSeries& f, const WeightedNormParams& params, NormKind kind) {
    BorelSeries g = borel(f, kind == NormKind::bis ? BorelKind::B_bis : BorelKind::B);
    if (f.order() >= 8 && !g.pade) {
        // diagonal-leaning continuation; polynomial data stays exact
        int half = static_cast<int>(g.coeffs.size() - 1) / 2;
        int tail = 0;
        for (std::size_t k = 0; k < g.coeffs.size(); ++k)
            if (std::abs(g.coeffs[k]) > 0) tail = static_cast<int>(k);
        if (tail + 1 < static_cast<int>(g.coeffs.size()) / 2) {
            // effectively a polynomial: keep exact Taylor evaluation
        } else if (half >= 1) {
            try {
                pade_continue(g, half, half);
            } catch (const error&) {
                // keep Taylor evaluation as truncation proxy
            }
        }
    }

    const double beta = params.lambda_weight;
    const Direction& dir = params.direction;
    NormResult best;

    auto consider = [&](cplx t) {
        if (g.pade && g.pade->distance_to_pole(t) < 1e-3)
            throw continuation_error("weighted_norm: Pade pole inside the sampled domain");
        double val = std::abs(g.eval(t)) * norm_weight(beta, std::abs(t), kind);
        if (val > best.value) {
            best.value = val;
            best.arg_t = t;
        }
    };

    consider(cplx{});
    // disc of radius rho
    for (int i = 1; i <= params.disc_radial; ++i) {
        double rr = dir.rho * i / params.disc_radial;
        for (int a = 0; a < params.disc_angular; ++a) {
            double ang = 2.0 * M_PI * a / params.disc_angular;
            consider(std::polar(rr, ang));
        }
    }
    // rays: edges and bisector of the sector, marched until the weighted
    // value stays negligible
    for (double off : {-dir.delta / 2, -dir.delta / 4, 0.0, dir.delta / 4, dir.delta / 2}) {
        double ang = dir.theta + off;
        double t0 = dir.rho / 8;
        double growth = std::pow(1e4, 1.0 / params.ray_samples);
        int quiet = 0;
        double t = t0;
        for (int i = 0; i < 8 * params.ray_samples && quiet < 24; ++i, t *= growth) {
            cplx tt = std::polar(t, ang);
            if (g.pade && g.pade->distance_to_pole(tt) < 1e-3)
                throw continuation_error("weighted_norm: Pade pole inside the sampled domain");
            double val = std::abs(g.eval(tt)) * norm_weight(beta, t, kind);
            if (val > best.value) {
                best.value = val;
                best.arg_t = tt;
            }
            quiet = (val < 1e-12 * std::max(best.value, 1e-300)) ? quiet + 1 : 0;
        }
    }
    return best;
}

cplx laplace_sum(const BorelSeries& g, double theta, cplx x, cplx constant_term,
                 const LaplaceOptions& opts) {
    const cplx diru = std::polar(1.0, theta);
    const double kappa = (diru / x).real(); // decay rate of e^{-t/x} on the ray
    if (kappa <= 0) throw divergent_integral_error("laplace_sum: Re(e^{i theta}/x) <= 0");

    // growth estimate of |g| along the ray; rational continuations are
    // polynomially bounded, raw Taylor data is only trusted as a polynomial
    if (g.pade) {
        // only poles within the effective integration range matter; beyond
        // s_max the e^{-t/x} damping is already below tolerance
        const double s_max = (std::log(1.0 / opts.tol) + 5.0) / kappa;
        for (const auto& pole : g.pade->poles) {
            double s = std::max(0.0, (pole * std::conj(diru)).real());
            if (s > s_max) continue;
            double dist = std::abs(pole - s * diru);
            if (dist < opts.pole_guard * std::max(1.0, s))
                throw direction_blocked_error("laplace_sum: ray passes near a Borel-plane pole");
        }
    }

    auto f = [&](double s) { return g.eval(s * diru) * std::exp(-s * cplx(kappa, (diru / x).imag())); };
    // integrate in s with geometric panels until both the panel increment and
    // the analytic tail bound fall below tol
    double h = std::min(0.25 / kappa, 0.5);
    double a = 0.0;
    cplx total{};
    int panels = 0;
    double gmax = std::abs(g.eval(cplx{}));
    while (panels < opts.max_panels) {
        cplx piece = gl_panel(f, a, a + h);
        cplx refine = gl_panel(f, a, a + 0.5 * h) + gl_panel(f, a + 0.5 * h, a + h);
        if (std::abs(piece - refine) > opts.tol * 0.1) {
            h *= 0.5;
            continue;
        }
        total += refine;
        a += h;
        ++panels;
        h *= 1.5;
        // tail bound with a lookahead margin for polynomially growing g
        gmax = std::max({std::abs(g.eval(a * diru)), std::abs(g.eval(2.0 * a * diru)),
                         std::abs(g.eval(4.0 * a * diru))});
        double tail = 2.0 * gmax * std::exp(-kappa * a) / kappa;
        if (tail < opts.tol) return constant_term + total;
    }
    throw budget_error("laplace_sum: panel budget exhausted before the tail bound");
}

UniSeries solve_irregular_ode(const UniSeries& b, cplx k, cplx alpha) {
    if (std::abs(k) < coeff_eps) throw singular_operator_error("solve_irregular_ode: k = 0");
    UniSeries a(b.order());
    cplx prev{};
    for (int m = 0; m < b.order(); ++m) {
        cplx am = (b.coeff(m) - (alpha * k + cplx(m - 1, 0)) * prev) / k;
        if (m == 0) am = b.coeff(0) / k;
        a.set(m, am);
        prev = am;
    }
    return a;
}

cplx irregular_borel_closed_form(const BorelSeries& bt_b, cplx k, cplx alpha, cplx t) {
    // Transforming x^2 a' + (1+alpha x) k a = b termwise gives
    //   (t+k) Bt(a) + alpha k (a_0 + int_0^t Bt(a)) = Bt(b),
    // so the effective right-hand side carries -alpha b_0 from the constant
    // a_0 = b_0 / k before the textbook resolvent formula applies.
    const cplx ak = alpha * k;
    const cplx shift = alpha * bt_b.constant_term;
    auto beff = [&](cplx s) { return bt_b.eval(s) - shift; };
    auto f = [&](double s) {
        cplx ts = t * s;
        return beff(ts) * std::pow(ts + k, ak - 1.0) * t;
    };
    cplx integral{};
    int n = 64;
    for (int i = 0; i < n; ++i)
        integral += gl_panel(f, static_cast<double>(i) / n, static_cast<double>(i + 1) / n);
    return beff(t) / (t + k) - ak * std::pow(t + k, -1.0 - ak) * integral;
}

UniSeries solve_regular_ode(const UniSeries& b, cplx k) {
    if (k.real() <= 0) throw resonance_error("solve_regular_ode: Re(k) <= 0");
    UniSeries a(b.order());
    for (int j = 0; j < b.order(); ++j) {
        cplx den = cplx(j, 0) + k;
        if (std::abs(den) < coeff_eps) throw resonance_error("solve_regular_ode: k + j = 0");
        a.set(j, b.coeff(j) / den);
    }
    return a;
}

GevreyReport gevrey_estimate(const UniSeries& f) {
    // normalized magnitudes r_k = |f_k| / k!
    std::vector<std::pair<int, double>> pts;
    double fact = 1.0;
    for (int kk = 0; kk < f.order(); ++kk) {
        if (kk > 0) fact *= kk;
        double m = std::abs(f.coeff(kk));
        if (m > 0) pts.emplace_back(kk, m / fact);
    }
    if (pts.empty()) return GevreyReport{GrowthClass::convergent, 0.0, 0.0};
    if (pts.size() < 8)
        throw insufficient_data_error("gevrey_estimate: need at least 8 nonzero coefficients");

    // least squares of log r_k against k: slope = log C, intercept = log A
    double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [kk, r] : pts) {
        double X = kk, Y = std::log(r);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;

    GevreyReport rep;
    rep.C = std::exp(slope);
    rep.A = std::exp(intercept);
    // trend of the normalized ratios rho_k = r_{k+1}/r_k on the tail:
    // Gevrey-1 data has rho_k -> C > 0 (log-log slope ~ 0), a convergent
    // series of radius R has rho_k ~ 1/(R k) (slope ~ -1)
    std::vector<std::pair<double, double>> ratios;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (pts[i + 1].first == pts[i].first + 1 && pts[i].second > 0)
            ratios.emplace_back(std::log(static_cast<double>(pts[i].first + 1)),
                                std::log(pts[i + 1].second / pts[i].second));
    std::size_t tail = std::max<std::size_t>(6, ratios.size() / 2);
    if (ratios.size() > tail) ratios.erase(ratios.begin(), ratios.end() - static_cast<long>(tail));
    double rn = 0, rsx = 0, rsy = 0, rsxx = 0, rsxy = 0;
    for (auto& [X, Y] : ratios) {
        rn += 1;
        rsx += X;
        rsy += Y;
        rsxx += X * X;
        rsxy += X * Y;
    }
    double ratio_slope = rn >= 3 ? (rn * rsxy - rsx * rsy) / (rn * rsxx - rsx * rsx) : -1.0;
    rep.cls = ratio_slope > -0.5 ? GrowthClass::gevrey1 : GrowthClass::convergent;
    return rep;
}

} // namespace drsn
