#include "drsn/sectorial.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace drsn {

namespace {

// angle of u normalized to (-pi/2, 3pi/2], reflected for the '-' sector so
// that the '+' formulas apply verbatim
double sector_angle(cplx u, int sign) {
    double th = std::arg(u);
    if (sign < 0) th = -th;
    if (th <= -M_PI / 2) th += 2 * M_PI;
    return th;
}

struct FlowRhs {
    const SectorialField& f;
    int sign;

    // state in the rotated plane: (u, y1, y2)
    std::array<cplx, 3> operator()(const std::array<cplx, 3>& s) const {
        const cplx u = s[0], y1 = s[1], y2 = s[2];
        const cplx x = f.lambda * u;
        const cplx C = f.C(x, y1, y2) / f.lambda;
        const cplx R1 = f.R1(x, y1, y2);
        const cplx denom = 1.0 + f.b() * u + C;
        const cplx iu = cplx(0, sign);
        return {iu * u * u / denom, iu * y1 * (-(1.0 + C) + f.a1 * u + u * R1) / denom,
                iu * y2 * ((1.0 + C) + f.a2 * u + u * R1) / denom};
    }
};

// Dormand-Prince 5(4) embedded pair on complex states of size N
template <std::size_t N, class Rhs>
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    using State = std::array<cplx, N>;

    static State axpy(const State& a, const std::vector<std::pair<double, const State*>>& terms,
                      double h) {
        State r = a;
        for (auto& [w, k] : terms)
            for (std::size_t i = 0; i < N; ++i) r[i] += h * w * (*k)[i];
        return r;
    }

    // one attempted step; returns (error norm, new state)
    static std::pair<double, State> step(const Rhs& rhs, const State& y, double h, State& k1,
                                         bool have_k1, double rel, double abs_tol) {
        if (!have_k1) k1 = rhs(y);
        State k2 = rhs(axpy(y, {{1.0 / 5, &k1}}, h));
        State k3 = rhs(axpy(y, {{3.0 / 40, &k1}, {9.0 / 40, &k2}}, h));
        State k4 = rhs(axpy(y, {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}, h));
        State k5 = rhs(axpy(
            y, {{19372.0 / 6561, &k1}, {-25360.0 / 2187, &k2}, {64448.0 / 6561, &k3}, {-212.0 / 729, &k4}},
            h));
        State k6 = rhs(axpy(y,
                            {{9017.0 / 3168, &k1},
                             {-355.0 / 33, &k2},
                             {46732.0 / 5247, &k3},
                             {49.0 / 176, &k4},
                             {-5103.0 / 18656, &k5}},
                            h));
        State y5 = axpy(y,
                        {{35.0 / 384, &k1},
                         {500.0 / 1113, &k3},
                         {125.0 / 192, &k4},
                         {-2187.0 / 6784, &k5},
                         {11.0 / 84, &k6}},
                        h);
        State k7 = rhs(y5);
        State y4 = axpy(y,
                        {{5179.0 / 57600, &k1},
                         {7571.0 / 16695, &k3},
                         {393.0 / 640, &k4},
                         {-92097.0 / 339200, &k5},
                         {187.0 / 2100, &k6},
                         {1.0 / 40, &k7}},
                        h);
        double err = 0;
        for (std::size_t i = 0; i < N; ++i) {
            double sc = abs_tol + rel * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
        }
        k1 = k7; // FSAL
        return {err, y5};
    }
};

} // namespace

SectorialField SectorialField::from_prepared(const SaddleNodeField& prep) {
    PreparedSplit sp = split_prepared(prep);
    MultiSeries r1 = sp.radial.div_x(1, 1e-8);
    SectorialField f;
    f.lambda = prep.lambda;
    f.a1 = prep.a1;
    f.a2 = prep.a2;
    f.C = [t = sp.tangential](cplx x, cplx y1, cplx y2) { return t.eval(x, y1, y2); };
    f.R1 = [t = r1](cplx x, cplx y1, cplx y2) { return t.eval(x, y1, y2); };
    return f;
}

void SectorGeometry::validate() const {
    if (!(a.real() > 0)) throw geometry_error("geometry: Re(a1+a2) must be positive");
    const double wmax = a.real() / std::abs(a);
    if (!(omega_prime > 0 && omega_prime < wmax))
        throw geometry_error("geometry: omega' outside (0, Re(a)/|a|)");
    const double lo = std::cos(std::acos(omega_prime) - std::abs(std::arg(a)));
    if (!(omega > lo && omega < 1)) throw geometry_error("geometry: omega outside admissible range");
    if (!(mu > 0 && mu < std::sqrt(1 - omega * omega)))
        throw geometry_error("geometry: mu outside (0, sqrt(1-omega^2))");
    if (!(delta > 0 && delta < std::min(omega, mu)))
        throw geometry_error("geometry: delta outside (0, min(omega, mu))");
    if (!(delta_prime > 0 && delta_prime < omega_prime))
        throw geometry_error("geometry: delta' outside (0, omega')");
    if (!(epsilon > 0 && epsilon < std::acos(mu)))
        throw geometry_error("geometry: epsilon outside (0, arccos(mu))");
    if (!(r > 0 && r_y > 0)) throw geometry_error("geometry: radii must be positive");
}

SectorGeometry make_geometry(const SectorialField& field, int sign, double epsilon, double r_init) {
    SectorGeometry g;
    g.sign = sign;
    g.lambda = field.lambda;
    g.a = field.a();
    if (!(g.a.real() > 0)) throw geometry_error("make_geometry: field is not strictly non-degenerate");

    g.omega_prime = 0.5 * g.a.real() / std::abs(g.a);
    double lo = std::cos(std::acos(g.omega_prime) - std::abs(std::arg(g.a)));
    g.omega = 0.5 * (lo + 1.0);
    g.mu = 0.5 * std::sqrt(1.0 - g.omega * g.omega);
    g.delta = 0.5 * std::min(g.omega, g.mu);
    g.delta_prime = 0.5 * g.omega_prime;
    g.epsilon = std::min(epsilon, 0.9 * std::acos(g.mu));
    g.r = r_init;
    g.r_y = r_init;

    // shrink until the two smallness conditions hold on a sample of the
    // sector (the paper only requires existence of such r)
    const cplx b = field.b();
    const cplx ah = field.a() / 2.0;
    for (int shrink = 0; shrink < 60; ++shrink) {
        bool ok = true;
        for (int ia = 0; ia <= 8 && ok; ++ia) {
            double th = -g.epsilon + (M_PI + 2 * g.epsilon) * ia / 8.0;
            if (sign < 0) th = -th;
            for (double rr : {g.r, g.r / 3, g.r / 10}) {
                cplx u = std::polar(rr, th);
                cplx x = field.lambda * u;
                for (double yr : {g.r_y, g.r_y / 2}) {
                    for (int q = 0; q < 4 && ok; ++q) {
                        cplx y1 = std::polar(yr, 0.3 + 1.7 * q);
                        cplx y2 = std::polar(yr, 1.1 + 1.3 * q);
                        cplx C = field.C(x, y1, y2) / field.lambda;
                        cplx R1 = field.R1(x, y1, y2);
                        cplx denom = 1.0 + b * u + C;
                        if (std::abs(1.0 / denom - 1.0) >= g.delta ||
                            std::abs((ah + R1) / denom - ah) >= g.delta_prime)
                            ok = false;
                    }
                }
            }
        }
        if (ok) break;
        g.r *= 0.7;
        g.r_y *= 0.7;
        if (shrink == 59) throw geometry_error("make_geometry: smallness conditions unattainable");
    }

    g.r_prime = g.r * std::exp(-g.wing_rate_x() * (g.epsilon + std::asin(g.omega)));
    g.r_y_prime = g.r_y * std::exp(-g.wing_rate_y() * (g.epsilon + std::asin(g.omega)));
    g.validate();
    return g;
}

Membership domain_membership(const std::array<cplx, 3>& p, const SectorGeometry& geom) {
    Membership m;
    const cplx u = p[0] / geom.lambda;
    const double au = std::abs(u);
    if (au <= 0) return m;
    const double th = sector_angle(u, geom.sign);
    const double sth = std::sin(th), cth = std::cos(th);

    m.in_sigma = au < geom.r && sth > geom.omega;
    m.in_theta_plus = au < geom.r && cth > geom.mu;
    m.in_theta_minus = au < geom.r && cth < -geom.mu;

    const double asw = std::asin(geom.omega);
    if (!(th > -geom.epsilon && th < M_PI + geom.epsilon) || au >= geom.r) return m;

    double slack = 0; // angular distance past the Sigma edge, 0 inside Sigma
    if (th < asw)
        slack = asw - th;
    else if (th > M_PI - asw)
        slack = th - (M_PI - asw);
    const double bx = geom.r * std::exp(-geom.wing_rate_x() * slack);
    const double by = geom.r_y * std::exp(-geom.wing_rate_y() * slack);
    m.in_omega = au < bx && std::abs(p[1]) < by && std::abs(p[2]) < by;
    return m;
}

Trajectory integrate_flow(const SectorialField& field, const std::array<cplx, 3>& x0,
                          const SectorGeometry& geom, const FlowOptions& opts) {
    FlowRhs rhs{field, geom.sign};
    using Stepper = Dopri5<3, FlowRhs>;
    std::array<cplx, 3> s{x0[0] / field.lambda, x0[1], x0[2]};

    Trajectory traj;
    auto record = [&](double t, const std::array<cplx, 3>& st) {
        std::array<cplx, 3> orig{field.lambda * st[0], st[1], st[2]};
        Membership m = domain_membership(orig, geom);
        if (opts.check_domain && !m.in_omega)
            throw stability_violation_error("integrate_flow: state left Omega at t = " +
                                            std::to_string(t));
        if (m.in_sigma && !traj.reached_sigma) {
            traj.reached_sigma = true;
            traj.sigma_entry_time = t;
        }
        if (opts.record) {
            traj.times.push_back(t);
            traj.states.push_back(orig);
            traj.flags.push_back(m);
        }
    };

    double t = 0;
    record(0.0, s);
    double h = 0.1 / std::max(1e-8, std::abs(s[0]));
    std::array<cplx, 3> k1{};
    bool have_k1 = false;
    for (std::size_t n = 0; n < opts.max_steps; ++n) {
        if (t >= opts.t_end || std::abs(s[0]) < opts.x_min) return traj;
        h = std::min(h, opts.t_end - t);
        auto [err, next] = Stepper::step(rhs, s, h, k1, have_k1, opts.rel_tol, opts.abs_tol);
        if (err <= 1.0) {
            t += h;
            s = next;
            have_k1 = true;
            record(t, s);
        } else {
            have_k1 = false;
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < 1e-14 * std::max(1.0, t))
            throw stiffness_error("integrate_flow: step size underflow");
    }
    return traj;
}

double critical_time_bound(cplx x0, const SectorGeometry& geom) {
    const double au = std::abs(x0 / geom.lambda);
    return std::exp(geom.wing_rate_x() * (geom.epsilon + std::asin(geom.omega))) /
           ((1 + geom.delta) * au);
}

cplx homological_path_integral(const PointEval& A, int M, const SectorialField& field,
                               const std::array<cplx, 3>& x0, const SectorGeometry& geom,
                               const PathIntegralOptions& opts) {
    // augmented state (u, y1, y2, I) with dI/dt = x^{M+1} A s i / (lambda denom)
    struct Rhs {
        const SectorialField& f;
        const PointEval& A;
        int sign, M;
        std::array<cplx, 4> operator()(const std::array<cplx, 4>& s) const {
            FlowRhs base{f, sign};
            std::array<cplx, 3> d3 = base({s[0], s[1], s[2]});
            const cplx x = f.lambda * s[0];
            const cplx C = f.C(x, s[1], s[2]) / f.lambda;
            const cplx denom = 1.0 + f.b() * s[0] + C;
            cplx xp = std::pow(x, M + 1);
            cplx dI = xp * A(x, s[1], s[2]) * cplx(0, sign) / (f.lambda * denom);
            return {d3[0], d3[1], d3[2], dI};
        }
    };
    Rhs rhs{field, A, geom.sign, M};
    using Stepper = Dopri5<4, Rhs>;

    std::array<cplx, 4> s{x0[0] / field.lambda, x0[1], x0[2], cplx{}};
    if (!domain_membership(x0, geom).in_omega)
        throw stability_violation_error("homological_path_integral: base point outside Omega");

    double t = 0;
    double h = 0.1 / std::max(1e-8, std::abs(s[0]));
    std::array<cplx, 4> k1{};
    bool have_k1 = false;
    double sigma_entry = -1, u_sigma = 0;
    for (std::size_t n = 0; n < opts.max_steps; ++n) {
        auto [err, next] = Stepper::step(rhs, s, h, k1, have_k1, opts.rel_tol, 1e-14);
        if (err <= 1.0) {
            t += h;
            s = next;
            have_k1 = true;
            std::array<cplx, 3> orig{field.lambda * s[0], s[1], s[2]};
            Membership m = domain_membership(orig, geom);
            if (sigma_entry < 0 && m.in_sigma) {
                sigma_entry = t;
                u_sigma = std::abs(s[0]);
            }
            if (sigma_entry >= 0) {
                // tail bound from the |x| ~ 1/t decay past the Sigma entry
                double rate = (geom.omega - geom.delta) * u_sigma;
                double base = 1 + rate * (t - sigma_entry);
                std::array<cplx, 4> d = rhs(s);
                double cprime = std::abs(d[3]) * std::pow(base, M + 1);
                double tail = cprime / (std::max(M, 1) * rate * std::pow(base, M));
                if (tail < opts.tol) return -s[3];
            }
        } else {
            have_k1 = false;
        }
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        if (h < 1e-14 * std::max(1.0, t))
            throw stiffness_error("homological_path_integral: step size underflow");
    }
    throw budget_error("homological_path_integral: tail tolerance not reached in budget");
}

std::array<cplx, 3> SectorialMap::apply(const std::array<cplx, 3>& p) const {
    if (!parts.empty()) {
        std::array<cplx, 3> q = p;
        for (const auto* m : parts) q = m->apply(q);
        return q;
    }
    cplx al = alpha(p[0], p[1], p[2]);
    return {p[0], p[1] * std::exp(cplx(w1, 0) * al), p[2] * std::exp(cplx(w2, 0) * al)};
}

std::array<cplx, 3> SectorialMap::apply_inverse(const std::array<cplx, 3>& p) const {
    if (!parts.empty()) {
        std::array<cplx, 3> q = p;
        for (auto it = parts.rbegin(); it != parts.rend(); ++it) q = (*it)->apply_inverse(q);
        return q;
    }
    std::array<cplx, 3> y = p;
    for (int it = 0; it < 80; ++it) {
        cplx al = alpha(p[0], y[1], y[2]);
        std::array<cplx, 3> next{p[0], p[1] * std::exp(cplx(-w1, 0) * al),
                                 p[2] * std::exp(cplx(-w2, 0) * al)};
        double move = std::abs(next[1] - y[1]) + std::abs(next[2] - y[2]);
        y = next;
        if (move < 1e-15) break;
    }
    return y;
}

SectorialMaps build_sectorial_maps(const SaddleNodeField& Y_prep_N2, int N,
                                   const SectorGeometry& geom) {
    const int prep_order = N + 2;
    PreparedSplit sp = split_prepared(Y_prep_N2);
    SectorialField base = SectorialField::from_prepared(Y_prep_N2);

    // radial remainder R^{(N+2)} = radial / x^{N+2}
    MultiSeries rN2 = sp.radial.div_x(prep_order, 1e-7);
    auto A_rho = [series = rN2](cplx x, cplx y1, cplx y2) { return -series.eval(x, y1, y2); };

    SectorialMaps out;
    out.geom = geom;
    out.phi.kind = "radial";
    out.phi.M = N + 1;
    out.phi.w1 = out.phi.w2 = 1;
    out.phi.alpha = [A_rho, base, geom, M = N + 1](cplx x, cplx y1, cplx y2) {
        return homological_path_integral(A_rho, M, base, {x, y1, y2}, geom);
    };

    // tangential data of the pushed field: C_phi(x, z) = D(phi^{-1}(x, z));
    // pointwise inversion of z = y e^{rho}
    auto phi_alpha = out.phi.alpha;
    auto inv_phi = [phi_alpha](cplx x, cplx z1, cplx z2) {
        cplx y1 = z1, y2 = z2;
        for (int it = 0; it < 80; ++it) {
            cplx rho = phi_alpha(x, y1, y2);
            cplx n1 = z1 * std::exp(-rho), n2 = z2 * std::exp(-rho);
            double move = std::abs(n1 - y1) + std::abs(n2 - y2);
            y1 = n1;
            y2 = n2;
            if (move < 1e-15) break;
        }
        return std::array<cplx, 2>{y1, y2};
    };

    auto [c_res, c_non] = resonant_split(sp.tangential.restrict_x0());
    MultiSeries cfun_res = c_res; // c(v)
    MultiSeries tang = sp.tangential;
    auto A_chi = [tang, cfun_res, inv_phi, prep = prep_order - 1](cplx x, cplx z1, cplx z2) {
        auto y = inv_phi(x, z1, z2);
        cplx Cphi = tang.eval(x, y[0], y[1]);
        cplx cv = cfun_res.eval(x, z1, z2);
        return -(Cphi - cv) / std::pow(x, prep); // -C^{(N+1)}
    };

    // flow field of the psi stage: tangential C_phi, no radial part
    SectorialField mid = base;
    mid.C = [tang, inv_phi](cplx x, cplx z1, cplx z2) {
        auto y = inv_phi(x, z1, z2);
        return tang.eval(x, y[0], y[1]);
    };
    mid.R1 = [](cplx, cplx, cplx) { return cplx{}; };

    out.psi.kind = "tangential";
    out.psi.M = N;
    out.psi.w1 = -1;
    out.psi.w2 = 1;
    out.psi.alpha = [A_chi, mid, geom, M = N](cplx x, cplx y1, cplx y2) {
        return homological_path_integral(A_chi, M, mid, {x, y1, y2}, geom);
    };

    // sampled injectivity criterion from the sectorial-diffeomorphism lemma
    auto points = sample_omega_points(geom, 24, 20240u + static_cast<unsigned>(geom.sign > 0));
    for (const auto& p : points) {
        out.sup_rho = std::max(out.sup_rho, std::abs(out.phi.alpha(p[0], p[1], p[2])));
        out.sup_chi = std::max(out.sup_chi, std::abs(out.psi.alpha(p[0], p[1], p[2])));
    }
    double worst = std::max(out.sup_rho, out.sup_chi);
    if (std::exp(2 * worst) > 1.25)
        throw shrink_domain_error("build_sectorial_maps: smallness criterion violated; retry with r <= " +
                                  std::to_string(geom.r * 0.5));

    out.composed.kind = "composed";
    out.composed.M = N;
    out.composed.parts = {&out.phi, &out.psi};
    return out;
}

FlatnessFit transition_flatness(const SectorialMaps& plus, const SectorialMaps& minus,
                                const std::vector<double>& x_radii, double y_sample_radius) {
    FlatnessFit fit;
    SectorialMap comp_plus = plus.composed;
    comp_plus.parts = {&plus.phi, &plus.psi};
    SectorialMap comp_minus = minus.composed;
    comp_minus.parts = {&minus.phi, &minus.psi};

    for (double rx : x_radii) {
        cplx x = plus.geom.lambda * rx; // overlap wing along arg(u) = 0
        double diff = 0;
        for (int q = 0; q < 4; ++q) {
            cplx y1 = std::polar(y_sample_radius, 0.4 + 1.5 * q);
            cplx y2 = std::polar(y_sample_radius, 1.2 + 1.1 * q);
            auto z = comp_minus.apply_inverse({x, y1, y2});
            auto w = comp_plus.apply(z);
            diff = std::max({diff, std::abs(w[1] - y1), std::abs(w[2] - y2)});
        }
        fit.samples.emplace_back(std::abs(x), diff);
    }

    // log diff = log A - B / |x|
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [ax, d] : fit.samples) {
        if (d < 1e-14) continue;
        double X = 1.0 / ax, Y = std::log(d);
        n += 1;
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
    }
    if (n >= 3) {
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double inter = (sy - slope * sx) / n;
        fit.B = -slope;
        fit.A = std::exp(inter);
        fit.conclusive = fit.B > 0;
    }
    return fit;
}

std::vector<std::array<cplx, 3>> sample_omega_points(const SectorGeometry& geom, int n,
                                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::array<cplx, 3>> pts;
    while (static_cast<int>(pts.size()) < n) {
        double th = -geom.epsilon + (M_PI + 2 * geom.epsilon) * unif(rng);
        double ru = geom.r_prime * (0.15 + 0.8 * unif(rng));
        double sgn_th = geom.sign < 0 ? -th : th;
        cplx u = std::polar(ru, sgn_th);
        double ry = geom.r_y_prime * (0.1 + 0.6 * unif(rng));
        std::array<cplx, 3> p{geom.lambda * u, std::polar(ry, 6.28 * unif(rng)),
                              std::polar(ry, 6.28 * unif(rng))};
        if (domain_membership(p, geom).in_omega) pts.push_back(p);
    }
    return pts;
}

} // namespace drsn
