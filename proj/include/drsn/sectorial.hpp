#pragma once

// Sectorial analytic normalization: stable-domain geometry, integration of
// the rescaled Cauchy problem along asymptotic paths, homological path
// integrals, and the sectorial maps built from them.  Internally lambda is
// rotated to 1 (work in u = x / lambda); the rotation is recorded in the
// geometry and inverted on output.

#include "drsn/normal_form.hpp"
#include "drsn/saddle_node.hpp"
#include "drsn/series.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace drsn {

using PointEval = std::function<cplx(cplx x, cplx y1, cplx y2)>;

// Field data of the Cauchy problem: Z = Y0 + C Cvec + x R1 Rvec, with C and
// R1 evaluated at original-x arguments and dominated by |y|.
struct SectorialField {
    cplx lambda{1.0, 0.0};
    cplx a1{}, a2{};
    PointEval C;  // tangential perturbation
    PointEval R1; // radial perturbation divided by x

    cplx a() const { return a1 + a2; }
    cplx b() const { return (a2 - a1) / 2.0; }

    static SectorialField from_prepared(const SaddleNodeField& prep);
};

struct SectorGeometry {
    int sign = +1; // +1: sector bisected by arg(i lambda); -1: by arg(-i lambda)
    cplx lambda{1.0, 0.0};
    cplx a{};               // a1 + a2, Re > 0
    double r = 0.05;        // x-radius in the rotated plane
    double r_y = 0.05;      // y-polydisc radius
    double r_prime = 0, r_y_prime = 0;
    double epsilon = 0.4;   // opening excess, in (0, arccos(mu))
    double omega = 0, omega_prime = 0, mu = 0, delta = 0, delta_prime = 0;

    double wing_rate_x() const { return (1 + delta) / (mu - delta); }
    double wing_rate_y() const { return (std::abs(a) / 2 + delta_prime) / (mu - delta); }

    // checks every admissibility inequality; throws geometry_error
    void validate() const;
};

// Midpoint parameter selection with a sampled re-check of the smallness
// conditions on the field; r shrinks geometrically until they hold.
SectorGeometry make_geometry(const SectorialField& field, int sign, double epsilon = 0.4,
                             double r_init = 0.1);

struct Membership {
    bool in_sigma = false;
    bool in_theta_plus = false;
    bool in_theta_minus = false;
    bool in_omega = false;
};

Membership domain_membership(const std::array<cplx, 3>& p, const SectorGeometry& geom);

struct Trajectory {
    std::vector<double> times;
    std::vector<std::array<cplx, 3>> states; // (x, y1, y2), original coordinates
    std::vector<Membership> flags;
    bool reached_sigma = false;
    double sigma_entry_time = -1;
};

struct FlowOptions {
    double t_end = 1e9;
    double x_min = 1e-8;     // stop once |x/lambda| falls below
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    std::size_t max_steps = 400000;
    bool check_domain = true; // domain exit raises stability_violation_error
    bool record = true;
};

Trajectory integrate_flow(const SectorialField& field, const std::array<cplx, 3>& x0,
                          const SectorGeometry& geom, const FlowOptions& opts = {});

// t0 <= exp(((1+delta)/(mu-delta)) (epsilon + arcsin omega)) / ((1+delta)|x0/lambda|)
double critical_time_bound(cplx x0, const SectorGeometry& geom);

struct PathIntegralOptions {
    double tol = 1e-9;
    double rel_tol = 1e-10;
    std::size_t max_steps = 400000;
};

// alpha(x0) = - int over the asymptotic path of x^{M+1} A dx / x^2, the
// sectorial solution of L_Z(alpha) = x^{M+1} A.
cplx homological_path_integral(const PointEval& A, int M, const SectorialField& field,
                               const std::array<cplx, 3>& x0, const SectorGeometry& geom,
                               const PathIntegralOptions& opts = {});

struct SectorialMap {
    std::string kind; // "radial", "tangential", "composed"
    int M = 0;
    int w1 = 1, w2 = 1;            // exponents: (y1 e^{w1 alpha}, y2 e^{w2 alpha})
    std::function<cplx(cplx, cplx, cplx)> alpha;
    std::vector<const SectorialMap*> parts; // for composed maps

    std::array<cplx, 3> apply(const std::array<cplx, 3>& p) const;
    std::array<cplx, 3> apply_inverse(const std::array<cplx, 3>& p) const;
};

struct SectorialMaps {
    SectorialMap phi;      // radial, rho = alpha(A = -R^{(N+2)}, M = N+1)
    SectorialMap psi;      // tangential, chi = alpha(A = -C^{(N+1)}, M = N)
    SectorialMap composed; // psi o phi
    SectorGeometry geom;
    double sup_rho = 0, sup_chi = 0; // sampled smallness data
};

// Builds the sectorial normalizing pair for a field prepared at order N+2.
// The injectivity criterion exp(2 sup |f|) <= 5/4 is checked on samples;
// violation raises shrink_domain_error with a suggested radius.
SectorialMaps build_sectorial_maps(const SaddleNodeField& Y_prep_N2, int N,
                                   const SectorGeometry& geom);

struct FlatnessFit {
    double A = 0, B = 0;
    bool conclusive = false;
    std::vector<std::pair<double, double>> samples; // (|x|, sup difference)
};

// Fits |Phi_+ o Phi_-^{-1} - Id| <= A exp(-B/|x|) on the overlap; reports an
// inconclusive fit when the difference sits at the noise floor.
FlatnessFit transition_flatness(const SectorialMaps& plus, const SectorialMaps& minus,
                                const std::vector<double>& x_radii, double y_sample_radius);

// deterministic sample points inside Omega for property suites
std::vector<std::array<cplx, 3>> sample_omega_points(const SectorGeometry& geom, int n,
                                                     std::uint64_t seed);

} // namespace drsn
