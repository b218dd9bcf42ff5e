#pragma once

// Borel-Laplace machinery: the two Borel transforms, convolution, weighted
// norms over directional domains, Pade continuation, directional Laplace
// sums, and the two scalar singular-ODE solvers used throughout the
// normalization.

#include "drsn/series.hpp"

#include <optional>
#include <vector>

namespace drsn {

enum class BorelKind { B, B_bis };

struct PadeApproximant {
    std::vector<cplx> num, den; // den[0] = 1
    std::vector<cplx> poles;
    int p = 0, q = 0;
    cplx eval(cplx t) const;
    double distance_to_pole(cplx t) const;
};

struct BorelSeries {
    std::vector<cplx> coeffs;
    BorelKind kind = BorelKind::B;
    cplx constant_term{}; // carried separately for B_bis re-addition
    std::optional<PadeApproximant> pade;

    cplx eval_taylor(cplx t) const;
    cplx eval(cplx t) const; // Pade when present, Taylor otherwise
};

struct Direction {
    double theta = 0;       // radians
    double delta = 0.5;     // sector opening, in (0, pi)
    double rho = 0.5;       // disc radius, > 0
};

struct WeightedNormParams {
    double lambda_weight = 1.0; // the beta of the norms
    Direction direction;
    int ray_samples = 160;      // per ray, log-spaced to the decay cutoff
    int disc_radial = 12;
    int disc_angular = 24;
};

enum class NormKind { plain, bis };

struct NormResult {
    double value = 0;
    cplx arg_t{}; // sample achieving the sup
};

BorelSeries borel(const UniSeries& f, BorelKind kind);

// Taylor-coefficient convolution int_0^t g(s) h(t-s) ds; both kind B_bis.
BorelSeries convolve(const BorelSeries& g, const BorelSeries& h);

// Diagonal-leaning Pade; on a singular linear system falls back to
// (p-1, q-1).  Stores the approximant in g and returns it.
PadeApproximant pade_continue(BorelSeries& g, int p, int q);

// Grid sup of |B(f)(t) w(t)| over Delta_{theta,delta,rho}; w = e^{-beta|t|}
// for plain, (1+beta^2|t|^2) e^{-beta|t|} for bis (which uses the shifted
// transform).  A documented lower bound on the true sup.  Throws
// continuation_error when a Pade pole falls inside the sampled domain.
NormResult weighted_norm(const UniSeries& f, const WeightedNormParams& params, NormKind kind);

struct LaplaceOptions {
    double tol = 1e-10;
    double pole_guard = 1e-3; // minimal pole distance to the ray
    int max_panels = 400;
};

// 1-sum: constant_term + int over e^{i theta} R+ of g(t) e^{-t/x} dt.
cplx laplace_sum(const BorelSeries& g, double theta, cplx x, cplx constant_term,
                 const LaplaceOptions& opts = {});

// Unique formal solution of x^2 a' + (1 + alpha x) k a = b with
// a(0) = b(0)/k.
UniSeries solve_irregular_ode(const UniSeries& b, cplx k, cplx alpha);

// Borel-plane closed form of the same solution,
//   Bt(a)(t) = Bt(b)(t)/(t+k) - alpha k (t+k)^{-1-alpha k}
//              int_0^t Bt(b)(s) (s+k)^{alpha k - 1} ds,
// evaluated by quadrature along [0, t]; cross-check oracle for the formal
// recursion.
cplx irregular_borel_closed_form(const BorelSeries& bt_b, cplx k, cplx alpha, cplx t);

// a_j = b_j / (j + k) for Re(k) > 0.
UniSeries solve_regular_ode(const UniSeries& b, cplx k);

enum class GrowthClass { convergent, gevrey1 };

struct GevreyReport {
    GrowthClass cls = GrowthClass::convergent;
    double A = 0, C = 0; // fitted |f_k| <= A C^k k!
};

GevreyReport gevrey_estimate(const UniSeries& f);

} // namespace drsn
