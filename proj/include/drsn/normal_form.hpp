#pragma once

// Formal normalization pipeline: center manifold, diagonalization of the
// affine part, scalar gauge, straightening of the two invariant
// hypersurfaces, and the order-N normalization by homological equations.
// The composed fibered change of coordinates conjugates a non-degenerate
// div-integrable saddle-node to
//   x^2 d/dx + (-l + a1 x + c1(v)) y1 d/dy1 + (l + a2 x + c2(v)) y2 d/dy2
// up to a remainder of x-order N.

#include "drsn/conjugacy.hpp"
#include "drsn/saddle_node.hpp"
#include "drsn/series.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace drsn {

struct NormalFormData {
    cplx lambda{}, a1{}, a2{};
    UniSeries c1, c2;  // series in v = y1 y2, no constant term
    UniSeries d_N;     // stabilized tangential resonant part
    double residual_max = 0;       // conjugacy defect below x-degree N
    double nonresonant_defect = 0; // non-resonant leakage in the c-slices
    double condition = 1;          // max denominator amplification in the
                                   // resonant recursions (near-resonance report)
    std::vector<std::pair<std::string, double>> stage_remainders;
};

struct StageResult {
    SaddleNodeField field;
    ConjugacyMap map;
    double remainder = 0; // structural defect the stage was meant to remove
};

struct CenterManifoldResult : StageResult {
    UniSeries yhat1, yhat2;
};

struct DiagonalizeResult : StageResult {
    UniSeries p1, p2;       // off-diagonal gauge series
    UniSeries a1hat, a2hat; // diagonal affine data before the scalar gauge
};

struct GaugeResult : StageResult {
    UniSeries q1, q2;
};

struct StraightenKey {
    int j;  // component, 1 or 2
    int n1, n2;
    friend auto operator<=>(const StraightenKey&, const StraightenKey&) = default;
};

struct StraighteningState {
    MultiSeries psi1, psi2; // edge monomials only (n1 = 0 or n2 = 0)
    MultiSeries T1, T2;     // mixed monomials only (n1 >= 1 and n2 >= 1)
    std::map<StraightenKey, UniSeries> delta_table;
    std::map<StraightenKey, UniSeries> zeta_cache;
};

struct StraightenResult : StageResult {
    StraighteningState state;
};

struct OrderNResult : StageResult {
    UniSeries d_N;
    double condition = 1;
};

// Resonant part of the order-k homological step: the unique solution of
//   v (a + 2 delta_{k,1} q(v)) w'(v) + (k-1) w(v) = -q(v),  w(0) = 0
// for the radial stage (the transport term drops for tangential data).
// condition, when given, accumulates the largest denominator amplification.
UniSeries resonant_homological_time(const UniSeries& q, cplx a, int k, bool radial,
                                    double* condition = nullptr);

CenterManifoldResult center_manifold(const SaddleNodeField& Y);
DiagonalizeResult diagonalize_linear_terms(const SaddleNodeField& Y1);
GaugeResult scalar_gauge(const SaddleNodeField& Y2);
StraightenResult straighten_hypersurfaces(const SaddleNodeField& Y3);
OrderNResult normalize_to_order(const SaddleNodeField& Y_prep, int N);

struct NormalizeOptions {
    int N = 2;
    const UniSeries* gamma_res = nullptr; // resonant freedom in the x=0 stage
};

struct NormalizeResult {
    NormalFormData data;
    ConjugacyMap map;
    SaddleNodeField Y_N;
};

// Full pipeline on a field already in diagonal drsn coordinates.  Requires
// y_order >= 2N and a non-degenerate residue.
NormalizeResult normalize(const SaddleNodeField& Y, const NormalizeOptions& opts);

// Assembled normal-form field from the data (for residual checks).
PolyVectorField normal_form_field(const NormalFormData& nf, int x_order, int y_order);

// Tangential/radial split of a prepared field: comp_yi = lin_i(x) y_i
// + (R -+ D) y_i with D the tangential and R the radial perturbation.
struct PreparedSplit {
    MultiSeries tangential; // D(x, y)
    MultiSeries radial;     // R(x, y)
};
PreparedSplit split_prepared(const SaddleNodeField& Y);

} // namespace drsn
