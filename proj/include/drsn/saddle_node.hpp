#pragma once

// Diagonal doubly-resonant saddle-nodes x^2 d/dx + (-lambda y1 + F1) d/dy1
// + (lambda y2 + F2) d/dy2: recognition, residue, degeneracy classification,
// and the normalization of the restriction to {x = 0}.

#include "drsn/conjugacy.hpp"
#include "drsn/series.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace drsn {

struct SaddleNodeField {
    PolyVectorField field;
    cplx lambda{};
    cplx a1{}, a2{};   // meaningful once the affine part is normalized
    cplx residue{};

    int x_order() const { return field.comp_x.x_order(); }
    int y_order() const { return field.comp_x.y_order(); }
};

// checks comp_x = x^2, vanishing at the origin, y-linear part diag(-l, l)
// at x = 0; throws not_saddle_node_error otherwise.  Pure-x terms of order
// O(x) in the components are accepted (the Painleve fields carry them).
SaddleNodeField make_saddle_node(PolyVectorField field, cplx lambda);

struct BasisFields {
    PolyVectorField C_basis; // -y1 d/dy1 + y2 d/dy2
    PolyVectorField R_basis; //  y1 d/dy1 + y2 d/dy2
    PolyVectorField Y0;      // lambda C + x(x d/dx + a1 y1 d/dy1 + a2 y2 d/dy2)
    static BasisFields make(cplx lambda, cplx a1, cplx a2, int x_order, int y_order);
};

cplx residue(const PolyVectorField& field);
inline cplx residue(const SaddleNodeField& Y) { return residue(Y.field); }

enum class Degeneracy { degenerate, non_degenerate, strictly_non_degenerate };

// strictly_non_degenerate iff Re(res) > 0; degenerate iff res is within
// residue_eps of some rational -p/q with q <= q_max (denominator-bound
// heuristic; exact membership is undecidable in floats).
Degeneracy classify(cplx res, int q_max = 64);
inline Degeneracy classify(const SaddleNodeField& Y, int q_max = 64) {
    return classify(residue(Y), q_max);
}

// Brings a field whose constant y-linear part has two opposite nonzero
// eigenvalues to diagonal drsn coordinates.  The eigenvector matrix is scaled
// to determinant one, so the change preserves dy1^dy2; the -lambda eigenvalue
// sits first, with arg(lambda) in (-pi/2, pi/2] as tie-break.
std::pair<SaddleNodeField, ConjugacyMap> diagonalize_constant_linear_part(const PolyVectorField& Y);

// y-only series pair (comp_y1, comp_y2) at x = 0.
std::pair<MultiSeries, MultiSeries> restrict_to_x0(const SaddleNodeField& Y);

struct OrbitalLinearization {
    MultiSeries gamma;   // non-resonant generator; map is (y1 e^{gamma}, y2 e^{-gamma})
    UniSeries d;         // unit becomes lambda + d(v)
    double residual = 0; // non-resonant defect of the pushed restriction
};

// Lemma-style solve of L_C(gamma) = U_nres / U for a restriction of the exact
// form (lambda + h(y)) C; gamma_res is the free resonant part of gamma (kept
// zero by default).  Throws not_div_integrable_error if the restriction is
// not proportional to the C basis within obstruction_eps.
OrbitalLinearization orbital_linearize_x0(const std::pair<MultiSeries, MultiSeries>& restriction,
                                          cplx lambda, const UniSeries* gamma_res = nullptr);

struct RestrictionNormalization {
    ConjugacyMap map;    // y-only, tangent to the identity
    UniSeries d;         // restriction becomes (lambda + d(v)) C
    double obstruction = 0;
    std::string route;   // "gamma" or "poincare_dulac"
};

// Degree-by-degree normalization of the restriction to (lambda + d(v)) C.
// Restrictions proportional to C go through orbital_linearize_x0; the rest
// are handled by eigen-corrections exp(W) per total degree, where W solves
// [lambda C, W] = (non-resonant defect).  Divergence-free defects get
// divergence-free corrections, so Hamiltonian restrictions are normalized by
// maps of unit Jacobian.  The symmetric resonant residue is the
// div-integrability obstruction.
RestrictionNormalization linearize_restriction(const std::pair<MultiSeries, MultiSeries>& restriction,
                                               cplx lambda, const UniSeries* gamma_res = nullptr);

// Deterministic generator for property suites: a strictly non-degenerate,
// div-integrable field built from a prepared core conjugated by random
// tangent-to-identity maps.
SaddleNodeField make_random_field(std::uint64_t seed, int x_order, int y_order);

} // namespace drsn
