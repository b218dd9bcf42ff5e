#pragma once

// The Painleve I worked example: the Boutroux-compactified field at the
// irregular singularity at infinity, its transversally Hamiltonian structure,
// and transversal symplecticity of normalizing maps.

#include "drsn/conjugacy.hpp"
#include "drsn/saddle_node.hpp"
#include "drsn/series.hpp"

#include <array>
#include <functional>
#include <vector>

namespace drsn {

struct TransverseStructure {
    std::string form_label = "dy1^dy2/x";
    double ideal_tolerance = 1e-8;
};

// zeta = i/sqrt(6), the translation constant of the compactification
cplx p1_translation_constant();

// x^2 d/dx + (-4/5 y2 + 2/5 x y1 + 2z/5 x) d/dy1
//          + (-24/5 y1^2 - 48z/5 y1 + 3/5 x y2) d/dy2
PolyVectorField p1_field(int x_order, int y_order);

// Applies the Boutroux chart z1 = y1 x^{-2/5}, z2 = y2 x^{-3/5}, t = x^{-4/5}
// and the translation y1 <- y1 + zeta to the (P_I) Hamiltonian field
// d/dt + z2 d/dz1 + (6 z1^2 + t) d/dz2 (slots: x=t, y1=z1, y2=z2); the
// x^{1/5} prefactor is handled on the exponent lattice, never stored.
// Output equals p1_field coefficientwise.
PolyVectorField boutroux_transform(const PolyVectorField& hamiltonian_field);

// the (P_I) field in the (t, z1, z2) slots, for feeding the transform
PolyVectorField p1_hamiltonian_field(int x_order, int y_order);

struct HamiltonianCheck {
    bool ok = false;
    MultiSeries certificate; // dy1^dy2 obstruction: d(b1)/dy1 + d(b2)/dy2 - x
};

// L_Y(dx) and L_Y(dy1^dy2/x) both in <dx>; for fibered saddle-node
// candidates this reduces to div_y(b1, b2) = x.
HamiltonianCheck check_transversally_hamiltonian(const PolyVectorField& Y,
                                                 const TransverseStructure& ts = {});

// det of the y-Jacobian equals 1 coefficientwise
bool check_transversally_symplectic(const ConjugacyMap& map, double tol = 1e-8);

// pointwise variant for sectorial maps: central-difference Jacobian at the
// sample points
bool check_transversally_symplectic_samples(
    const std::function<std::array<cplx, 3>(const std::array<cplx, 3>&)>& map,
    const std::vector<std::array<cplx, 3>>& points, double tol = 1e-8);

} // namespace drsn
