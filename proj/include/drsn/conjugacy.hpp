#pragma once

// Fibered changes of coordinates (x, y) -> (x, phi1(x,y), phi2(x,y)) acting on
// vector fields by push-forward, plus the residual check of the conjugacy
// equation D(Phi) . Y = Y_target o Phi.

#include "drsn/series.hpp"

#include <string>
#include <vector>

namespace drsn {

struct ConjugacyMap {
    MultiSeries comp_y1, comp_y2;
    bool is_tangent_to_identity = false;
    std::vector<std::string> provenance;

    static ConjugacyMap identity(int x_order, int y_order);
    static ConjugacyMap from_components(MultiSeries y1, MultiSeries y2, std::string tag);

    int x_order() const { return comp_y1.x_order(); }
    int y_order() const { return comp_y1.y_order(); }

    // re-evaluate the tangency flag from the stored series:
    // comp_yi = yi + (total order >= 2)
    bool check_tangency() const;
};

// outer o inner; provenance concatenates inner-first.
ConjugacyMap compose(const ConjugacyMap& outer, const ConjugacyMap& inner);

// Inverse of a fibered map whose y-linear part at the origin is the identity;
// fixed-point iteration, exact within truncation.
ConjugacyMap invert(const ConjugacyMap& map);

// Phi_*(Y) = (D Phi . Y) o Phi^{-1}; the x-component of Y must be fibered-safe
// (result keeps comp_x = Y.comp_x, which holds for comp_x depending on x only).
PolyVectorField push_forward(const PolyVectorField& Y, const ConjugacyMap& map,
                             const ConjugacyMap* inverse_hint = nullptr);

// Componentwise residual D(Phi) . Y - Y_target o Phi.  The x-component is zero
// for fibered maps of fibered fields; the honest x-degree cutoff of the result
// is its valid_x().
PolyVectorField verify_conjugacy(const PolyVectorField& Y, const ConjugacyMap& map,
                                 const PolyVectorField& Y_target);

// Jacobian determinant in the y-variables, as a series.
MultiSeries y_jacobian_det(const ConjugacyMap& map);

} // namespace drsn
