#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace drsn {

using cplx = std::complex<double>;

// Library-wide tolerances.  Coefficients below coeff_eps are dropped on
// storage; eq_tol is the default tolerance for coefficientwise equality
// after accumulated convolution error.
inline constexpr double coeff_eps = 1e-12;
inline constexpr double eq_tol = 1e-9;
inline constexpr double obstruction_eps = 1e-8;
inline constexpr double pipeline_eps = 1e-8;
inline constexpr double residue_eps = 1e-9;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// series_core
struct order_mismatch_error : error { using error::error; };
struct substitution_error : error { using error::error; };
struct flow_time_error : error { using error::error; };
struct division_error : error { using error::error; };

// saddle_node / formal_normalization
struct not_saddle_node_error : error { using error::error; };
struct not_div_integrable_error : error { using error::error; };
struct degenerate_residue_error : error { using error::error; };
struct internal_invariant_error : error { using error::error; };

// borel_laplace
struct kind_error : error { using error::error; };
struct continuation_error : error { using error::error; };
struct direction_blocked_error : error { using error::error; };
struct divergent_integral_error : error { using error::error; };
struct insufficient_data_error : error { using error::error; };
struct singular_operator_error : error { using error::error; };
struct resonance_error : error { using error::error; };

// sectorial
struct geometry_error : error { using error::error; };
struct stability_violation_error : error { using error::error; };
struct stiffness_error : error { using error::error; };
struct budget_error : error { using error::error; };
struct shrink_domain_error : error { using error::error; };

// painleve / io / cli
struct shape_error : error { using error::error; };
struct parse_error : error { using error::error; };
struct config_error : error { using error::error; };

} // namespace drsn
