#pragma once

// Sparse truncated formal power series in one independent variable x and two
// dependent variables (y1, y2), over complex double coefficients.  Truncation
// keeps x-powers m < x_order and total y-degrees n1+n2 <= y_order.  All values
// are immutable after construction in practice: operations return fresh
// series, so sharing across threads is safe.

#include "drsn/types.hpp"

#include <compare>
#include <map>
#include <utility>
#include <vector>

namespace drsn {

struct MultiIndex {
    int m = 0;  // power of x
    int n1 = 0; // power of y1
    int n2 = 0; // power of y2

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    int ydeg() const { return n1 + n2; }
    bool resonant() const { return n1 == n2; }
};

class MultiSeries {
  public:
    MultiSeries() = default;
    MultiSeries(int x_order, int y_order);

    static MultiSeries constant(cplx c, int x_order, int y_order);
    static MultiSeries monomial(MultiIndex idx, cplx c, int x_order, int y_order);

    int x_order() const { return x_order_; }
    int y_order() const { return y_order_; }

    // Coefficients with x-power below valid_x are exact; operations that lose
    // information at the x-truncation boundary lower it.
    int valid_x() const { return valid_x_; }
    void set_valid_x(int v) { valid_x_ = v < 0 ? 0 : (v > x_order_ ? x_order_ : v); }

    const std::map<MultiIndex, cplx>& terms() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }
    std::size_t size() const { return coeffs_.size(); }

    cplx coeff(MultiIndex idx) const;
    cplx coeff(int m, int n1, int n2) const { return coeff({m, n1, n2}); }
    void set(MultiIndex idx, cplx c);
    void add(MultiIndex idx, cplx c);

    MultiSeries operator+(const MultiSeries& o) const;
    MultiSeries operator-(const MultiSeries& o) const;
    MultiSeries operator*(const MultiSeries& o) const;
    MultiSeries operator*(cplx s) const;
    MultiSeries operator-() const;
    MultiSeries& operator+=(const MultiSeries& o) { return *this = *this + o; }
    MultiSeries& operator-=(const MultiSeries& o) { return *this = *this - o; }

    MultiSeries dx() const;
    MultiSeries dy1() const;
    MultiSeries dy2() const;

    MultiSeries mul_x(int j) const;          // multiply by x^j
    // division by x^j; offending coefficients below drop_tol are discarded,
    // anything larger throws division_error
    MultiSeries div_x(int j, double drop_tol = 0.0) const;
    // divide by y1 (which=1) or y2 (which=2); offending coefficients below
    // drop_tol are discarded instead of raising
    MultiSeries div_y(int which, double drop_tol = 0.0) const;

    // least x-power that may carry a nonzero coefficient (stored support and
    // the unknown region beyond valid_x)
    int min_x() const;

    MultiSeries slice_x(int m) const;        // x^m-coefficient, as a y-only series (m=0 entries)
    MultiSeries restrict_x0() const { return slice_x(0); }
    MultiSeries drop_below_x(int m) const;   // keep terms with x-power >= m

    // explicit re-truncation (never applied silently by arithmetic)
    MultiSeries truncated(int x_order, int y_order) const;

    cplx eval(cplx x, cplx y1, cplx y2) const;

    double max_abs() const;
    double max_abs_below_x(int m) const;
    bool same_orders(const MultiSeries& o) const {
        return x_order_ == o.x_order_ && y_order_ == o.y_order_;
    }

  private:
    void require_same_orders(const MultiSeries& o, const char* op) const;
    int x_order_ = 0;
    int y_order_ = 0;
    int valid_x_ = 0;
    std::map<MultiIndex, cplx> coeffs_;
};

inline MultiSeries operator*(cplx s, const MultiSeries& f) { return f * s; }

// Substitution f(x, g1(x,y), g2(x,y)); g1, g2 must have no constant term.
MultiSeries compose_fibered(const MultiSeries& f, const MultiSeries& g1, const MultiSeries& g2);

// exp(f) for f with zero constant term; 1/u for a unit u.
MultiSeries exp_series(const MultiSeries& f);
MultiSeries recip_series(const MultiSeries& u);

// res part keeps exactly the monomials with n1 == n2.
std::pair<MultiSeries, MultiSeries> resonant_split(const MultiSeries& f);

struct PolyVectorField {
    MultiSeries comp_x, comp_y1, comp_y2;
};

MultiSeries lie_derivative(const PolyVectorField& V, const MultiSeries& f);

// Components (y1 exp(w1 tau), y2 exp(w2 tau)) of the formal flow of
// w1 y1 d/dy1 + w2 y2 d/dy2 at time tau; tau must have no constant term.
// Weights (1,1) give the radial flow, (-1,1) the tangential one.
std::pair<MultiSeries, MultiSeries> exp_flow_map(const MultiSeries& tau, int w1, int w2);

// ---------------------------------------------------------------------------
// Univariate truncated series (in x, or in the resonant monomial v = y1 y2).

class UniSeries {
  public:
    UniSeries() = default;
    explicit UniSeries(int order) : order_(order), c_(static_cast<std::size_t>(order), cplx{}) {}
    UniSeries(std::vector<cplx> c, int order);

    int order() const { return order_; }
    cplx coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : cplx{};
    }
    void set(int k, cplx v);
    const std::vector<cplx>& coeffs() const { return c_; }

    UniSeries operator+(const UniSeries& o) const;
    UniSeries operator-(const UniSeries& o) const;
    UniSeries operator*(const UniSeries& o) const;
    UniSeries operator*(cplx s) const;

    UniSeries deriv() const;
    UniSeries antideriv() const; // no constant term
    UniSeries div_x(int j) const;
    UniSeries mul_x(int j) const;

    cplx eval(cplx x) const;
    double max_abs() const;

  private:
    int order_ = 0;
    std::vector<cplx> c_;
};

UniSeries exp_series(const UniSeries& f);    // f(0) = 0
UniSeries recip_series(const UniSeries& u);  // u(0) != 0

// x-only and v-only embeddings into MultiSeries
MultiSeries to_multi_x(const UniSeries& f, int x_order, int y_order);
MultiSeries to_multi_v(const UniSeries& f, int x_order, int y_order); // f(y1*y2)
UniSeries x_part(const MultiSeries& f);      // requires a pure-x series
UniSeries v_part(const MultiSeries& f);      // requires a pure resonant x^0 series

} // namespace drsn
