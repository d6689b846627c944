#pragma once

#include <span>
#include <vector>

namespace nlt {

// Piecewise-constant profile on [xs.front(), xs.back()]: vals[m] holds on
// [xs[m], xs[m+1]); the right endpoint belongs to the last piece.  Evaluates
// to 0 outside the support.
struct PiecewiseConstant {
  std::vector<double> xs;
  std::vector<double> vals;

  void validate() const;
  double a() const { return xs.front(); }
  double b() const { return xs.back(); }
  double value_at(double x) const;
  double integral(double lo, double hi) const;
  double total_mass() const { return integral(a(), b()); }
  double min_value() const;
  double max_value() const;
};

PiecewiseConstant make_profile(std::span<double const> breakpoints, std::span<double const> values);

// Exact integral of the product p1 * p2 over [lo, hi] (clipped to the
// intersection of both supports).
double integral_product(PiecewiseConstant const& p1, PiecewiseConstant const& p2, double lo,
                        double hi);

}  // namespace nlt
