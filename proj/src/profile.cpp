#include "nlt/profile.hpp"

#include <algorithm>
#include <stdexcept>

namespace nlt {

void PiecewiseConstant::validate() const {
  if (xs.size() < 2) throw std::invalid_argument("profile: need at least one piece");
  if (vals.size() + 1 != xs.size())
    throw std::invalid_argument("profile: breakpoint/value count mismatch");
  for (std::size_t m = 1; m < xs.size(); ++m)
    if (!(xs[m] > xs[m - 1])) throw std::invalid_argument("profile: breakpoints not increasing");
}

double PiecewiseConstant::value_at(double x) const {
  if (x < xs.front() || x > xs.back()) return 0.0;
  if (x == xs.back()) return vals.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  return vals[static_cast<std::size_t>(it - xs.begin()) - 1];
}

double PiecewiseConstant::integral(double lo, double hi) const {
  lo = std::max(lo, xs.front());
  hi = std::min(hi, xs.back());
  if (!(hi > lo)) return 0.0;
  double sum = 0.0;
  for (std::size_t m = 0; m < vals.size(); ++m) {
    double const l = std::max(lo, xs[m]);
    double const r = std::min(hi, xs[m + 1]);
    if (r > l) sum += vals[m] * (r - l);
  }
  return sum;
}

double PiecewiseConstant::min_value() const {
  return *std::min_element(vals.begin(), vals.end());
}

double PiecewiseConstant::max_value() const {
  return *std::max_element(vals.begin(), vals.end());
}

PiecewiseConstant make_profile(std::span<double const> breakpoints,
                               std::span<double const> values) {
  PiecewiseConstant p;
  p.xs.assign(breakpoints.begin(), breakpoints.end());
  p.vals.assign(values.begin(), values.end());
  p.validate();
  return p;
}

double integral_product(PiecewiseConstant const& p1, PiecewiseConstant const& p2, double lo,
                        double hi) {
  lo = std::max({lo, p1.xs.front(), p2.xs.front()});
  hi = std::min({hi, p1.xs.back(), p2.xs.back()});
  if (!(hi > lo)) return 0.0;
  // merge breakpoints inside [lo, hi]
  std::vector<double> cuts{lo};
  for (double x : p1.xs)
    if (x > lo && x < hi) cuts.push_back(x);
  for (double x : p2.xs)
    if (x > lo && x < hi) cuts.push_back(x);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t m = 1; m < cuts.size(); ++m) {
    double const l = cuts[m - 1], r = cuts[m];
    if (!(r > l)) continue;
    double const mid = 0.5 * (l + r);
    sum += p1.value_at(mid) * p2.value_at(mid) * (r - l);
  }
  return sum;
}

}  // namespace nlt
