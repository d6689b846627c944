#include "nlt/scenario.hpp"

#include <stdexcept>

namespace nlt {

void Scenario::validate() const {
  rho0.validate();
  omega0.validate();
  if (!(b > a)) throw std::invalid_argument("scenario: need b > a");
  if (!(eta > 0.0)) throw std::invalid_argument("scenario: eta must be positive");
  if (!(b > a + eta)) throw std::invalid_argument("scenario: need b > a + eta");
  if (kernel.eta != eta) throw std::invalid_argument("scenario: kernel eta mismatch");
  if (rho0.a() != a || rho0.b() != b)
    throw std::invalid_argument("scenario: rho0 must cover [a, b]");
  if (omega0.a() != a || omega0.b() != b)
    throw std::invalid_argument("scenario: omega0 must cover [a, b]");
  for (double v : rho0.vals)
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("scenario: rho0 outside [0, 1]");
  for (double w : omega0.vals)
    if (!(w > 0.0)) throw std::invalid_argument("scenario: omega0 must be positive");
  if (!(vbar > 0.0) || !(vbar <= omega0.min_value()))
    throw std::invalid_argument("scenario: need 0 < vbar <= min omega0");
  if (!(t_end > 0.0)) throw std::invalid_argument("scenario: t_end must be positive");
  if (n_cars < 2) throw std::invalid_argument("scenario: need at least two cars");
  if (!(dx > 0.0)) throw std::invalid_argument("scenario: dx must be positive");
  for (double t : output_times)
    if (t < 0.0 || t > t_end) throw std::invalid_argument("scenario: output time outside [0, t_end]");
}

bool same_physics(Scenario const& lhs, Scenario const& rhs) {
  return lhs.a == rhs.a && lhs.b == rhs.b && lhs.eta == rhs.eta &&
         lhs.kernel.family == rhs.kernel.family && lhs.kernel.eta == rhs.kernel.eta &&
         lhs.velocity.family == rhs.velocity.family && lhs.vbar == rhs.vbar &&
         lhs.rho0.xs == rhs.rho0.xs && lhs.rho0.vals == rhs.rho0.vals &&
         lhs.omega0.xs == rhs.omega0.xs && lhs.omega0.vals == rhs.omega0.vals;
}

}  // namespace nlt
