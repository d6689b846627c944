#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>

namespace nlt {

enum class VelocityFamily { GreenshieldsProduct };

// v(rho, omega) = omega * (1 - rho): Greenshields law scaled by the
// per-driver marker omega (empty-road speed).  rho is a fraction of the jam
// density, so rho_max = 1 for every marker.
struct VelocityModel {
  VelocityFamily family = VelocityFamily::GreenshieldsProduct;

  double speed(double rho, double omega) const { return omega * (1.0 - rho); }

  double dspeed_drho(double /*rho*/, double omega) const { return -omega; }

  double rho_max(double /*omega*/) const { return 1.0; }

  // Supremum of d(v)/d(rho) over the admissible range and the given markers;
  // strictly negative for any admissible model.
  double vprime_max(std::span<double const> omegas) const {
    if (omegas.empty()) throw std::invalid_argument("vprime_max: empty marker list");
    double omega_min = std::numeric_limits<double>::infinity();
    for (double w : omegas) {
      if (!(w > 0.0)) throw std::domain_error("vprime_max: markers must be positive");
      omega_min = std::min(omega_min, w);
    }
    double const vp = -omega_min;
    if (!(vp < 0.0)) throw std::domain_error("vprime_max: result not strictly negative");
    return vp;
  }

  // Unique density with v(rho, omega) = vbar.
  double equilibrium_density(double vbar, double omega) const {
    if (!(vbar > 0.0) || !(vbar <= omega))
      throw std::domain_error("equilibrium_density: need 0 < vbar <= omega");
    return 1.0 - vbar / omega;
  }

  // Gap at which the discrete density ell / gap sits at equilibrium;
  // +infinity when the equilibrium density vanishes (vbar == omega).
  double equilibrium_gap(double vbar, double omega, double ell) const {
    if (!(ell > 0.0)) throw std::domain_error("equilibrium_gap: ell must be positive");
    double const rho_bar = equilibrium_density(vbar, omega);
    if (rho_bar == 0.0) return std::numeric_limits<double>::infinity();
    return ell / rho_bar;
  }
};

}  // namespace nlt
