#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nlt {

enum class KernelFamily {
  Constant,
  LinearVanishing,
  LinearPositive,
  ConcaveQuadratic,
  ConvexQuadratic,
};

// Look-ahead weight W_eta on [0, eta]: nonnegative, nonincreasing, unit mass.
// All integrals go through the closed-form antiderivative so that interval
// masses are exact and bit-reproducible.
struct Kernel {
  KernelFamily family = KernelFamily::Constant;
  double eta = 1.0;

  double eval(double x) const {
    if (x < 0.0 || x > eta) return 0.0;
    double const e = eta;
    switch (family) {
      case KernelFamily::Constant: return 1.0 / e;
      case KernelFamily::LinearVanishing: return 2.0 * (e - x) / (e * e);
      case KernelFamily::LinearPositive: return (3.0 * e - 2.0 * x) / (2.0 * e * e);
      case KernelFamily::ConcaveQuadratic: return 3.0 * (e * e - x * x) / (2.0 * e * e * e);
      case KernelFamily::ConvexQuadratic: return 3.0 * (e - x) * (e - x) / (e * e * e);
    }
    return 0.0;
  }

  // cdf(x) = integral of W_eta over [0, x], clamped to [0, 1].
  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= eta) return 1.0;
    double const e = eta;
    switch (family) {
      case KernelFamily::Constant: return x / e;
      case KernelFamily::LinearVanishing: return x * (2.0 * e - x) / (e * e);
      case KernelFamily::LinearPositive: return x * (3.0 * e - x) / (2.0 * e * e);
      case KernelFamily::ConcaveQuadratic: return x * (3.0 * e * e - x * x) / (2.0 * e * e * e);
      case KernelFamily::ConvexQuadratic: {
        double const r = e - x;
        return (e * e * e - r * r * r) / (e * e * e);
      }
    }
    return 0.0;
  }

  double mass(double a, double b) const {
    if (a > b) throw std::invalid_argument("Kernel::mass: invalid interval (a > b)");
    return cdf(b) - cdf(a);
  }

  bool is_concave() const { return family != KernelFamily::ConvexQuadratic; }
};

// Config names: "const", "lin", "lin2", "conc", "conv".
Kernel make_kernel(std::string_view name, double eta);
std::string_view kernel_name(KernelFamily family);

// Discrete weights gamma_{i,j} for follower i over gaps ahead of it.  Pairs
// (j, gamma) with gamma > 0; a terminal residual entry keeps the sum at
// exactly 1.  An entry with index i + j == positions.size() - 1 belongs to the
// leading-vehicle term.
std::vector<std::pair<int, double>> weights_micro(Kernel const& kernel,
                                                  std::span<double const> positions, int i);

// Cell weights gamma_k = integral of W_eta over [k dx, (k+1) dx]; covers the
// whole support (final partial cell included), sums to 1 within 1e-12.
std::vector<double> weights_macro(Kernel const& kernel, double dx);

}  // namespace nlt
