#include "nlt/kernels.hpp"

#include <algorithm>

namespace nlt {

Kernel make_kernel(std::string_view name, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("make_kernel: eta must be positive");
  KernelFamily family;
  if (name == "const")
    family = KernelFamily::Constant;
  else if (name == "lin")
    family = KernelFamily::LinearVanishing;
  else if (name == "lin2")
    family = KernelFamily::LinearPositive;
  else if (name == "conc")
    family = KernelFamily::ConcaveQuadratic;
  else if (name == "conv")
    family = KernelFamily::ConvexQuadratic;
  else
    throw std::invalid_argument("make_kernel: unknown kernel name '" + std::string(name) + "'");
  return Kernel{family, eta};
}

std::string_view kernel_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::Constant: return "const";
    case KernelFamily::LinearVanishing: return "lin";
    case KernelFamily::LinearPositive: return "lin2";
    case KernelFamily::ConcaveQuadratic: return "conc";
    case KernelFamily::ConvexQuadratic: return "conv";
  }
  return "?";
}

std::vector<std::pair<int, double>> weights_micro(Kernel const& kernel,
                                                  std::span<double const> positions, int i) {
  int const leader = static_cast<int>(positions.size()) - 1;
  if (i < 0 || i >= leader) throw std::invalid_argument("weights_micro: follower index out of range");

  std::vector<std::pair<int, double>> out;
  double acc = 0.0;
  for (int j = 0;; ++j) {
    int const idx = i + j;
    if (idx > i && !(positions[idx] > positions[idx - 1]))
      throw std::invalid_argument("weights_micro: positions not strictly increasing");
    double const dl = positions[idx] - positions[i];
    if (dl >= kernel.eta) break;
    if (idx == leader) {
      // remaining kernel mass rides on the prescribed leading speed
      double const g = 1.0 - acc;
      if (g != 0.0) out.emplace_back(j, g);
      break;
    }
    double const dr = positions[idx + 1] - positions[i];
    if (dr >= kernel.eta) {
      // last gap inside the support: residual keeps the sum at exactly 1
      double const g = 1.0 - acc;
      if (g != 0.0) out.emplace_back(j, g);
      break;
    }
    double const g = kernel.mass(dl, dr);
    if (g != 0.0) out.emplace_back(j, g);
    acc += g;
  }
  return out;
}

std::vector<double> weights_macro(Kernel const& kernel, double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("weights_macro: dx must be positive");
  std::vector<double> w;
  for (int k = 0; k * dx < kernel.eta; ++k)
    w.push_back(kernel.cdf((k + 1) * dx) - kernel.cdf(k * dx));
  return w;
}

}  // namespace nlt
