#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlt/kernels.hpp"
#include "nlt/profile.hpp"
#include "nlt/scenario.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

// N + 1 vehicles x_0 < ... < x_N; followers 0..N-1 carry markers omega_i and
// each gap y_i = x_{i+1} - x_i holds mass ell, so the discrete density on a
// gap is ell / y_i.
struct MicroScenario {
  double eta = 0.5;
  Kernel kernel;
  VelocityModel velocity;
  double vbar = 0.5;
  std::vector<double> x0;
  std::vector<double> omegas;
  double ell = 1.0;

  int n_cars() const { return static_cast<int>(x0.size()); }
  int leader() const { return static_cast<int>(x0.size()) - 1; }
  double equilibrium_gap_of(int i) const {
    return velocity.equilibrium_gap(vbar, omegas[static_cast<std::size_t>(i)], ell);
  }
  void validate() const;
};

struct MicroState {
  double t = 0.0;
  std::vector<double> x;
};

struct MicroTrajectory {
  MicroScenario scenario;
  std::vector<MicroState> samples;  // requested output times merged with a uniform diagnostic grid
  std::vector<double> requested;
  MicroState const& at(double t) const;
};

struct MicroIntegrateOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  int diagnostic_samples = 400;  // uniform subdivisions of [0, t_end] added to the outputs
};

struct SolverError : std::runtime_error {
  double t;
  std::vector<double> state;
  SolverError(std::string const& msg, double t_, std::vector<double> state_)
      : std::runtime_error(msg), t(t_), state(std::move(state_)) {}
};

// Equal-mass quantile placement on a piecewise-constant density; returns the
// n_cars positions (x_0 = a, x_{N} = b) and ell = M / N.
std::pair<std::vector<double>, double> place_cars(PiecewiseConstant const& rho0, int n_cars);

MicroScenario micro_from(Scenario const& s);

std::vector<double> rhs(MicroScenario const& sc, MicroState const& st);

MicroTrajectory integrate(MicroScenario const& sc, double t_end,
                          std::span<double const> output_times,
                          MicroIntegrateOptions const& opt = {});

std::vector<double> gaps(MicroState const& st);
PiecewiseConstant density_profile(MicroScenario const& sc, MicroState const& st);

// Smallest J with sum_{i=J}^{N-1} max(y_i(0), Lbar_i) <= eta; nullopt if even
// the last gap alone exceeds the look-ahead.
std::optional<int> compute_J(MicroScenario const& sc);

struct BulkSet {
  std::vector<int> indices;
  int j_min = -1;
};
// Cars that stay within eta of the leader at every stored sample, and the
// smallest such index.
BulkSet bulk_set(MicroTrajectory const& tr);

double rho_min_micro(MicroScenario const& sc, int J);

double lyapunov_micro(MicroScenario const& sc, MicroState const& st, int J);
double lyapunov_micro_set(MicroScenario const& sc, MicroState const& st,
                          std::span<int const> indices);

// L(0) * exp((2/eta) * vprime_max * rho_min * t)
double bound_constant(MicroScenario const& sc, int J, double t);

struct Theorem3Hypotheses {
  bool concave = false;
  bool uniform_omega = false;
  bool monotone_one_side = false;
  bool holds() const { return concave && uniform_omega && monotone_one_side; }
};
Theorem3Hypotheses theorem3_hypotheses(MicroScenario const& sc, int J);

// L(0) * exp(2 * vprime_max * rho_min * int_0^t W(x_N - x_J) ds); nullopt when
// the concavity/uniformity/monotonicity hypotheses fail.
std::optional<double> bound_concave(MicroTrajectory const& tr, int J, double t);

struct MaxPrincipleReport {
  double worst = 0.0;
  int car = -1;
  double t = 0.0;
  bool pass = true;
};
MaxPrincipleReport max_principle_check(MicroTrajectory const& tr, int J);

// Diagonal of the linearization of the gap dynamics at the equilibrium
// configuration; strictly negative entries certify local asymptotic
// stability.
std::vector<double> jacobian_diagonal(MicroScenario const& sc, MicroState const& st);

struct MicroDiagnostics {
  int J = -1;
  bool j_exists = false;
  double rho_min = 0.0;
  double L0 = 0.0;
  std::vector<double> t;
  std::vector<double> L;
  std::vector<double> bound;  // NaN when not applicable
  bool bound_applicable = false;
  std::string bound_kind = "none";  // "constant" | "concave" | "none"
  Theorem3Hypotheses t3;
  MaxPrincipleReport max_principle;
};
MicroDiagnostics micro_diagnostics(MicroTrajectory const& tr,
                                   std::optional<int> j_override = std::nullopt);

}  // namespace nlt
