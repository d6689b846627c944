#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlt/kernels.hpp"
#include "nlt/micro.hpp"
#include "nlt/profile.hpp"
#include "nlt/scenario.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

// Conservative variables (rho, q = rho * omega) on a static uniform grid over
// [a - eta, b + vbar * t_end + eta].  The moving Dirichlet boundary beta(t) =
// b + vbar * t is realized by clamping every cell at or beyond beta to the
// boundary equilibrium after each update.
struct MacroScenario {
  double a = 0.0;
  double b = 1.0;
  double dx = 0.01;
  double eta = 0.5;
  Kernel kernel;
  VelocityModel velocity;
  PiecewiseConstant rho0;
  PiecewiseConstant omega0;
  double vbar = 0.5;
  double t_end = 1.0;

  double omega_b() const { return omega0.vals.back(); }
  double rho_b() const { return velocity.equilibrium_density(vbar, omega_b()); }
  double beta(double t) const { return b + vbar * t; }
  void validate() const;
};

struct MacroState {
  double t = 0.0;
  double x_left = 0.0;  // left edge of cell 0
  double dx = 0.0;
  std::vector<double> rho;
  std::vector<double> q;

  int cells() const { return static_cast<int>(rho.size()); }
  double left_edge(int j) const { return x_left + dx * static_cast<double>(j); }
  double center(int j) const { return x_left + dx * (static_cast<double>(j) + 0.5); }
};

constexpr double kVacuumEps = 1e-12;

struct MacroStepRecord {
  double t = 0.0;
  double dt = 0.0;
  double window_mass = 0.0;  // integral of rho over [beta - eta, beta]
  double beta = 0.0;
};

// Cell slice covering the Lyapunov window [beta - eta, beta] plus padding.
struct MacroWindow {
  double t = 0.0;
  double beta = 0.0;
  double x_left = 0.0;  // left edge of the first stored cell
  double dx = 0.0;
  std::vector<double> rho;
  std::vector<double> q;
};

// Nonlocal velocity over the same padded window, captured at the start of one
// step of length dt (used to integrate the boundary ODE of the alpha check).
struct MacroVSlice {
  double t = 0.0;
  double dt = 0.0;
  double x_left = 0.0;
  double dx = 0.0;
  std::vector<double> v;
};

struct MacroIntegrateOptions {
  int diagnostic_samples = 400;
  bool record_v_each_step = true;
  // dt = cfl * dx / max V over mass-carrying cells; the upwind update stays
  // positivity-preserving up to cfl = 1, and any margin below 1 widens the
  // numerical diffusion at the moving boundary.
  double cfl = 1.0;
};

struct MacroTrajectory {
  MacroScenario scenario;
  std::vector<MacroState> samples;  // full grid snapshots at the requested output times
  std::vector<double> requested;
  std::vector<MacroStepRecord> records;  // one per step plus a terminal entry
  std::vector<MacroWindow> windows;      // diagnostic grid merged with output times
  std::vector<MacroVSlice> vslices;      // per step when record_v_each_step

  MacroState const& at(double t) const;
};

MacroScenario macro_from(Scenario const& s);

MacroState init_grid(MacroScenario const& sc);

// V_j = sum_k gamma_k v(rho_{j+k+1}, omega_{j+k+1}); vacuum cells use the
// nearest downstream marker, cells beyond the grid the boundary equilibrium.
std::vector<double> nonlocal_velocity(MacroScenario const& sc, MacroState const& st,
                                      std::span<double const> weights);

struct StepInfo {
  double dt = 0.0;
  double flux_out_rho = 0.0;  // through the right grid edge
  double flux_out_q = 0.0;
  double flux_in_rho = 0.0;  // through the left grid edge (zero inflow)
  double flux_in_q = 0.0;
};

// Conservative update with the given velocities and time step; no clamping.
StepInfo step_raw(MacroScenario const& sc, MacroState& st, std::span<double const> v, double dt);

// Chooses dt from the CFL condition (capped by dt_cap), applies the update,
// then clamps every cell at or beyond beta(t) to the boundary equilibrium.
StepInfo step(MacroScenario const& sc, MacroState& st, std::span<double const> weights,
              double dt_cap);

MacroTrajectory integrate(MacroScenario const& sc, std::span<double const> output_times,
                          MacroIntegrateOptions const& opt = {});

// Exact integral of the cell-piecewise-constant density over [lo, hi].
double window_mass(MacroState const& st, double lo, double hi);

double c_rho(MacroTrajectory const& tr);

// alpha = sup{x >= beta - eta : integral_x^beta rho >= c}; sub-cell position
// by linear interpolation, ties resolved toward the right.
double alpha(MacroScenario const& sc, MacroState const& st, double c);
double alpha_window(MacroWindow const& win, double eta, double c);

double lyapunov_macro(MacroScenario const& sc, MacroState const& st, double alpha_pos);
double lyapunov_window(MacroScenario const& sc, MacroWindow const& win, double alpha_pos);

std::vector<double> equilibrium_field(MacroScenario const& sc, MacroState const& st);

struct Theorem4Hypotheses {
  bool constant_kernel = false;
  bool concave = false;
  bool uniform_omega_tail = false;   // omega0 uniform on [b - eta, b]
  bool monotone_consistent = false;  // rho0 <= rho_bar nondecreasing or >= nonincreasing there
  bool holds() const { return constant_kernel || (concave && uniform_omega_tail && monotone_consistent); }
  std::string case_name() const {
    return constant_kernel ? "constant" : (holds() ? "concave" : "none");
  }
};
Theorem4Hypotheses theorem4_hypotheses(MacroScenario const& sc);

// inf over [alpha(0), b] of min(rho0, equilibrium density of omega0).
double rho_min_macro(MacroScenario const& sc, double alpha0);

struct MacroDiagnostics {
  double c_rho = 0.0;
  double rho_min = 0.0;
  double L0 = 0.0;
  std::vector<double> t;
  std::vector<double> L;
  std::vector<double> bound;  // NaN when not applicable
  std::vector<double> alpha;
  std::vector<double> beta;
  bool bound_applicable = false;
  std::string bound_case = "none";
  Theorem4Hypotheses t4;
  std::optional<double> alpha_ode_max_dev;  // set when per-step velocities were recorded
};
MacroDiagnostics macro_diagnostics(MacroTrajectory const& tr);

}  // namespace nlt
