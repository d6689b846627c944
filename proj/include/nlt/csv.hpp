#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "nlt/analysis.hpp"
#include "nlt/macro.hpp"
#include "nlt/micro.hpp"

namespace nlt {

// 17-significant-digit decimal, enough to round-trip a double.
std::string fmt17(double x);

// Columns t,i,x,gap,density; one row per (sample, car).  The leader row
// carries nan for gap and density.  Optionally restricted to one sample time.
std::string micro_trajectory_csv(MicroTrajectory const& tr,
                                 std::optional<double> only_t = std::nullopt);

// Columns t,L,ln_L,bound,ln_bound,alpha,beta with alpha = x_J and beta = x_N.
std::string micro_lyapunov_csv(MicroTrajectory const& tr, MicroDiagnostics const& d);

// Columns t,x_center,rho,q,omega,rho_eq over the whole grid.
std::string macro_snapshot_csv(MacroScenario const& sc, MacroState const& st);

// Columns t,L,ln_L,bound,ln_bound,alpha,beta.
std::string macro_lyapunov_csv(MacroDiagnostics const& d);

// Columns t,l1_error,n_cars,dx.
std::string comparison_csv(std::span<ComparisonReport const> reports);

// Columns theorem,status,worst,tolerance.
std::string certificates_csv(std::span<CertificateReport const> reports);

// Long format: t,n_cars,dx,l1_error.
std::string convergence_csv(ConvergenceStudy const& study);

// LF-only binary write; throws std::runtime_error on failure.
void write_file(std::filesystem::path const& path, std::string const& content);

}  // namespace nlt
