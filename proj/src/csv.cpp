#include "nlt/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace nlt {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string micro_trajectory_csv(MicroTrajectory const& tr, std::optional<double> only_t) {
  double const nan = std::numeric_limits<double>::quiet_NaN();
  std::string out = "t,i,x,gap,density\n";
  for (MicroState const& s : tr.samples) {
    if (only_t && std::abs(s.t - *only_t) > 1e-9) continue;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double const gap = i + 1 < s.x.size() ? s.x[i + 1] - s.x[i] : nan;
      double const density = i + 1 < s.x.size() ? tr.scenario.ell / gap : nan;
      out += fmt17(s.t);
      out += ',';
      out += std::to_string(i);
      out += ',';
      out += fmt17(s.x[i]);
      out += ',';
      out += fmt17(gap);
      out += ',';
      out += fmt17(density);
      out += '\n';
    }
  }
  return out;
}

std::string micro_lyapunov_csv(MicroTrajectory const& tr, MicroDiagnostics const& d) {
  std::string out = "t,L,ln_L,bound,ln_bound,alpha,beta\n";
  std::size_t const J = d.J >= 0 ? static_cast<std::size_t>(d.J) : 0;
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    MicroState const& s = tr.samples[k];
    out += fmt17(d.t[k]);
    out += ',';
    out += fmt17(d.L[k]);
    out += ',';
    out += fmt17(std::log(d.L[k]));
    out += ',';
    out += fmt17(d.bound[k]);
    out += ',';
    out += fmt17(std::log(d.bound[k]));
    out += ',';
    out += fmt17(s.x[J]);
    out += ',';
    out += fmt17(s.x.back());
    out += '\n';
  }
  return out;
}

std::string macro_snapshot_csv(MacroScenario const& sc, MacroState const& st) {
  std::vector<double> const eq = equilibrium_field(sc, st);
  std::vector<double> om(st.rho.size());
  {
    double fill = sc.omega_b();
    for (std::size_t j = st.rho.size(); j-- > 0;) {
      if (st.rho[j] >= kVacuumEps) fill = st.q[j] / st.rho[j];
      om[j] = fill;
    }
  }
  std::string out = "t,x_center,rho,q,omega,rho_eq\n";
  for (int j = 0; j < st.cells(); ++j) {
    std::size_t const u = static_cast<std::size_t>(j);
    out += fmt17(st.t);
    out += ',';
    out += fmt17(st.center(j));
    out += ',';
    out += fmt17(st.rho[u]);
    out += ',';
    out += fmt17(st.q[u]);
    out += ',';
    out += fmt17(om[u]);
    out += ',';
    out += fmt17(eq[u]);
    out += '\n';
  }
  return out;
}

std::string macro_lyapunov_csv(MacroDiagnostics const& d) {
  std::string out = "t,L,ln_L,bound,ln_bound,alpha,beta\n";
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    out += fmt17(d.t[k]);
    out += ',';
    out += fmt17(d.L[k]);
    out += ',';
    out += fmt17(std::log(d.L[k]));
    out += ',';
    out += fmt17(d.bound[k]);
    out += ',';
    out += fmt17(std::log(d.bound[k]));
    out += ',';
    out += fmt17(d.alpha[k]);
    out += ',';
    out += fmt17(d.beta[k]);
    out += '\n';
  }
  return out;
}

std::string comparison_csv(std::span<ComparisonReport const> reports) {
  std::string out = "t,l1_error,n_cars,dx\n";
  for (ComparisonReport const& r : reports) {
    out += fmt17(r.t);
    out += ',';
    out += fmt17(r.l1_error);
    out += ',';
    out += std::to_string(r.n_cars);
    out += ',';
    out += fmt17(r.dx);
    out += '\n';
  }
  return out;
}

std::string certificates_csv(std::span<CertificateReport const> reports) {
  std::string out = "theorem,status,worst,tolerance\n";
  for (CertificateReport const& r : reports) {
    out += theorem_name(r.theorem);
    out += ',';
    out += r.status();
    out += ',';
    out += fmt17(r.worst);
    out += ',';
    out += fmt17(r.tolerance);
    out += '\n';
  }
  return out;
}

std::string convergence_csv(ConvergenceStudy const& study) {
  std::string out = "t,n_cars,dx,l1_error\n";
  for (auto const& row : study.table) {
    for (ComparisonReport const& r : row) {
      out += fmt17(r.t);
      out += ',';
      out += std::to_string(r.n_cars);
      out += ',';
      out += fmt17(r.dx);
      out += ',';
      out += fmt17(r.l1_error);
      out += '\n';
    }
  }
  return out;
}

void write_file(std::filesystem::path const& path, std::string const& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace nlt
