#include "nlt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace nlt {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

ComparisonReport micro_macro_l1(MicroTrajectory const& micro, MacroTrajectory const& macro_tr,
                                double t) {
  MicroScenario const& ms = micro.scenario;
  MacroScenario const& cs = macro_tr.scenario;
  if (ms.eta != cs.eta || ms.kernel.family != cs.kernel.family || ms.kernel.eta != cs.kernel.eta ||
      ms.velocity.family != cs.velocity.family || ms.vbar != cs.vbar)
    throw std::invalid_argument("micro_macro_l1: mismatched physics");

  MicroState const& mst = micro.at(t);
  MacroState const& gst = macro_tr.at(t);

  double const lo = mst.x.front();
  double const hi = std::min(mst.x.back(), cs.beta(t));
  if (!(hi > lo)) throw std::invalid_argument("micro_macro_l1: empty common support");

  std::vector<double> cuts{lo, hi};
  for (double x : mst.x)
    if (x > lo && x < hi) cuts.push_back(x);
  int const n = gst.cells();
  int const j0 = std::clamp(static_cast<int>(std::floor((lo - gst.x_left) / gst.dx)), 0, n - 1);
  for (int j = j0 + 1; j < n; ++j) {
    double const e = gst.left_edge(j);
    if (e >= hi) break;
    if (e > lo) cuts.push_back(e);
  }
  std::sort(cuts.begin(), cuts.end());

  double err = 0.0;
  std::size_t gi = 0;  // micro gap cursor, monotone in x
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double const width = cuts[k + 1] - cuts[k];
    if (width <= 0.0) continue;
    double const mid = 0.5 * (cuts[k] + cuts[k + 1]);
    while (gi + 2 < mst.x.size() && mst.x[gi + 1] <= mid) ++gi;
    double const rho_micro = ms.ell / (mst.x[gi + 1] - mst.x[gi]);
    int const j = std::clamp(static_cast<int>(std::floor((mid - gst.x_left) / gst.dx)), 0, n - 1);
    double const rho_macro = gst.rho[static_cast<std::size_t>(j)];
    err += std::abs(rho_micro - rho_macro) * width;
  }
  return {t, err, ms.n_cars(), cs.dx};
}

ConvergenceStudy convergence_study(Scenario const& base, std::span<int const> n_list,
                                   std::span<double const> dx_list, double t_eval) {
  base.validate();
  if (n_list.empty() || dx_list.empty())
    throw std::invalid_argument("convergence_study: empty resolution list");
  if (!(t_eval > 0.0) || t_eval > base.t_end)
    throw std::invalid_argument("convergence_study: t_eval outside (0, t_end]");

  ConvergenceStudy out;
  out.t_eval = t_eval;
  out.n_list.assign(n_list.begin(), n_list.end());
  out.dx_list.assign(dx_list.begin(), dx_list.end());

  std::vector<double> const outputs{t_eval};

  std::vector<MicroTrajectory> micros;
  micros.reserve(n_list.size());
  for (int n : n_list) {
    Scenario s = base;
    s.n_cars = n;
    s.output_times = outputs;
    MicroIntegrateOptions opt;
    opt.diagnostic_samples = 8;
    micros.push_back(integrate(micro_from(s), t_eval, outputs, opt));
  }

  std::vector<MacroTrajectory> macros;
  macros.reserve(dx_list.size());
  for (double d : dx_list) {
    Scenario s = base;
    s.dx = d;
    s.t_end = t_eval;
    s.output_times = outputs;
    MacroIntegrateOptions opt;
    opt.diagnostic_samples = 8;
    opt.record_v_each_step = false;
    macros.push_back(integrate(macro_from(s), outputs, opt));
  }

  out.table.resize(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    out.table[i].reserve(dx_list.size());
    for (std::size_t j = 0; j < dx_list.size(); ++j)
      out.table[i].push_back(micro_macro_l1(micros[i], macros[j], t_eval));
  }

  out.decreasing_in_n = true;
  for (std::size_t j = 0; j < dx_list.size() && out.decreasing_in_n; ++j)
    for (std::size_t i = 1; i < n_list.size(); ++i)
      if (!(out.table[i][j].l1_error < out.table[i - 1][j].l1_error)) {
        out.decreasing_in_n = false;
        break;
      }
  out.decreasing_in_dx = true;
  for (std::size_t i = 0; i < n_list.size() && out.decreasing_in_dx; ++i)
    for (std::size_t j = 1; j < dx_list.size(); ++j)
      if (!(out.table[i][j].l1_error < out.table[i][j - 1].l1_error)) {
        out.decreasing_in_dx = false;
        break;
      }
  return out;
}

std::string_view theorem_name(TheoremId id) {
  switch (id) {
    case TheoremId::T1_stability: return "T1_stability";
    case TheoremId::L1_maxprinciple: return "L1_maxprinciple";
    case TheoremId::T2_constant: return "T2_constant";
    case TheoremId::T3_concave: return "T3_concave";
    case TheoremId::T4_macro: return "T4_macro";
    case TheoremId::LA1_monotone: return "LA1_monotone";
    case TheoremId::L3_crho: return "L3_crho";
  }
  throw std::invalid_argument("theorem_name: unknown theorem id");
}

TheoremId theorem_from_name(std::string_view name) {
  for (TheoremId id : {TheoremId::T1_stability, TheoremId::L1_maxprinciple, TheoremId::T2_constant,
                       TheoremId::T3_concave, TheoremId::T4_macro, TheoremId::LA1_monotone,
                       TheoremId::L3_crho})
    if (theorem_name(id) == name) return id;
  throw std::invalid_argument("unknown theorem id: " + std::string(name));
}

CertificateReport certify(MicroScenario const& sc, TheoremId id) {
  if (id != TheoremId::T1_stability)
    throw std::invalid_argument("certify(scenario): only T1_stability is scenario-level");
  sc.validate();
  CertificateReport r;
  r.theorem = id;
  r.tolerance = -1e-12;

  bool finite = true;
  for (int i = 0; i < sc.leader(); ++i)
    if (!std::isfinite(sc.equilibrium_gap_of(i))) finite = false;
  r.hypotheses.emplace_back("equilibrium gaps finite (vbar < omega_i)", finite);
  r.applicable = finite;
  if (!finite) {
    r.detail = "some marker equals vbar; no finite equilibrium spacing";
    return r;
  }

  MicroState st;
  st.t = 0.0;
  st.x.resize(sc.x0.size());
  st.x.back() = sc.x0.back();
  for (int i = sc.leader() - 1; i >= 0; --i)
    st.x[static_cast<std::size_t>(i)] =
        st.x[static_cast<std::size_t>(i) + 1] - sc.equilibrium_gap_of(i);

  std::vector<double> const diag = jacobian_diagonal(sc, st);
  r.worst = -std::numeric_limits<double>::infinity();
  for (double d : diag) r.worst = std::max(r.worst, d);
  r.pass = r.worst <= r.tolerance;
  r.detail = "largest linearization diagonal " + fmt(r.worst);
  return r;
}

namespace {

CertificateReport certify_micro_bound(MicroTrajectory const& tr, TheoremId id) {
  MicroDiagnostics const d = micro_diagnostics(tr);
  MicroScenario const& sc = tr.scenario;
  CertificateReport r;
  r.theorem = id;
  r.tolerance = 1e-6;

  bool const constant = sc.kernel.family == KernelFamily::Constant;
  if (id == TheoremId::T2_constant) {
    r.hypotheses.emplace_back("constant kernel", constant);
    r.hypotheses.emplace_back("J exists", d.j_exists);
    r.applicable = constant && d.j_exists;
  } else {
    r.hypotheses.emplace_back("concave kernel", d.t3.concave);
    r.hypotheses.emplace_back("uniform omega on bulk", d.t3.uniform_omega);
    r.hypotheses.emplace_back("initial gaps monotone on one side of equilibrium",
                              d.t3.monotone_one_side);
    r.hypotheses.emplace_back("J exists", d.j_exists);
    r.applicable = d.t3.holds() && d.j_exists;
  }
  if (!r.applicable) return r;

  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    double bound;
    if (id == TheoremId::T2_constant) {
      bound = bound_constant(sc, d.J, d.t[k]);
    } else {
      bound = bound_concave(tr, d.J, d.t[k]).value();
    }
    double const v = bound > 0.0 ? d.L[k] / bound - 1.0 : d.L[k];
    worst = std::max(worst, v);
  }
  r.worst = worst;
  r.pass = r.worst <= r.tolerance;
  r.detail = "max of L/bound - 1 over " + std::to_string(d.t.size()) + " samples";
  return r;
}

CertificateReport certify_monotone(MicroTrajectory const& tr) {
  MicroScenario const& sc = tr.scenario;
  MicroDiagnostics const d = micro_diagnostics(tr);
  CertificateReport r;
  r.theorem = TheoremId::LA1_monotone;
  r.tolerance = 1e-10;
  r.hypotheses.emplace_back("concave kernel", d.t3.concave);
  r.hypotheses.emplace_back("uniform omega on bulk", d.t3.uniform_omega);
  r.hypotheses.emplace_back("initial gaps monotone on one side of equilibrium",
                            d.t3.monotone_one_side);
  r.hypotheses.emplace_back("J exists", d.j_exists);
  r.applicable = d.t3.holds() && d.j_exists;
  if (!r.applicable) return r;

  int const J = d.J;
  int const leader = sc.leader();
  std::vector<double> const y0 = gaps(MicroState{0.0, sc.x0});
  bool const nondec =
      y0[static_cast<std::size_t>(leader) - 1] >= y0[static_cast<std::size_t>(J)];
  double worst = 0.0;
  for (MicroState const& s : tr.samples) {
    for (int i = J; i + 1 < leader; ++i) {
      double const yi = s.x[static_cast<std::size_t>(i) + 1] - s.x[static_cast<std::size_t>(i)];
      double const yn = s.x[static_cast<std::size_t>(i) + 2] - s.x[static_cast<std::size_t>(i) + 1];
      worst = std::max(worst, nondec ? yi - yn : yn - yi);
    }
  }
  r.worst = worst;
  r.pass = r.worst <= r.tolerance;
  r.detail = nondec ? "largest inversion of nondecreasing gap order"
                    : "largest inversion of nonincreasing gap order";
  return r;
}

}  // namespace

CertificateReport certify(MicroTrajectory const& tr, TheoremId id) {
  switch (id) {
    case TheoremId::T1_stability: return certify(tr.scenario, id);
    case TheoremId::L1_maxprinciple: {
      MicroDiagnostics const d = micro_diagnostics(tr);
      bool const constant = tr.scenario.kernel.family == KernelFamily::Constant;
      CertificateReport r;
      r.theorem = id;
      r.tolerance = 1e-8;
      r.hypotheses.emplace_back("J exists", d.j_exists);
      r.hypotheses.emplace_back("constant kernel or concave-case hypotheses",
                                constant || d.t3.holds());
      r.applicable = d.j_exists && (constant || d.t3.holds());
      if (!r.applicable) return r;
      r.worst = d.max_principle.worst;
      r.pass = r.worst <= r.tolerance;
      r.detail = "largest escape from [min(y_i(0), Lbar_i), max(y_i(0), Lbar_i)]";
      return r;
    }
    case TheoremId::T2_constant:
    case TheoremId::T3_concave:
      return certify_micro_bound(tr, id);
    case TheoremId::LA1_monotone:
      return certify_monotone(tr);
    case TheoremId::T4_macro:
    case TheoremId::L3_crho:
      throw std::invalid_argument("certify: macroscopic certificate on a microscopic trajectory");
  }
  throw std::invalid_argument("certify: unknown theorem id");
}

CertificateReport certify(MacroTrajectory const& tr, TheoremId id) {
  MacroScenario const& sc = tr.scenario;
  switch (id) {
    case TheoremId::T4_macro: {
      MacroDiagnostics const d = macro_diagnostics(tr);
      CertificateReport r;
      r.theorem = id;
      r.tolerance = 1e-3;
      r.hypotheses.emplace_back("constant kernel", d.t4.constant_kernel);
      r.hypotheses.emplace_back("concave kernel", d.t4.concave);
      r.hypotheses.emplace_back("uniform omega0 on [b - eta, b]", d.t4.uniform_omega_tail);
      r.hypotheses.emplace_back("rho0 monotone toward equilibrium on [b - eta, b]",
                                d.t4.monotone_consistent);
      r.applicable = d.t4.holds();
      if (!r.applicable) return r;
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < d.t.size(); ++k) {
        double const v = d.bound[k] > 0.0 ? d.L[k] / d.bound[k] - 1.0 : d.L[k];
        worst = std::max(worst, v);
      }
      r.worst = worst;
      r.pass = r.worst <= r.tolerance;
      r.detail = "max of L/bound - 1 over " + std::to_string(d.t.size()) + " windows (" +
                 d.bound_case + " case)";
      return r;
    }
    case TheoremId::L3_crho: {
      CertificateReport r;
      r.theorem = id;
      r.tolerance = 1e-6 * sc.eta;

      double const om_lo = sc.omega0.min_value();
      double const om_hi = sc.omega0.max_value();
      bool const uniform = om_hi - om_lo <= 1e-12;
      bool case_a = uniform;
      if (uniform) {
        double const rho_eq = sc.velocity.equilibrium_density(sc.vbar, om_lo);
        for (double v : sc.rho0.vals)
          if (v > rho_eq + 1e-12) case_a = false;
      }
      bool case_b = uniform && sc.kernel.family == KernelFamily::Constant;
      if (case_b) {
        MacroState const st0 = init_grid(sc);
        std::vector<double> const w = weights_macro(sc.kernel, sc.dx);
        std::vector<double> const V = nonlocal_velocity(sc, st0, w);
        int const j = std::clamp(
            static_cast<int>(std::floor((sc.b - sc.eta - st0.x_left) / st0.dx)), 0,
            st0.cells() - 1);
        case_b = V[static_cast<std::size_t>(j)] >= sc.vbar - 1e-12;
      }
      r.hypotheses.emplace_back("uniform omega0", uniform);
      r.hypotheses.emplace_back("rho0 <= equilibrium density everywhere (case a)", case_a);
      r.hypotheses.emplace_back("constant kernel with V(0, b - eta) >= vbar (case b)", case_b);
      r.applicable = uniform && (case_a || case_b);
      if (!r.applicable) return r;

      double const predicted = sc.rho0.integral(sc.b - sc.eta, sc.b);
      r.worst = std::abs(c_rho(tr) - predicted);
      r.pass = r.worst <= r.tolerance;
      r.detail = "deviation of c_rho from the initial window mass " + fmt(predicted);
      return r;
    }
    case TheoremId::T1_stability:
    case TheoremId::L1_maxprinciple:
    case TheoremId::T2_constant:
    case TheoremId::T3_concave:
    case TheoremId::LA1_monotone:
      throw std::invalid_argument("certify: microscopic certificate on a macroscopic trajectory");
  }
  throw std::invalid_argument("certify: unknown theorem id");
}

std::string certificate_text(CertificateReport const& report) {
  std::string out;
  out += "certificate ";
  out += theorem_name(report.theorem);
  out += ": ";
  out += report.status();
  out += "\n";
  for (auto const& [name, ok] : report.hypotheses) {
    out += "  hypothesis ";
    out += name;
    out += ": ";
    out += ok ? "yes" : "no";
    out += "\n";
  }
  if (report.applicable) {
    out += "  worst " + fmt(report.worst) + " vs tolerance " + fmt(report.tolerance) + "\n";
  }
  if (!report.detail.empty()) out += "  " + report.detail + "\n";
  return out;
}

bool strictly_decreasing(std::span<double const> xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) return false;
  return true;
}

}  // namespace nlt
