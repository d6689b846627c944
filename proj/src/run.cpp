#include "nlt/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "nlt/analysis.hpp"
#include "nlt/csv.hpp"
#include "nlt/plot.hpp"

namespace nlt {

namespace {

std::string time_label(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

std::vector<double> sorted_unique(std::vector<double> ts) {
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
           ts.end());
  return ts;
}

std::vector<double> log_all(std::vector<double> const& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) out[k] = std::log(xs[k]);
  return out;
}

}  // namespace

RunResult run(ScenarioConfig const& cfg, RunOptions const& opt) {
  RunResult res;
  Scenario const scenario = cfg.to_scenario();
  std::filesystem::create_directories(opt.out_dir);
  auto emit = [&](std::string const& name, std::string const& content) {
    write_file(opt.out_dir / name, content);
    res.files.push_back(name);
  };
  emit("config.json", to_json(cfg).dump(2) + "\n");

  bool const want_micro = cfg.scale != Scale::macro;
  bool const want_macro = cfg.scale != Scale::micro;
  std::vector<double> const snapshot_times = sorted_unique(scenario.output_times);
  std::vector<CertificateReport> certs;

  std::optional<MicroTrajectory> micro_tr;
  if (want_micro) {
    MicroScenario const msc = micro_from(scenario);
    MicroIntegrateOptions mopt;
    mopt.abs_tol = cfg.abs_tol;
    mopt.rel_tol = cfg.rel_tol;
    mopt.diagnostic_samples = cfg.diagnostic_samples;
    try {
      micro_tr = integrate(msc, scenario.t_end, scenario.output_times, mopt);
    } catch (SolverError const& e) {
      nlohmann::json err{{"stage", "micro"}, {"error", e.what()}, {"t", e.t}};
      emit("error.json", err.dump(2) + "\n");
      res.exit_code = 3;
      res.message = std::string("micro solver failed: ") + e.what();
      return res;
    }

    std::optional<int> j_override;
    if (cfg.index_policy == IndexPolicy::bulk) {
      BulkSet const bs = bulk_set(*micro_tr);
      if (bs.j_min >= 0) j_override = bs.j_min;
    } else if (cfg.index_policy == IndexPolicy::custom) {
      j_override = cfg.custom_indices.front();
    }
    MicroDiagnostics const d = micro_diagnostics(*micro_tr, j_override);

    if (opt.emit_snapshots)
      for (double t : snapshot_times)
        emit("micro_t" + time_label(t) + ".csv", micro_trajectory_csv(*micro_tr, t));
    emit("lyapunov_micro.csv", micro_lyapunov_csv(*micro_tr, d));

    for (TheoremId id : {TheoremId::T1_stability, TheoremId::L1_maxprinciple,
                         TheoremId::T2_constant, TheoremId::T3_concave, TheoremId::LA1_monotone})
      certs.push_back(certify(*micro_tr, id));

    if (opt.make_plots) {
      std::vector<PlotSeries> series;
      series.push_back({"ln L_micro", "#000000", d.t, log_all(d.L)});
      if (d.bound_applicable) series.push_back({"ln bound", "#888888", d.t, log_all(d.bound)});
      emit("lyapunov_micro.svg",
           line_plot_svg("Lyapunov decay (micro)", "t", "ln L", series));
    }
  }

  std::optional<MacroTrajectory> macro_tr;
  if (want_macro) {
    MacroScenario const csc = macro_from(scenario);
    MacroIntegrateOptions copt;
    copt.diagnostic_samples = cfg.diagnostic_samples;
    try {
      macro_tr = integrate(csc, scenario.output_times, copt);
    } catch (SolverError const& e) {
      nlohmann::json err{{"stage", "macro"}, {"error", e.what()}, {"t", e.t}};
      emit("error.json", err.dump(2) + "\n");
      res.exit_code = 3;
      res.message = std::string("macro solver failed: ") + e.what();
      return res;
    }
    MacroDiagnostics const d = macro_diagnostics(*macro_tr);

    if (opt.emit_snapshots)
      for (double t : snapshot_times)
        emit("macro_t" + time_label(t) + ".csv", macro_snapshot_csv(csc, macro_tr->at(t)));
    emit("lyapunov_macro.csv", macro_lyapunov_csv(d));

    for (TheoremId id : {TheoremId::T4_macro, TheoremId::L3_crho})
      certs.push_back(certify(*macro_tr, id));

    if (opt.make_plots) {
      std::vector<PlotSeries> series;
      series.push_back({"ln L_macro", "#000000", d.t, log_all(d.L)});
      if (d.bound_applicable) series.push_back({"ln bound", "#888888", d.t, log_all(d.bound)});
      emit("lyapunov_macro.svg",
           line_plot_svg("Lyapunov decay (macro)", "t", "ln L", series));
    }
  }

  if (opt.make_plots && opt.emit_snapshots) {
    for (double t : snapshot_times) {
      std::vector<PlotSeries> series;
      if (micro_tr) {
        MicroState const& s = micro_tr->at(t);
        PlotSeries ps{"micro", "#1f5fbf", {}, {}};
        for (std::size_t i = 0; i + 1 < s.x.size(); ++i) {
          double const rho = micro_tr->scenario.ell / (s.x[i + 1] - s.x[i]);
          ps.x.push_back(s.x[i]);
          ps.y.push_back(rho);
          ps.x.push_back(s.x[i + 1]);
          ps.y.push_back(rho);
        }
        series.push_back(std::move(ps));
      }
      if (macro_tr) {
        MacroState const& s = macro_tr->at(t);
        PlotSeries ps{"macro", "#bf1f1f", {}, {}};
        for (int j = 0; j < s.cells(); ++j) {
          ps.x.push_back(s.center(j));
          ps.y.push_back(s.rho[static_cast<std::size_t>(j)]);
        }
        series.push_back(std::move(ps));
      }
      emit("density_t" + time_label(t) + ".svg",
           line_plot_svg("density at t = " + time_label(t), "x", "rho", series));
    }
  }

  if (want_micro && want_macro && opt.emit_comparison && !snapshot_times.empty()) {
    std::vector<ComparisonReport> reports;
    for (double t : snapshot_times) reports.push_back(micro_macro_l1(*micro_tr, *macro_tr, t));
    emit("comparison.csv", comparison_csv(reports));
  }

  emit("certificates.csv", certificates_csv(certs));
  std::string text;
  for (CertificateReport const& c : certs) text += certificate_text(c) + "\n";
  emit("certificates.txt", text);

  if (opt.strict) {
    std::string failing;
    for (CertificateReport const& c : certs)
      if (c.applicable && !c.pass) failing += std::string(failing.empty() ? "" : ", ") +
                                              std::string(theorem_name(c.theorem));
    if (!failing.empty()) {
      res.exit_code = 4;
      res.message = "failed certificates: " + failing;
    }
  }
  return res;
}

RunResult run_sweep(ScenarioConfig const& cfg, std::vector<int> const& n_list,
                    std::vector<double> const& dx_list, double t_eval, RunOptions const& opt) {
  RunResult res;
  Scenario const scenario = cfg.to_scenario();
  std::filesystem::create_directories(opt.out_dir);
  auto emit = [&](std::string const& name, std::string const& content) {
    write_file(opt.out_dir / name, content);
    res.files.push_back(name);
  };
  emit("config.json", to_json(cfg).dump(2) + "\n");

  ConvergenceStudy study;
  try {
    study = convergence_study(scenario, n_list, dx_list, t_eval);
  } catch (SolverError const& e) {
    nlohmann::json err{{"stage", "sweep"}, {"error", e.what()}, {"t", e.t}};
    emit("error.json", err.dump(2) + "\n");
    res.exit_code = 3;
    res.message = std::string("sweep solver failed: ") + e.what();
    return res;
  }
  emit("sweep.csv", convergence_csv(study));

  std::string summary = "convergence study at t = " + fmt17(study.t_eval) + "\n";
  summary += std::string("strict decrease in n_cars: ") +
             (study.decreasing_in_n ? "yes" : "no") + "\n";
  summary += std::string("strict decrease in dx: ") +
             (study.decreasing_in_dx ? "yes" : "no") + "\n";
  emit("sweep_summary.txt", summary);
  return res;
}

}  // namespace nlt
