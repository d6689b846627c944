#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlt/macro.hpp"
#include "nlt/micro.hpp"
#include "nlt/scenario.hpp"

namespace nlt {

struct ComparisonReport {
  double t = 0.0;
  double l1_error = 0.0;
  int n_cars = 0;
  double dx = 0.0;
};

// Exact L1 distance between the two piecewise-constant densities over the
// common support [x_0(t), min(x_N(t), beta(t))], by merging breakpoints.
ComparisonReport micro_macro_l1(MicroTrajectory const& micro, MacroTrajectory const& macro_tr,
                                double t);

struct ConvergenceStudy {
  double t_eval = 0.0;
  std::vector<int> n_list;
  std::vector<double> dx_list;
  std::vector<std::vector<ComparisonReport>> table;  // table[i][j] for (n_list[i], dx_list[j])
  bool decreasing_in_n = false;   // strict decrease down every dx column
  bool decreasing_in_dx = false;  // strict decrease along every n row
};

ConvergenceStudy convergence_study(Scenario const& base, std::span<int const> n_list,
                                   std::span<double const> dx_list, double t_eval);

enum class TheoremId {
  T1_stability,
  L1_maxprinciple,
  T2_constant,
  T3_concave,
  T4_macro,
  LA1_monotone,
  L3_crho,
};

std::string_view theorem_name(TheoremId id);
TheoremId theorem_from_name(std::string_view name);

struct CertificateReport {
  TheoremId theorem = TheoremId::T1_stability;
  bool applicable = false;
  std::vector<std::pair<std::string, bool>> hypotheses;
  double worst = 0.0;      // most adverse observed margin; meaning depends on the theorem
  double tolerance = 0.0;  // pass iff applicable and worst <= tolerance
  bool pass = false;
  std::string detail;

  std::string_view status() const {
    return applicable ? (pass ? std::string_view{"pass"} : std::string_view{"fail"})
                      : std::string_view{"not-applicable"};
  }
};

CertificateReport certify(MicroScenario const& sc, TheoremId id);    // T1_stability
CertificateReport certify(MicroTrajectory const& tr, TheoremId id);  // T1, L1, T2, T3, LA1
CertificateReport certify(MacroTrajectory const& tr, TheoremId id);  // T4, L3

std::string certificate_text(CertificateReport const& report);

bool strictly_decreasing(std::span<double const> xs);

}  // namespace nlt
