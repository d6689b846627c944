#pragma once

#include <vector>

#include "nlt/kernels.hpp"
#include "nlt/profile.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

// Scale-independent description of one experiment: physics plus the
// discretization knobs of both solvers.
struct Scenario {
  double a = 0.0;
  double b = 1.0;
  double eta = 0.5;
  Kernel kernel;
  VelocityModel velocity;
  PiecewiseConstant rho0;
  PiecewiseConstant omega0;
  double vbar = 0.5;
  double t_end = 1.0;
  int n_cars = 101;  // total vehicles including the leader
  double dx = 0.01;
  std::vector<double> output_times;

  void validate() const;
};

bool same_physics(Scenario const& lhs, Scenario const& rhs);

}  // namespace nlt
