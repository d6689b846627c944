#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlt/config.hpp"

namespace nlt {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  bool make_plots = false;
  bool strict = false;       // applicable-but-failed certificates set exit code 4
  bool emit_snapshots = true;
  bool emit_comparison = true;
};

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> files;  // emitted names, relative to out_dir, in order
  std::string message;
};

// Executes the configured scale(s); writes the resolved config, snapshot and
// Lyapunov CSVs, certificate reports, optional plots, and on solver failure a
// machine-readable error.json (exit code 3).
RunResult run(ScenarioConfig const& cfg, RunOptions const& opt);

RunResult run_sweep(ScenarioConfig const& cfg, std::vector<int> const& n_list,
                    std::vector<double> const& dx_list, double t_eval, RunOptions const& opt);

}  // namespace nlt
