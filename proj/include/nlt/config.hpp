#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nlt/scenario.hpp"

namespace nlt {

enum class Scale { micro, macro, both };

std::string_view scale_name(Scale s);
Scale scale_from_name(std::string_view name);

enum class IndexPolicy { J, bulk, custom };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One experiment as read from disk: physics, discretization, outputs, and
// solver knobs.  Profiles are lists of (breakpoint, value) pairs; the first
// breakpoint must equal a and the last piece extends to b.
struct ScenarioConfig {
  std::string name = "scenario";
  Scale scale = Scale::both;
  double a = 0.0;
  double b = 0.0;
  double eta = 0.0;
  int n_cars = 0;
  double dx = 0.0;
  std::string kernel = "const";
  std::string velocity_family = "greenshields";
  double vbar = 0.0;
  double t_end = 0.0;
  std::vector<double> output_times;
  std::vector<std::pair<double, double>> rho0;
  std::vector<std::pair<double, double>> omega0;
  IndexPolicy index_policy = IndexPolicy::J;
  std::vector<int> custom_indices;
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  int diagnostic_samples = 400;

  Scenario to_scenario() const;
};

// Decimal ("0.625") or exact rational ("5/8").
double parse_real(std::string_view text);
double parse_real(nlohmann::json const& v, std::string_view field);

ScenarioConfig config_from_json(nlohmann::json const& j);
nlohmann::json to_json(ScenarioConfig const& c);

// Parse errors carry the line/column info of the underlying JSON reader;
// schema errors name the offending field.
ScenarioConfig load_config(std::filesystem::path const& path);

}  // namespace nlt
