#include "nlt/presets.hpp"

namespace nlt {

std::vector<std::string_view> preset_names() {
  return {"fig1_fig2", "fig3_lowdensity", "fig4_threestate"};
}

ScenarioConfig preset_config(std::string_view name) {
  ScenarioConfig c;
  c.name = std::string(name);
  if (name == "fig1_fig2") {
    c.scale = Scale::both;
    c.a = -1.5;
    c.b = 1.5;
    c.eta = 0.5;
    c.n_cars = 501;
    c.dx = 2.5e-3;
    c.kernel = "const";
    c.vbar = 0.5;
    c.t_end = 20.0;
    c.output_times = {1.0, 2.25, 5.0, 20.0};
    c.rho0 = {{-1.5, 0.5}, {0.0, 0.3}};
    c.omega0 = {{-1.5, 1.0}, {0.0, 0.625}};
    return c;
  }
  if (name == "fig3_lowdensity") {
    c.scale = Scale::micro;
    c.a = -1.5;
    c.b = 1.5;
    c.eta = 0.5;
    c.n_cars = 501;
    c.dx = 2.5e-3;
    c.kernel = "const";
    c.vbar = 0.5;
    c.t_end = 10.0;
    c.output_times = {1.0, 5.0, 10.0};
    c.rho0 = {{-1.5, 0.5}, {0.0, 0.025}, {0.75, 0.05}};
    c.omega0 = {{-1.5, 1.0}, {0.0, 0.625}};
    return c;
  }
  if (name == "fig4_threestate") {
    c.scale = Scale::both;
    c.a = -5.0;
    c.b = 1.0;
    c.eta = 2.0;
    c.n_cars = 501;
    c.dx = 2.5e-3;
    c.kernel = "lin2";
    c.vbar = 0.5;
    c.t_end = 20.0;
    c.output_times = {1.0, 5.0, 20.0};
    c.rho0 = {{-5.0, 0.5}, {0.0, 0.3}, {0.5, 0.4}};
    c.omega0 = {{-5.0, 1.0}, {0.0, 0.625}, {0.5, 0.75}};
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace nlt
