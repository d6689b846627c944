#include "nlt/cli.hpp"

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlt/config.hpp"
#include "nlt/micro.hpp"
#include "nlt/presets.hpp"
#include "nlt/run.hpp"

namespace nlt {

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::string scale;
  std::string kernel;
  bool plots = false;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "path to a JSON scenario config");
  cmd->add_option("--preset", a.preset, "built-in preset name (see preset-list)");
  cmd->add_option("--out-dir", a.out_dir, "output directory (default out/<name>)");
  cmd->add_option("--scale", a.scale, "override scale: micro | macro | both");
  cmd->add_option("--kernel", a.kernel, "override kernel: const | lin | lin2 | conc | conv");
  cmd->add_flag("--plots", a.plots, "emit SVG plots next to the CSVs");
  cmd->add_flag("--strict", a.strict, "exit 4 when an applicable certificate fails");
}

ScenarioConfig resolve_config(CommonArgs const& a) {
  if (a.config_path.empty() == a.preset.empty())
    throw ConfigError("provide exactly one of --config or --preset");
  ScenarioConfig cfg =
      a.config_path.empty() ? preset_config(a.preset) : load_config(a.config_path);
  if (!a.scale.empty()) cfg.scale = scale_from_name(a.scale);
  if (!a.kernel.empty()) cfg.kernel = a.kernel;
  return cfg;
}

RunOptions resolve_options(CommonArgs const& a, ScenarioConfig const& cfg) {
  RunOptions opt;
  opt.out_dir = a.out_dir.empty() ? std::filesystem::path("out") / cfg.name
                                  : std::filesystem::path(a.out_dir);
  opt.make_plots = a.plots;
  opt.strict = a.strict;
  return opt;
}

std::vector<double> split_reals(std::string const& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t const comma = text.find(',', pos);
    std::string const item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) out.push_back(parse_real(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty list: '" + text + "'");
  return out;
}

std::vector<int> split_ints(std::string const& text) {
  std::vector<int> out;
  for (double v : split_reals(text)) {
    int const i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw ConfigError("expected integers: '" + text + "'");
    out.push_back(i);
  }
  return out;
}

}  // namespace

int cli_main(int argc, char const* const* argv) {
  CLI::App app{"two-scale nonlocal second-order traffic workbench"};
  app.require_subcommand(1);

  CommonArgs sim_args, cmp_args, cert_args, sweep_args;
  CLI::App* simulate = app.add_subcommand("simulate", "run the configured scale(s), emit CSVs");
  add_common(simulate, sim_args);
  CLI::App* compare = app.add_subcommand("compare", "run both scales and emit the L1 comparison");
  add_common(compare, cmp_args);
  CLI::App* certify_cmd =
      app.add_subcommand("certify", "run and evaluate the theorem certificates only");
  add_common(certify_cmd, cert_args);
  CLI::App* sweep = app.add_subcommand("sweep", "micro-macro convergence study");
  add_common(sweep, sweep_args);
  std::string n_list_text, dx_list_text, t_eval_text;
  sweep->add_option("--n-list", n_list_text, "comma-separated vehicle counts");
  sweep->add_option("--dx-list", dx_list_text, "comma-separated cell widths");
  sweep->add_option("--t-eval", t_eval_text, "comparison time (default: first output time)");
  CLI::App* plist = app.add_subcommand("preset-list", "list built-in presets");

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (plist->parsed()) {
      for (std::string_view name : preset_names()) {
        ScenarioConfig const c = preset_config(name);
        char line[160];
        std::snprintf(line, sizeof line,
                      "%-16s %-6s domain [%g, %g]  eta=%g  kernel=%-5s  n_cars=%d  dx=%g  t_end=%g",
                      c.name.c_str(), std::string(scale_name(c.scale)).c_str(), c.a, c.b, c.eta,
                      c.kernel.c_str(), c.n_cars, c.dx, c.t_end);
        std::cout << line << "\n";
      }
      return 0;
    }

    CommonArgs const& args = simulate->parsed()  ? sim_args
                             : compare->parsed() ? cmp_args
                             : certify_cmd->parsed() ? cert_args
                                                     : sweep_args;
    ScenarioConfig cfg = resolve_config(args);
    if (compare->parsed()) cfg.scale = Scale::both;
    RunOptions opt = resolve_options(args, cfg);

    RunResult result;
    if (sweep->parsed()) {
      std::vector<int> n_list;
      if (!n_list_text.empty()) {
        n_list = split_ints(n_list_text);
      } else {
        int const gaps = cfg.n_cars - 1;
        n_list = {gaps / 4 + 1, gaps / 2 + 1, cfg.n_cars};
      }
      std::vector<double> const dx_list =
          dx_list_text.empty() ? std::vector<double>{cfg.dx} : split_reals(dx_list_text);
      double t_eval;
      if (!t_eval_text.empty()) {
        t_eval = parse_real(t_eval_text);
      } else if (!cfg.output_times.empty()) {
        t_eval = *std::min_element(cfg.output_times.begin(), cfg.output_times.end());
      } else {
        t_eval = cfg.t_end;
      }
      result = run_sweep(cfg, n_list, dx_list, t_eval, opt);
    } else {
      if (certify_cmd->parsed()) {
        opt.emit_snapshots = false;
        opt.emit_comparison = false;
      }
      result = run(cfg, opt);
    }
    if (!result.message.empty()) std::cerr << result.message << "\n";
    for (std::string const& f : result.files) std::cout << (opt.out_dir / f).string() << "\n";
    return result.exit_code;
  } catch (ConfigError const& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (SolverError const& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nlt
