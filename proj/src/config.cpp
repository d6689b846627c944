#include "nlt/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "nlt/kernels.hpp"
#include "nlt/velocity.hpp"

namespace nlt {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_decimal(std::string_view s) {
  std::string const tmp(s);
  char* end = nullptr;
  double const v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw ConfigError("not a number: '" + tmp + "'");
  return v;
}

json const& require(json const& j, char const* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing field '") + key + "'");
  return *it;
}

int parse_int(json const& v, std::string_view field) {
  if (!v.is_number_integer())
    throw ConfigError("field '" + std::string(field) + "': expected an integer");
  return v.get<int>();
}

std::vector<std::pair<double, double>> parse_pairs(json const& v, std::string_view field) {
  if (!v.is_array() || v.empty())
    throw ConfigError("field '" + std::string(field) +
                      "': expected a nonempty list of [breakpoint, value] pairs");
  std::vector<std::pair<double, double>> out;
  for (json const& e : v) {
    if (!e.is_array() || e.size() != 2)
      throw ConfigError("field '" + std::string(field) + "': each entry must be a pair");
    out.emplace_back(parse_real(e[0], field), parse_real(e[1], field));
  }
  for (std::size_t k = 1; k < out.size(); ++k)
    if (!(out[k].first > out[k - 1].first))
      throw ConfigError("field '" + std::string(field) + "': breakpoints must increase");
  return out;
}

}  // namespace

std::string_view scale_name(Scale s) {
  switch (s) {
    case Scale::micro: return "micro";
    case Scale::macro: return "macro";
    case Scale::both: return "both";
  }
  throw std::invalid_argument("scale_name: unknown scale");
}

Scale scale_from_name(std::string_view name) {
  if (name == "micro") return Scale::micro;
  if (name == "macro") return Scale::macro;
  if (name == "both") return Scale::both;
  throw ConfigError("field 'scale': unknown value '" + std::string(name) + "'");
}

double parse_real(std::string_view text) {
  std::string_view const s = trim(text);
  std::size_t const slash = s.find('/');
  if (slash == std::string_view::npos) return parse_decimal(s);
  double const num = parse_decimal(trim(s.substr(0, slash)));
  double const den = parse_decimal(trim(s.substr(slash + 1)));
  if (den == 0.0) throw ConfigError("rational with zero denominator: '" + std::string(text) + "'");
  return num / den;
}

double parse_real(nlohmann::json const& v, std::string_view field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_real(v.get<std::string>());
    } catch (ConfigError const& e) {
      throw ConfigError("field '" + std::string(field) + "': " + e.what());
    }
  }
  throw ConfigError("field '" + std::string(field) + "': expected a number or rational string");
}

ScenarioConfig config_from_json(nlohmann::json const& j) {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  static constexpr std::string_view known[] = {
      "name",   "scale",        "domain", "eta",          "kernel",
      "velocity", "vbar",       "t_end",  "n_cars",       "dx",
      "output_times", "rho0",   "omega0", "lyapunov_index", "tolerances",
      "diagnostic_samples"};
  for (auto const& [key, value] : j.items()) {
    (void)value;
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw ConfigError("unknown field '" + key + "'");
  }

  ScenarioConfig c;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ConfigError("field 'name': expected a string");
    c.name = j.at("name").get<std::string>();
  }
  if (j.contains("scale")) {
    if (!j.at("scale").is_string()) throw ConfigError("field 'scale': expected a string");
    c.scale = scale_from_name(j.at("scale").get<std::string>());
  }

  json const& dom = require(j, "domain");
  if (!dom.is_object()) throw ConfigError("field 'domain': expected an object {a, b}");
  c.a = parse_real(require(dom, "a"), "domain.a");
  c.b = parse_real(require(dom, "b"), "domain.b");

  c.eta = parse_real(require(j, "eta"), "eta");
  if (!require(j, "kernel").is_string()) throw ConfigError("field 'kernel': expected a string");
  c.kernel = j.at("kernel").get<std::string>();

  if (j.contains("velocity")) {
    json const& vel = j.at("velocity");
    if (vel.is_string()) {
      c.velocity_family = vel.get<std::string>();
    } else if (vel.is_object()) {
      c.velocity_family = require(vel, "family").get<std::string>();
    } else {
      throw ConfigError("field 'velocity': expected a string or an object {family}");
    }
  }

  c.vbar = parse_real(require(j, "vbar"), "vbar");
  c.t_end = parse_real(require(j, "t_end"), "t_end");
  c.n_cars = parse_int(require(j, "n_cars"), "n_cars");
  c.dx = parse_real(require(j, "dx"), "dx");

  if (j.contains("output_times")) {
    json const& ot = j.at("output_times");
    if (!ot.is_array()) throw ConfigError("field 'output_times': expected a list");
    for (json const& e : ot) c.output_times.push_back(parse_real(e, "output_times"));
  }

  c.rho0 = parse_pairs(require(j, "rho0"), "rho0");
  c.omega0 = parse_pairs(require(j, "omega0"), "omega0");

  if (j.contains("lyapunov_index")) {
    json const& li = j.at("lyapunov_index");
    if (li.is_string()) {
      std::string const p = li.get<std::string>();
      if (p == "J") {
        c.index_policy = IndexPolicy::J;
      } else if (p == "bulk") {
        c.index_policy = IndexPolicy::bulk;
      } else {
        throw ConfigError("field 'lyapunov_index': expected \"J\", \"bulk\", or an index list");
      }
    } else if (li.is_array()) {
      c.index_policy = IndexPolicy::custom;
      for (json const& e : li) c.custom_indices.push_back(parse_int(e, "lyapunov_index"));
      if (c.custom_indices.empty())
        throw ConfigError("field 'lyapunov_index': custom index list must be nonempty");
      std::sort(c.custom_indices.begin(), c.custom_indices.end());
    } else {
      throw ConfigError("field 'lyapunov_index': expected \"J\", \"bulk\", or an index list");
    }
  }

  if (j.contains("tolerances")) {
    json const& tol = j.at("tolerances");
    if (!tol.is_object()) throw ConfigError("field 'tolerances': expected an object");
    if (tol.contains("abs_tol")) c.abs_tol = parse_real(tol.at("abs_tol"), "tolerances.abs_tol");
    if (tol.contains("rel_tol")) c.rel_tol = parse_real(tol.at("rel_tol"), "tolerances.rel_tol");
  }
  if (j.contains("diagnostic_samples"))
    c.diagnostic_samples = parse_int(j.at("diagnostic_samples"), "diagnostic_samples");

  return c;
}

Scenario ScenarioConfig::to_scenario() const {
  Scenario s;
  s.a = a;
  s.b = b;
  s.eta = eta;
  try {
    s.kernel = make_kernel(kernel, eta);
  } catch (std::invalid_argument const& e) {
    throw ConfigError(std::string("field 'kernel': ") + e.what());
  }
  if (velocity_family != "greenshields")
    throw ConfigError("field 'velocity': unknown family '" + velocity_family + "'");
  s.velocity = VelocityModel{};
  s.vbar = vbar;
  s.t_end = t_end;
  s.n_cars = n_cars;
  s.dx = dx;
  s.output_times = output_times;

  auto to_profile = [&](std::vector<std::pair<double, double>> const& pairs,
                        std::string_view field) {
    if (pairs.front().first != a)
      throw ConfigError("field '" + std::string(field) + "': first breakpoint must equal domain.a");
    if (pairs.back().first >= b)
      throw ConfigError("field '" + std::string(field) + "': breakpoints must stay below domain.b");
    PiecewiseConstant p;
    for (auto const& [x, v] : pairs) {
      p.xs.push_back(x);
      p.vals.push_back(v);
    }
    p.xs.push_back(b);
    return p;
  };
  s.rho0 = to_profile(rho0, "rho0");
  s.omega0 = to_profile(omega0, "omega0");

  try {
    s.validate();
  } catch (std::invalid_argument const& e) {
    throw ConfigError(e.what());
  }

  if (index_policy == IndexPolicy::custom) {
    for (int i : custom_indices)
      if (i < 0 || i >= n_cars - 1)
        throw ConfigError("field 'lyapunov_index': index outside [0, n_cars - 2]");
  }
  return s;
}

nlohmann::json to_json(ScenarioConfig const& c) {
  json j;
  j["name"] = c.name;
  j["scale"] = std::string(scale_name(c.scale));
  j["domain"] = {{"a", c.a}, {"b", c.b}};
  j["eta"] = c.eta;
  j["kernel"] = c.kernel;
  j["velocity"] = {{"family", c.velocity_family}};
  j["vbar"] = c.vbar;
  j["t_end"] = c.t_end;
  j["n_cars"] = c.n_cars;
  j["dx"] = c.dx;
  j["output_times"] = c.output_times;
  auto pairs_json = [](std::vector<std::pair<double, double>> const& pairs) {
    json out = json::array();
    for (auto const& [x, v] : pairs) out.push_back({x, v});
    return out;
  };
  j["rho0"] = pairs_json(c.rho0);
  j["omega0"] = pairs_json(c.omega0);
  switch (c.index_policy) {
    case IndexPolicy::J: j["lyapunov_index"] = "J"; break;
    case IndexPolicy::bulk: j["lyapunov_index"] = "bulk"; break;
    case IndexPolicy::custom: j["lyapunov_index"] = c.custom_indices; break;
  }
  j["tolerances"] = {{"abs_tol", c.abs_tol}, {"rel_tol", c.rel_tol}};
  j["diagnostic_samples"] = c.diagnostic_samples;
  return j;
}

ScenarioConfig load_config(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (json::parse_error const& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace nlt
