#include "nlt/macro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlt {

namespace {

constexpr double kTimeTol = 1e-12;

std::vector<double> merged_event_times(double t_end, std::span<double const> output_times,
                                       int diagnostic_samples) {
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(diagnostic_samples) + output_times.size() + 2);
  for (int k = 0; k <= diagnostic_samples; ++k)
    ts.push_back(t_end * static_cast<double>(k) / static_cast<double>(diagnostic_samples));
  for (double t : output_times) ts.push_back(t);
  ts.push_back(0.0);
  ts.push_back(t_end);
  std::sort(ts.begin(), ts.end());
  std::vector<double> out;
  for (double t : ts)
    if (out.empty() || t - out.back() > kTimeTol) out.push_back(t);
  return out;
}

// Markers q/rho with vacuum cells inheriting the nearest downstream marker.
std::vector<double> filled_omega(std::span<double const> rho, std::span<double const> q,
                                 double omega_b) {
  std::vector<double> om(rho.size());
  double fill = omega_b;
  for (std::size_t j = rho.size(); j-- > 0;) {
    if (rho[j] >= kVacuumEps) {
      om[j] = q[j] / rho[j];
      fill = om[j];
    } else {
      om[j] = fill;
    }
  }
  return om;
}

double alpha_core(double x_left, double dx, std::span<double const> rho, double beta, double eta,
                  double c) {
  int const n = static_cast<int>(rho.size());
  double const lo = beta - eta;
  int jb = static_cast<int>(std::floor((beta - x_left) / dx));
  jb = std::min(jb, n - 1);
  double cum = 0.0;
  for (int j = jb; j >= 0; --j) {
    double const lj = std::max(x_left + dx * static_cast<double>(j), lo);
    double const rj = std::min(x_left + dx * static_cast<double>(j + 1), beta);
    double const width = rj - lj;
    if (width <= 0.0) continue;
    double const seg = rho[static_cast<std::size_t>(j)] * width;
    if (cum + seg >= c) {
      double const need = c - cum;
      if (need <= 0.0 || rho[static_cast<std::size_t>(j)] <= 0.0) return rj;
      return std::max(rj - need / rho[static_cast<std::size_t>(j)], lo);
    }
    cum += seg;
    if (lj <= lo) break;
  }
  if (cum >= c - 1e-9 * std::max(c, 1.0)) return lo;  // the exactly-minimal window
  throw std::logic_error("alpha: window mass below c_rho");
}

double lyapunov_core(MacroScenario const& sc, double x_left, double dx,
                     std::span<double const> rho, std::span<double const> q, double beta,
                     double alpha_pos) {
  std::vector<double> const om = filled_omega(rho, q, sc.omega_b());
  double sum = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    double const lj = std::max(x_left + dx * static_cast<double>(j), alpha_pos);
    double const rj = std::min(x_left + dx * static_cast<double>(j + 1), beta);
    double const width = rj - lj;
    if (width <= 0.0) continue;
    double const rho_eq = sc.velocity.equilibrium_density(sc.vbar, std::max(om[j], sc.vbar));
    double const dev = rho[j] - rho_eq;
    sum += dev * dev * width;
  }
  return sum;
}

}  // namespace

void MacroScenario::validate() const {
  rho0.validate();
  omega0.validate();
  if (!(eta > 0.0)) throw std::invalid_argument("macro scenario: eta must be positive");
  if (!(b > a + eta)) throw std::invalid_argument("macro scenario: need b > a + eta");
  if (kernel.eta != eta) throw std::invalid_argument("macro scenario: kernel eta mismatch");
  if (rho0.a() != a || rho0.b() != b)
    throw std::invalid_argument("macro scenario: rho0 must cover [a, b]");
  if (omega0.a() != a || omega0.b() != b)
    throw std::invalid_argument("macro scenario: omega0 must cover [a, b]");
  for (double v : rho0.vals)
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("macro scenario: rho0 outside [0, 1]");
  for (double w : omega0.vals)
    if (!(w > 0.0)) throw std::invalid_argument("macro scenario: omega0 must be positive");
  if (!(vbar > 0.0) || !(vbar <= omega0.min_value()))
    throw std::invalid_argument("macro scenario: need 0 < vbar <= min omega0");
  if (!(dx > 0.0)) throw std::invalid_argument("macro scenario: dx must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("macro scenario: t_end must be positive");
}

MacroState const& MacroTrajectory::at(double t) const {
  for (MacroState const& s : samples)
    if (std::abs(s.t - t) <= 1e-9) return s;
  throw std::invalid_argument("macro trajectory: no snapshot stored near requested time");
}

MacroScenario macro_from(Scenario const& s) {
  s.validate();
  MacroScenario sc;
  sc.a = s.a;
  sc.b = s.b;
  sc.dx = s.dx;
  sc.eta = s.eta;
  sc.kernel = s.kernel;
  sc.velocity = s.velocity;
  sc.rho0 = s.rho0;
  sc.omega0 = s.omega0;
  sc.vbar = s.vbar;
  sc.t_end = s.t_end;
  sc.validate();
  return sc;
}

MacroState init_grid(MacroScenario const& sc) {
  sc.validate();
  double const x_left = sc.a - sc.eta;
  double const x_right = sc.b + sc.vbar * sc.t_end + sc.eta;
  int const n = static_cast<int>(std::ceil((x_right - x_left) / sc.dx - 1e-9));
  double const grid_right = x_left + sc.dx * static_cast<double>(n);

  // extended initial data: vacuum left of a, boundary equilibrium right of b
  PiecewiseConstant rho_ext;
  rho_ext.xs.push_back(x_left);
  rho_ext.vals.push_back(0.0);
  for (std::size_t m = 0; m < sc.rho0.vals.size(); ++m) {
    rho_ext.xs.push_back(sc.rho0.xs[m]);
    rho_ext.vals.push_back(sc.rho0.vals[m]);
  }
  rho_ext.xs.push_back(sc.b);
  rho_ext.vals.push_back(sc.rho_b());
  rho_ext.xs.push_back(grid_right + sc.dx);

  std::vector<double> cuts;
  for (double x : sc.rho0.xs) cuts.push_back(x);
  for (double x : sc.omega0.xs) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  PiecewiseConstant q_ext;
  q_ext.xs.push_back(x_left);
  q_ext.vals.push_back(0.0);
  for (std::size_t m = 0; m + 1 < cuts.size(); ++m) {
    double const mid = 0.5 * (cuts[m] + cuts[m + 1]);
    q_ext.xs.push_back(cuts[m]);
    q_ext.vals.push_back(sc.rho0.value_at(mid) * sc.omega0.value_at(mid));
  }
  q_ext.xs.push_back(sc.b);
  q_ext.vals.push_back(sc.rho_b() * sc.omega_b());
  q_ext.xs.push_back(grid_right + sc.dx);

  MacroState st;
  st.t = 0.0;
  st.x_left = x_left;
  st.dx = sc.dx;
  st.rho.resize(static_cast<std::size_t>(n));
  st.q.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double const le = st.left_edge(j);
    double const re = st.left_edge(j + 1);
    st.rho[static_cast<std::size_t>(j)] = rho_ext.integral(le, re) / sc.dx;
    st.q[static_cast<std::size_t>(j)] = q_ext.integral(le, re) / sc.dx;
  }
  return st;
}

std::vector<double> nonlocal_velocity(MacroScenario const& sc, MacroState const& st,
                                      std::span<double const> weights) {
  std::size_t const n = st.rho.size();
  std::size_t const K = weights.size();
  std::vector<double> v_ext(n + K);
  double fill = sc.omega_b();
  for (std::size_t j = n; j-- > 0;) {
    double om;
    if (st.rho[j] >= kVacuumEps) {
      om = st.q[j] / st.rho[j];
      fill = om;
    } else {
      om = fill;
    }
    v_ext[j] = sc.velocity.speed(st.rho[j], om);
  }
  double const v_boundary = sc.velocity.speed(sc.rho_b(), sc.omega_b());
  for (std::size_t j = n; j < n + K; ++j) v_ext[j] = v_boundary;

  std::vector<double> V(n);
  double const* w = weights.data();
  for (std::size_t j = 0; j < n; ++j) {
    double const* vv = v_ext.data() + j + 1;
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += w[k] * vv[k];
    V[j] = s;
  }
  return V;
}

StepInfo step_raw(MacroScenario const&, MacroState& st, std::span<double const> v, double dt) {
  std::size_t const n = st.rho.size();
  double const lambda = dt / st.dx;
  std::vector<double> fr(n), fq(n);
  for (std::size_t j = 0; j < n; ++j) {
    // vacuum cells carry no flux; without this, sub-threshold residues can
    // drain negative when the step exceeds their (meaningless) local CFL
    if (st.rho[j] < kVacuumEps) {
      fr[j] = 0.0;
      fq[j] = 0.0;
    } else {
      fr[j] = v[j] * st.rho[j];
      fq[j] = v[j] * st.q[j];
    }
  }
  StepInfo info;
  info.dt = dt;
  info.flux_out_rho = fr[n - 1];
  info.flux_out_q = fq[n - 1];
  for (std::size_t j = n; j-- > 1;) {
    st.rho[j] -= lambda * (fr[j] - fr[j - 1]);
    st.q[j] -= lambda * (fq[j] - fq[j - 1]);
  }
  st.rho[0] -= lambda * fr[0];
  st.q[0] -= lambda * fq[0];
  for (std::size_t j = 0; j < n; ++j)
    if (st.rho[j] < -1e-12)
      throw SolverError("macro step: negative density (CFL violation)", st.t, st.rho);
  st.t += dt;
  return info;
}

namespace {

void clamp_beyond_beta(MacroScenario const& sc, MacroState& st) {
  double const beta = sc.beta(st.t);
  int const n = st.cells();
  // the Dirichlet data covers every cell touched by [beta, inf), including the
  // one beta falls inside
  int j = static_cast<int>(std::floor((beta - st.x_left) / st.dx + 1e-9));
  j = std::max(j, 0);
  double const rb = sc.rho_b();
  double const qb = rb * sc.omega_b();
  for (; j < n; ++j) {
    st.rho[static_cast<std::size_t>(j)] = rb;
    st.q[static_cast<std::size_t>(j)] = qb;
  }
}

}  // namespace

namespace {

// CFL speed: the fastest velocity among cells that actually carry mass.  The
// fill velocity of vacuum cells is a convention and their flux is zero, so
// they impose no positivity constraint on the step.
double cfl_speed(MacroState const& st, std::vector<double> const& V) {
  double vmax = 0.0;
  for (std::size_t j = 0; j < V.size(); ++j)
    if (st.rho[j] >= kVacuumEps) vmax = std::max(vmax, V[j]);
  return vmax;
}

}  // namespace

StepInfo step(MacroScenario const& sc, MacroState& st, std::span<double const> weights,
              double dt_cap) {
  std::vector<double> const V = nonlocal_velocity(sc, st, weights);
  double const vmax = cfl_speed(st, V);
  if (!(vmax > 0.0)) throw SolverError("macro step: nonpositive maximal velocity", st.t, st.rho);
  double const dt = std::min(st.dx / vmax, dt_cap);
  StepInfo const info = step_raw(sc, st, V, dt);
  clamp_beyond_beta(sc, st);
  return info;
}

MacroTrajectory integrate(MacroScenario const& sc, std::span<double const> output_times,
                          MacroIntegrateOptions const& opt) {
  sc.validate();
  for (double t : output_times)
    if (t < 0.0 || t > sc.t_end + kTimeTol)
      throw std::invalid_argument("macro integrate: output time outside [0, t_end]");

  MacroTrajectory tr;
  tr.scenario = sc;
  tr.requested.assign(output_times.begin(), output_times.end());
  std::sort(tr.requested.begin(), tr.requested.end());

  std::vector<double> const events =
      merged_event_times(sc.t_end, output_times, std::max(1, opt.diagnostic_samples));

  MacroState st = init_grid(sc);
  std::vector<double> const w = weights_macro(sc.kernel, sc.dx);
  int const n = st.cells();

  auto window_range = [&](double beta) {
    int jlo = static_cast<int>(std::floor((beta - sc.eta - st.x_left) / st.dx)) - 2;
    int jhi = static_cast<int>(std::floor((beta - st.x_left) / st.dx)) + 1;
    jlo = std::clamp(jlo, 0, n - 1);
    jhi = std::clamp(jhi, jlo, n - 1);
    return std::pair<int, int>{jlo, jhi};
  };
  auto capture_window = [&]() {
    double const beta = sc.beta(st.t);
    auto const [jlo, jhi] = window_range(beta);
    MacroWindow win;
    win.t = st.t;
    win.beta = beta;
    win.x_left = st.left_edge(jlo);
    win.dx = st.dx;
    win.rho.assign(st.rho.begin() + jlo, st.rho.begin() + jhi + 1);
    win.q.assign(st.q.begin() + jlo, st.q.begin() + jhi + 1);
    tr.windows.push_back(std::move(win));
  };

  std::size_t next_event = 0;
  std::size_t next_request = 0;
  while (true) {
    while (next_event < events.size() && events[next_event] <= st.t + kTimeTol) {
      capture_window();
      while (next_request < tr.requested.size() &&
             tr.requested[next_request] <= st.t + kTimeTol) {
        tr.samples.push_back(st);
        ++next_request;
      }
      ++next_event;
    }
    if (st.t >= sc.t_end - kTimeTol) break;

    std::vector<double> const V = nonlocal_velocity(sc, st, w);
    double const vmax = cfl_speed(st, V);
    if (!(vmax > 0.0))
      throw SolverError("macro integrate: nonpositive maximal velocity", st.t, st.rho);
    double const dt_cap = events[next_event] - st.t;
    double const dt = std::min(opt.cfl * st.dx / vmax, dt_cap);

    double const beta = sc.beta(st.t);
    tr.records.push_back({st.t, dt, window_mass(st, beta - sc.eta, beta), beta});
    if (opt.record_v_each_step) {
      auto const [jlo, jhi] = window_range(beta);
      MacroVSlice slice;
      slice.t = st.t;
      slice.dt = dt;
      slice.x_left = st.left_edge(jlo);
      slice.dx = st.dx;
      slice.v.assign(V.begin() + jlo, V.begin() + jhi + 1);
      tr.vslices.push_back(std::move(slice));
    }

    step_raw(sc, st, V, dt);
    if (std::abs(st.t - events[next_event]) <= kTimeTol) st.t = events[next_event];
    clamp_beyond_beta(sc, st);
  }
  double const beta_end = sc.beta(st.t);
  tr.records.push_back({st.t, 0.0, window_mass(st, beta_end - sc.eta, beta_end), beta_end});
  return tr;
}

double window_mass(MacroState const& st, double lo, double hi) {
  int const n = st.cells();
  lo = std::max(lo, st.x_left);
  hi = std::min(hi, st.left_edge(n));
  if (!(hi > lo)) return 0.0;
  int const jlo = std::clamp(static_cast<int>(std::floor((lo - st.x_left) / st.dx)), 0, n - 1);
  int const jhi = std::clamp(static_cast<int>(std::floor((hi - st.x_left) / st.dx)), 0, n - 1);
  double sum = 0.0;
  for (int j = jlo; j <= jhi; ++j) {
    double const l = std::max(lo, st.left_edge(j));
    double const r = std::min(hi, st.left_edge(j + 1));
    if (r > l) sum += st.rho[static_cast<std::size_t>(j)] * (r - l);
  }
  return sum;
}

double c_rho(MacroTrajectory const& tr) {
  if (tr.records.empty()) throw std::invalid_argument("c_rho: empty trajectory");
  double m = std::numeric_limits<double>::infinity();
  for (MacroStepRecord const& r : tr.records) m = std::min(m, r.window_mass);
  return m;
}

double alpha(MacroScenario const& sc, MacroState const& st, double c) {
  return alpha_core(st.x_left, st.dx, st.rho, sc.beta(st.t), sc.eta, c);
}

double alpha_window(MacroWindow const& win, double eta, double c) {
  return alpha_core(win.x_left, win.dx, win.rho, win.beta, eta, c);
}

double lyapunov_macro(MacroScenario const& sc, MacroState const& st, double alpha_pos) {
  return lyapunov_core(sc, st.x_left, st.dx, st.rho, st.q, sc.beta(st.t), alpha_pos);
}

double lyapunov_window(MacroScenario const& sc, MacroWindow const& win, double alpha_pos) {
  return lyapunov_core(sc, win.x_left, win.dx, win.rho, win.q, win.beta, alpha_pos);
}

std::vector<double> equilibrium_field(MacroScenario const& sc, MacroState const& st) {
  std::vector<double> const om = filled_omega(st.rho, st.q, sc.omega_b());
  std::vector<double> eq(om.size());
  for (std::size_t j = 0; j < om.size(); ++j)
    eq[j] = sc.velocity.equilibrium_density(sc.vbar, std::max(om[j], sc.vbar));
  return eq;
}

Theorem4Hypotheses theorem4_hypotheses(MacroScenario const& sc) {
  Theorem4Hypotheses h;
  h.constant_kernel = sc.kernel.family == KernelFamily::Constant;
  h.concave = sc.kernel.is_concave();
  double const lo = sc.b - sc.eta;

  double om_lo = std::numeric_limits<double>::infinity();
  double om_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < sc.omega0.vals.size(); ++m) {
    if (sc.omega0.xs[m + 1] <= lo) continue;
    om_lo = std::min(om_lo, sc.omega0.vals[m]);
    om_hi = std::max(om_hi, sc.omega0.vals[m]);
  }
  h.uniform_omega_tail = om_hi - om_lo <= 1e-12;

  if (h.uniform_omega_tail) {
    double const rho_eq = sc.velocity.equilibrium_density(sc.vbar, om_lo);
    bool below = true, above = true, nondec = true, noninc = true;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t m = 0; m < sc.rho0.vals.size(); ++m) {
      if (sc.rho0.xs[m + 1] <= lo) continue;
      double const r = sc.rho0.vals[m];
      if (r > rho_eq + 1e-12) below = false;
      if (r < rho_eq - 1e-12) above = false;
      if (!std::isnan(prev)) {
        if (r < prev - 1e-12) nondec = false;
        if (r > prev + 1e-12) noninc = false;
      }
      prev = r;
    }
    h.monotone_consistent = (below && nondec) || (above && noninc);
  }
  return h;
}

double rho_min_macro(MacroScenario const& sc, double alpha0) {
  double const lo = std::max(alpha0, sc.a);
  double const hi = sc.b;
  std::vector<double> cuts{lo, hi};
  for (double x : sc.rho0.xs)
    if (x > lo && x < hi) cuts.push_back(x);
  for (double x : sc.omega0.xs)
    if (x > lo && x < hi) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double const mid = 0.5 * (cuts[k] + cuts[k + 1]);
    m = std::min(m, sc.rho0.value_at(mid));
    m = std::min(m, sc.velocity.equilibrium_density(sc.vbar, sc.omega0.value_at(mid)));
  }
  return m;
}

namespace {

double slice_interp(MacroVSlice const& s, double x) {
  std::size_t const m = s.v.size();
  if (m == 1) return s.v[0];
  double const u = (x - (s.x_left + 0.5 * s.dx)) / s.dx;
  double const uc = std::clamp(u, 0.0, static_cast<double>(m - 1));
  std::size_t const j0 = std::min(static_cast<std::size_t>(uc), m - 2);
  double const th = uc - static_cast<double>(j0);
  return s.v[j0] * (1.0 - th) + s.v[j0 + 1] * th;
}

}  // namespace

MacroDiagnostics macro_diagnostics(MacroTrajectory const& tr) {
  MacroScenario const& sc = tr.scenario;
  MacroDiagnostics d;
  d.c_rho = c_rho(tr);
  d.t4 = theorem4_hypotheses(sc);

  d.t.reserve(tr.windows.size());
  d.alpha.reserve(tr.windows.size());
  d.beta.reserve(tr.windows.size());
  d.L.reserve(tr.windows.size());
  for (MacroWindow const& win : tr.windows) {
    double const a_pos = alpha_window(win, sc.eta, d.c_rho);
    d.t.push_back(win.t);
    d.alpha.push_back(a_pos);
    d.beta.push_back(win.beta);
    d.L.push_back(lyapunov_window(sc, win, a_pos));
  }
  if (d.L.empty()) throw std::invalid_argument("macro diagnostics: no windows recorded");
  d.L0 = d.L.front();
  d.rho_min = rho_min_macro(sc, d.alpha.front());

  double const vp = sc.velocity.vprime_max(sc.omega0.vals);
  d.bound_applicable = d.t4.holds();
  d.bound_case = d.t4.case_name();
  double const nan = std::numeric_limits<double>::quiet_NaN();
  d.bound.resize(d.t.size(), nan);
  if (d.bound_applicable) {
    if (d.t4.constant_kernel) {
      for (std::size_t k = 0; k < d.t.size(); ++k)
        d.bound[k] = d.L0 * std::exp((2.0 / sc.eta) * vp * d.rho_min * d.t[k]);
    } else {
      double integral = 0.0;
      d.bound[0] = d.L0;
      for (std::size_t k = 1; k < d.t.size(); ++k) {
        double const w0 = sc.kernel.eval(d.beta[k - 1] - d.alpha[k - 1]);
        double const w1 = sc.kernel.eval(d.beta[k] - d.alpha[k]);
        integral += 0.5 * (w0 + w1) * (d.t[k] - d.t[k - 1]);
        d.bound[k] = d.L0 * std::exp(2.0 * vp * d.rho_min * integral);
      }
    }
  }

  if (!tr.vslices.empty()) {
    double a_ode = d.alpha.front();
    double dev = 0.0;
    std::size_t wi = 0;
    for (MacroVSlice const& s : tr.vslices) {
      while (wi < tr.windows.size() && tr.windows[wi].t <= s.t + kTimeTol) {
        dev = std::max(dev, std::abs(a_ode - d.alpha[wi]));
        ++wi;
      }
      a_ode += s.dt * slice_interp(s, a_ode);
    }
    while (wi < tr.windows.size()) {
      dev = std::max(dev, std::abs(a_ode - d.alpha[wi]));
      ++wi;
    }
    d.alpha_ode_max_dev = dev;
  }
  return d;
}

}  // namespace nlt
