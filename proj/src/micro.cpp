#include "nlt/micro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nlt {

namespace {

constexpr double kSampleTol = 1e-9;

std::vector<double> merged_sample_times(double t_end, std::span<double const> output_times,
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
    if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
  return out;
}

}  // namespace

void MicroScenario::validate() const {
  if (x0.size() < 2) throw std::invalid_argument("micro scenario: need at least two cars");
  if (omegas.size() + 1 != x0.size())
    throw std::invalid_argument("micro scenario: need one marker per follower");
  for (std::size_t i = 1; i < x0.size(); ++i)
    if (!(x0[i] > x0[i - 1]))
      throw std::invalid_argument("micro scenario: initial positions not strictly increasing");
  double omega_min = std::numeric_limits<double>::infinity();
  for (double w : omegas) {
    if (!(w > 0.0)) throw std::invalid_argument("micro scenario: markers must be positive");
    omega_min = std::min(omega_min, w);
  }
  if (!(vbar > 0.0) || !(vbar <= omega_min))
    throw std::invalid_argument("micro scenario: need 0 < vbar <= min omega");
  if (!(eta > 0.0)) throw std::invalid_argument("micro scenario: eta must be positive");
  if (!(ell > 0.0)) throw std::invalid_argument("micro scenario: ell must be positive");
}

MicroState const& MicroTrajectory::at(double t) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](MicroState const& s, double v) { return s.t < v; });
  MicroState const* best = nullptr;
  if (it != samples.end()) best = &*it;
  if (it != samples.begin() && (best == nullptr || std::abs((it - 1)->t - t) < std::abs(best->t - t)))
    best = &*(it - 1);
  if (best == nullptr || std::abs(best->t - t) > kSampleTol)
    throw std::invalid_argument("trajectory: no sample stored near requested time");
  return *best;
}

std::pair<std::vector<double>, double> place_cars(PiecewiseConstant const& rho0, int n_cars) {
  rho0.validate();
  if (n_cars < 2) throw std::invalid_argument("place_cars: need at least two cars");
  for (double v : rho0.vals)
    if (!(v > 0.0)) throw std::domain_error("place_cars: density must be positive on its support");
  int const n_gaps = n_cars - 1;
  std::size_t const pieces = rho0.vals.size();
  std::vector<double> cum(pieces + 1, 0.0);
  for (std::size_t m = 0; m < pieces; ++m)
    cum[m + 1] = cum[m] + rho0.vals[m] * (rho0.xs[m + 1] - rho0.xs[m]);
  double const mass = cum.back();
  if (!(mass > 0.0)) throw std::domain_error("place_cars: profile has zero mass");

  std::vector<double> x(static_cast<std::size_t>(n_cars));
  x.front() = rho0.a();
  x.back() = rho0.b();
  std::size_t m = 0;
  for (int k = 1; k < n_gaps; ++k) {
    double const target = mass * static_cast<double>(k) / static_cast<double>(n_gaps);
    while (m + 1 < pieces && cum[m + 1] < target) ++m;
    x[static_cast<std::size_t>(k)] = rho0.xs[m] + (target - cum[m]) / rho0.vals[m];
  }
  return {std::move(x), mass / static_cast<double>(n_gaps)};
}

MicroScenario micro_from(Scenario const& s) {
  s.validate();
  MicroScenario sc;
  sc.eta = s.eta;
  sc.kernel = s.kernel;
  sc.velocity = s.velocity;
  sc.vbar = s.vbar;
  auto [x0, ell] = place_cars(s.rho0, s.n_cars);
  sc.x0 = std::move(x0);
  sc.ell = ell;
  sc.omegas.resize(sc.x0.size() - 1);
  // omega_i pairs with the gap density ell/y_i, so sample the marker over the
  // gap interval rather than at the follower position; at a marker contact the
  // follower may sit a hair behind the jump while its gap lies almost entirely
  // beyond it
  for (std::size_t i = 0; i + 1 < sc.x0.size(); ++i)
    sc.omegas[i] = s.omega0.value_at(0.5 * (sc.x0[i] + sc.x0[i + 1]));
  sc.validate();
  return sc;
}

std::vector<double> rhs(MicroScenario const& sc, MicroState const& st) {
  int const leader = sc.leader();
  std::vector<double> f(st.x.size());
  f[static_cast<std::size_t>(leader)] = sc.vbar;

  std::vector<double> v_gap(static_cast<std::size_t>(leader));
  for (int k = 0; k < leader; ++k) {
    double const y = st.x[static_cast<std::size_t>(k) + 1] - st.x[static_cast<std::size_t>(k)];
    if (!(y > 0.0)) throw std::invalid_argument("rhs: positions not strictly increasing");
    v_gap[static_cast<std::size_t>(k)] =
        sc.velocity.speed(sc.ell / y, sc.omegas[static_cast<std::size_t>(k)]);
  }

  Kernel const& kernel = sc.kernel;
  for (int i = 0; i < leader; ++i) {
    double acc = 0.0;
    double sum = 0.0;
    double cdf_left = 0.0;
    for (int idx = i;; ++idx) {
      double const dl = st.x[static_cast<std::size_t>(idx)] - st.x[static_cast<std::size_t>(i)];
      if (dl >= kernel.eta) break;
      if (idx == leader) {
        sum += (1.0 - acc) * sc.vbar;
        break;
      }
      double const dr =
          st.x[static_cast<std::size_t>(idx) + 1] - st.x[static_cast<std::size_t>(i)];
      if (dr >= kernel.eta) {
        sum += (1.0 - acc) * v_gap[static_cast<std::size_t>(idx)];
        break;
      }
      double const cdf_right = kernel.cdf(dr);
      double const g = cdf_right - cdf_left;
      sum += g * v_gap[static_cast<std::size_t>(idx)];
      acc += g;
      cdf_left = cdf_right;
    }
    f[static_cast<std::size_t>(i)] = sum;
  }
  return f;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0, e3 = 500.0 / 1113.0 - 7571.0 / 16695.0,
                 e4 = 125.0 / 192.0 - 393.0 / 640.0, e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0,
                 e6 = 11.0 / 84.0 - 187.0 / 2100.0, e7 = -1.0 / 40.0;

}  // namespace

MicroTrajectory integrate(MicroScenario const& sc, double t_end,
                          std::span<double const> output_times, MicroIntegrateOptions const& opt) {
  sc.validate();
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be positive");
  for (double t : output_times)
    if (t < 0.0 || t > t_end + kSampleTol)
      throw std::invalid_argument("integrate: output time outside [0, t_end]");

  MicroTrajectory tr;
  tr.scenario = sc;
  tr.requested.assign(output_times.begin(), output_times.end());
  std::sort(tr.requested.begin(), tr.requested.end());
  std::vector<double> const sample_times =
      merged_sample_times(t_end, output_times, std::max(1, opt.diagnostic_samples));
  tr.samples.reserve(sample_times.size());

  std::size_t const n = sc.x0.size();
  int const leader = sc.leader();
  double const leader_x0 = sc.x0.back();
  double const min_gap = sc.ell * 1e-6;

  std::vector<double> y = sc.x0;
  double t = 0.0;
  std::vector<double> k1 = rhs(sc, MicroState{0.0, y});
  std::vector<double> k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  std::size_t next_sample = 0;
  auto emit_samples_through = [&](double t0, double h, std::vector<double> const& y0,
                                  std::vector<double> const& f0, std::vector<double> const& y1,
                                  std::vector<double> const& f1) {
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t0 + h + 1e-15) {
      double const ts = sample_times[next_sample];
      double const th = std::clamp((ts - t0) / h, 0.0, 1.0);
      double const h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
      double const h10 = th * (1.0 - th) * (1.0 - th);
      double const h01 = th * th * (3.0 - 2.0 * th);
      double const h11 = th * th * (th - 1.0);
      MicroState s;
      s.t = ts;
      s.x.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        s.x[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
      s.x[static_cast<std::size_t>(leader)] = leader_x0 + sc.vbar * ts;
      tr.samples.push_back(std::move(s));
      ++next_sample;
    }
  };

  if (next_sample < sample_times.size() && sample_times[next_sample] <= 1e-15) {
    tr.samples.push_back(MicroState{0.0, y});
    ++next_sample;
  }

  double h = std::min(1e-3, t_end);
  while (t < t_end - 1e-14) {
    if (t + h > t_end) h = t_end - t;
    if (h < 1e-14 * t_end) throw SolverError("integrate: step size underflow", t, y);

    bool ok = true;
    try {
      for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
      k2 = rhs(sc, MicroState{t, ytmp});
      for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      k3 = rhs(sc, MicroState{t, ytmp});
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = rhs(sc, MicroState{t, ytmp});
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = rhs(sc, MicroState{t, ytmp});
      for (std::size_t i = 0; i < n; ++i)
        ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = rhs(sc, MicroState{t, ytmp});
      for (std::size_t i = 0; i < n; ++i)
        ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      k7 = rhs(sc, MicroState{t + h, ynew});
    } catch (std::invalid_argument const&) {
      ok = false;  // a stage left the admissible cone; retry smaller
    }

    double err = std::numeric_limits<double>::infinity();
    if (ok) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double const ei =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        double const scale =
            opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        sum += (ei / scale) * (ei / scale);
      }
      err = std::sqrt(sum / static_cast<double>(n));
      for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(ynew[i + 1] - ynew[i] > min_gap)) ok = false;  // positivity guard
    }

    if (ok && err <= 1.0) {
      double const t_new = t + h;
      ynew[static_cast<std::size_t>(leader)] = leader_x0 + sc.vbar * t_new;
      emit_samples_through(t, h, y, k1, ynew, k7);
      y.swap(ynew);
      k1.swap(k7);
      t = t_new;
      double const fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      h = std::min(h * fac, t_end);
    } else if (!ok) {
      h *= 0.5;
    } else {
      double const fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      h *= fac;
    }
  }

  // Anything still pending sits at t_end within tolerance.
  while (next_sample < sample_times.size()) {
    MicroState s{sample_times[next_sample], y};
    s.x[static_cast<std::size_t>(leader)] = leader_x0 + sc.vbar * s.t;
    tr.samples.push_back(std::move(s));
    ++next_sample;
  }
  return tr;
}

std::vector<double> gaps(MicroState const& st) {
  std::vector<double> y(st.x.size() - 1);
  for (std::size_t i = 0; i + 1 < st.x.size(); ++i) y[i] = st.x[i + 1] - st.x[i];
  return y;
}

PiecewiseConstant density_profile(MicroScenario const& sc, MicroState const& st) {
  PiecewiseConstant p;
  p.xs = st.x;
  p.vals.resize(st.x.size() - 1);
  for (std::size_t i = 0; i + 1 < st.x.size(); ++i)
    p.vals[i] = sc.ell / (st.x[i + 1] - st.x[i]);
  return p;
}

std::optional<int> compute_J(MicroScenario const& sc) {
  int const leader = sc.leader();
  std::vector<double> const y0 = gaps(MicroState{0.0, sc.x0});
  double sum = 0.0;
  int best = -1;
  for (int i = leader - 1; i >= 0; --i) {
    sum += std::max(y0[static_cast<std::size_t>(i)], sc.equilibrium_gap_of(i));
    if (sum <= sc.eta + 1e-12)
      best = i;
    else
      break;
  }
  if (best < 0) return std::nullopt;
  return best;
}

BulkSet bulk_set(MicroTrajectory const& tr) {
  int const leader = tr.scenario.leader();
  double const eta = tr.scenario.eta;
  int j_min = leader;
  for (int i = leader - 1; i >= 0; --i) {
    bool inside = true;
    for (MicroState const& s : tr.samples) {
      if (s.x[static_cast<std::size_t>(i)] <
          s.x[static_cast<std::size_t>(leader)] - eta - 1e-12) {
        inside = false;
        break;
      }
    }
    if (!inside) break;
    j_min = i;
  }
  BulkSet out;
  out.j_min = j_min;
  for (int i = j_min; i <= leader; ++i) out.indices.push_back(i);
  return out;
}

double rho_min_micro(MicroScenario const& sc, int J) {
  int const leader = sc.leader();
  if (J < 0 || J > leader) throw std::invalid_argument("rho_min_micro: J out of range");
  std::vector<double> const y0 = gaps(MicroState{0.0, sc.x0});
  // index N contributes the boundary equilibrium density
  double m = sc.velocity.equilibrium_density(sc.vbar, sc.omegas.back());
  for (int i = J; i < leader; ++i) {
    m = std::min(m, sc.ell / y0[static_cast<std::size_t>(i)]);
    double const lbar = sc.equilibrium_gap_of(i);
    m = std::min(m, std::isinf(lbar) ? 0.0 : sc.ell / lbar);
  }
  return m;
}

double lyapunov_micro(MicroScenario const& sc, MicroState const& st, int J) {
  int const leader = sc.leader();
  if (J < 0 || J > leader) throw std::invalid_argument("lyapunov_micro: J out of range");
  double sum = 0.0;
  for (int i = J; i < leader; ++i) {
    double const y = st.x[static_cast<std::size_t>(i) + 1] - st.x[static_cast<std::size_t>(i)];
    double const lbar = sc.equilibrium_gap_of(i);
    double const dev = sc.ell / y - (std::isinf(lbar) ? 0.0 : sc.ell / lbar);
    sum += y * dev * dev;
  }
  return sum;
}

double lyapunov_micro_set(MicroScenario const& sc, MicroState const& st,
                          std::span<int const> indices) {
  int const leader = sc.leader();
  double sum = 0.0;
  for (int i : indices) {
    if (i < 0 || i >= leader) continue;
    double const y = st.x[static_cast<std::size_t>(i) + 1] - st.x[static_cast<std::size_t>(i)];
    double const lbar = sc.equilibrium_gap_of(i);
    double const dev = sc.ell / y - (std::isinf(lbar) ? 0.0 : sc.ell / lbar);
    sum += y * dev * dev;
  }
  return sum;
}

double bound_constant(MicroScenario const& sc, int J, double t) {
  double const L0 = lyapunov_micro(sc, MicroState{0.0, sc.x0}, J);
  double const vp = sc.velocity.vprime_max(sc.omegas);
  double const rate = (2.0 / sc.eta) * vp * rho_min_micro(sc, J);
  return L0 * std::exp(rate * t);
}

Theorem3Hypotheses theorem3_hypotheses(MicroScenario const& sc, int J) {
  Theorem3Hypotheses h;
  h.concave = sc.kernel.is_concave();
  int const leader = sc.leader();
  if (J < 0 || J > leader) return h;

  double omega_lo = std::numeric_limits<double>::infinity();
  double omega_hi = -std::numeric_limits<double>::infinity();
  for (int i = J; i < leader; ++i) {
    omega_lo = std::min(omega_lo, sc.omegas[static_cast<std::size_t>(i)]);
    omega_hi = std::max(omega_hi, sc.omegas[static_cast<std::size_t>(i)]);
  }
  h.uniform_omega = (J >= leader) || (omega_hi - omega_lo <= 1e-12);

  std::vector<double> const y0 = gaps(MicroState{0.0, sc.x0});
  bool below = true, above = true, nondec = true, noninc = true;
  for (int i = J; i < leader; ++i) {
    double const y = y0[static_cast<std::size_t>(i)];
    double const lbar = sc.equilibrium_gap_of(i);
    if (y > lbar + 1e-12) below = false;
    if (y < lbar - 1e-12) above = false;
    if (i > J) {
      double const prev = y0[static_cast<std::size_t>(i) - 1];
      if (y < prev - 1e-12) nondec = false;
      if (y > prev + 1e-12) noninc = false;
    }
  }
  h.monotone_one_side = (below || above) && (nondec || noninc);
  return h;
}

std::optional<double> bound_concave(MicroTrajectory const& tr, int J, double t) {
  MicroScenario const& sc = tr.scenario;
  if (!theorem3_hypotheses(sc, J).holds()) return std::nullopt;
  double const L0 = lyapunov_micro(sc, MicroState{0.0, sc.x0}, J);
  double const vp = sc.velocity.vprime_max(sc.omegas);
  double const rho_min = rho_min_micro(sc, J);
  int const leader = sc.leader();

  auto integrand = [&](MicroState const& s) {
    return sc.kernel.eval(s.x[static_cast<std::size_t>(leader)] - s.x[static_cast<std::size_t>(J)]);
  };
  double integral = 0.0;
  for (std::size_t k = 1; k < tr.samples.size(); ++k) {
    MicroState const& s0 = tr.samples[k - 1];
    MicroState const& s1 = tr.samples[k];
    if (s1.t <= t + 1e-15) {
      integral += 0.5 * (integrand(s0) + integrand(s1)) * (s1.t - s0.t);
    } else {
      if (s0.t < t) {
        double const w1 = integrand(s1);
        double const w0 = integrand(s0);
        double const th = (t - s0.t) / (s1.t - s0.t);
        double const wt = w0 + th * (w1 - w0);
        integral += 0.5 * (w0 + wt) * (t - s0.t);
      }
      break;
    }
  }
  return L0 * std::exp(2.0 * vp * rho_min * integral);
}

MaxPrincipleReport max_principle_check(MicroTrajectory const& tr, int J) {
  MicroScenario const& sc = tr.scenario;
  int const leader = sc.leader();
  std::vector<double> const y0 = gaps(MicroState{0.0, sc.x0});
  std::vector<double> lo(y0.size()), hi(y0.size());
  for (int i = J; i < leader; ++i) {
    double const lbar = sc.equilibrium_gap_of(i);
    lo[static_cast<std::size_t>(i)] = std::min(y0[static_cast<std::size_t>(i)], lbar);
    hi[static_cast<std::size_t>(i)] = std::max(y0[static_cast<std::size_t>(i)], lbar);
  }
  MaxPrincipleReport rep;
  for (MicroState const& s : tr.samples) {
    for (int i = J; i < leader; ++i) {
      double const y = s.x[static_cast<std::size_t>(i) + 1] - s.x[static_cast<std::size_t>(i)];
      double const v = std::max(lo[static_cast<std::size_t>(i)] - y,
                                y - hi[static_cast<std::size_t>(i)]);
      if (v > rep.worst) {
        rep.worst = v;
        rep.car = i;
        rep.t = s.t;
      }
    }
  }
  rep.pass = rep.worst <= 1e-8;
  return rep;
}

std::vector<double> jacobian_diagonal(MicroScenario const& sc, MicroState const& st) {
  int const leader = sc.leader();
  std::vector<double> diag(static_cast<std::size_t>(leader));
  for (int i = 0; i < leader; ++i) {
    double const y = st.x[static_cast<std::size_t>(i) + 1] - st.x[static_cast<std::size_t>(i)];
    double const rho = sc.ell / y;
    diag[static_cast<std::size_t>(i)] =
        sc.kernel.mass(0.0, y) * sc.velocity.dspeed_drho(rho, sc.omegas[static_cast<std::size_t>(i)]) *
        sc.ell / (y * y);
  }
  return diag;
}

MicroDiagnostics micro_diagnostics(MicroTrajectory const& tr, std::optional<int> j_override) {
  MicroScenario const& sc = tr.scenario;
  MicroDiagnostics d;
  std::optional<int> const j_from_condition = compute_J(sc);
  d.j_exists = j_from_condition.has_value();
  if (j_override.has_value())
    d.J = *j_override;
  else if (j_from_condition.has_value())
    d.J = *j_from_condition;
  else
    d.J = bulk_set(tr).j_min;  // a-posteriori fallback when the a-priori index is empty

  d.rho_min = rho_min_micro(sc, d.J);
  d.L0 = lyapunov_micro(sc, MicroState{0.0, sc.x0}, d.J);
  d.t3 = theorem3_hypotheses(sc, d.J);

  double const nan = std::numeric_limits<double>::quiet_NaN();
  bool const use_constant = sc.kernel.family == KernelFamily::Constant && d.j_exists;
  bool const use_concave = !use_constant && d.t3.holds() && d.j_exists;
  d.bound_applicable = use_constant || use_concave;
  d.bound_kind = use_constant ? "constant" : (use_concave ? "concave" : "none");

  d.t.reserve(tr.samples.size());
  d.L.reserve(tr.samples.size());
  d.bound.reserve(tr.samples.size());
  for (MicroState const& s : tr.samples) {
    d.t.push_back(s.t);
    d.L.push_back(lyapunov_micro(sc, s, d.J));
    if (use_constant)
      d.bound.push_back(bound_constant(sc, d.J, s.t));
    else if (use_concave)
      d.bound.push_back(bound_concave(tr, d.J, s.t).value_or(nan));
    else
      d.bound.push_back(nan);
  }
  d.max_principle = max_principle_check(tr, d.J);
  return d;
}

}  // namespace nlt
