#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlt/micro.hpp"

using namespace nlt;

namespace {

// 0.5 / 0.3 split at 0 on [-1, 1] with markers 1 / (5/8), eight gaps
MicroScenario small_two_state() {
  Scenario s;
  s.a = -1.0;
  s.b = 1.0;
  s.eta = 0.5;
  s.kernel = make_kernel("const", 0.5);
  s.rho0 = make_profile(std::vector<double>{-1.0, 0.0, 1.0}, std::vector<double>{0.5, 0.3});
  s.omega0 = make_profile(std::vector<double>{-1.0, 0.0, 1.0}, std::vector<double>{1.0, 0.625});
  s.vbar = 0.5;
  s.t_end = 4.0;
  s.n_cars = 9;
  s.dx = 0.05;
  return micro_from(s);
}

// nine cars in equilibrium spacing, uniform marker
MicroScenario uniform_equilibrium(char const* kernel = "const") {
  MicroScenario sc;
  sc.eta = 0.5;
  sc.kernel = make_kernel(kernel, 0.5);
  sc.vbar = 0.5;
  sc.ell = 0.05;
  sc.omegas.assign(8, 1.0);
  for (int i = 0; i <= 8; ++i) sc.x0.push_back(0.1 * i);
  sc.validate();
  return sc;
}

std::vector<double> oracle_rhs(MicroScenario const& sc, MicroState const& st) {
  int const leader = sc.leader();
  std::vector<double> out(st.x.size(), sc.vbar);
  for (int i = 0; i < leader; ++i) {
    double v = 0.0;
    for (auto const& [j, gamma] : weights_micro(sc.kernel, st.x, i)) {
      int const idx = i + j;
      if (idx < leader) {
        double const y = st.x[static_cast<std::size_t>(idx) + 1] - st.x[static_cast<std::size_t>(idx)];
        v += gamma * sc.velocity.speed(sc.ell / y, sc.omegas[static_cast<std::size_t>(idx)]);
      } else {
        v += gamma * sc.vbar;
      }
    }
    out[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

}  // namespace

TEST_CASE("quantile placement on a uniform density") {
  auto const [x, ell] = place_cars(
      make_profile(std::vector<double>{0.0, 1.0}, std::vector<double>{0.4}), 5);
  REQUIRE(x.size() == 5);
  CHECK(ell == doctest::Approx(0.1).epsilon(1e-15));
  for (int i = 0; i < 5; ++i) CHECK(x[static_cast<std::size_t>(i)] == doctest::Approx(0.25 * i));
  CHECK(x.front() == 0.0);
  CHECK(x.back() == 1.0);
}

TEST_CASE("quantile placement across a jump") {
  auto const rho = make_profile(std::vector<double>{-1.0, 0.0, 1.0}, std::vector<double>{0.5, 0.3});
  auto const [x, ell] = place_cars(rho, 9);
  CHECK(ell == doctest::Approx(0.1).epsilon(1e-15));
  std::vector<double> const expect{-1.0, -0.8, -0.6, -0.4, -0.2, 0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  REQUIRE(x.size() == expect.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(x[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  // every gap carries the same mass, so gap densities reproduce the profile
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double const rho_gap = ell / (x[i + 1] - x[i]);
    CHECK(rho_gap == doctest::Approx(i < 5 ? 0.5 : 0.3).epsilon(1e-12));
  }
  CHECK_THROWS_AS(place_cars(rho, 1), std::invalid_argument);
  CHECK_THROWS_AS(
      place_cars(make_profile(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0}), 5),
      std::domain_error);
}

TEST_CASE("markers are sampled at the car positions") {
  MicroScenario const sc = small_two_state();
  REQUIRE(sc.n_cars() == 9);
  REQUIRE(sc.omegas.size() == 8);
  for (int i = 0; i < 5; ++i) CHECK(sc.omegas[static_cast<std::size_t>(i)] == 1.0);
  for (int i = 5; i < 8; ++i) CHECK(sc.omegas[static_cast<std::size_t>(i)] == 0.625);  // x = 0 jumps right
  CHECK(sc.ell == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("rhs agrees with the explicit weight expansion") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> gap_u(0.02, 0.2), om_u(0.6, 1.0);
  for (char const* kernel : {"const", "lin", "lin2", "conc", "conv"}) {
    for (int rep = 0; rep < 20; ++rep) {
      MicroScenario sc;
      sc.eta = 0.3;
      sc.kernel = make_kernel(kernel, 0.3);
      sc.vbar = 0.4;
      sc.ell = 0.01;
      sc.x0.push_back(0.0);
      for (int i = 0; i < 5; ++i) sc.x0.push_back(sc.x0.back() + gap_u(rng));
      for (int i = 0; i < 5; ++i) sc.omegas.push_back(om_u(rng));
      sc.validate();
      MicroState const st{0.0, sc.x0};
      std::vector<double> const got = rhs(sc, st);
      std::vector<double> const want = oracle_rhs(sc, st);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-13));
      CHECK(got.back() == sc.vbar);
    }
  }
  MicroScenario bad = uniform_equilibrium();
  MicroState collided{0.0, bad.x0};
  collided.x[1] = collided.x[0];
  CHECK_THROWS_AS(rhs(bad, collided), std::invalid_argument);
}

TEST_CASE("equilibrium spacing is a fixed point of the dynamics") {
  MicroScenario const sc = small_two_state();
  MicroState eq;
  eq.t = 0.0;
  eq.x.resize(sc.x0.size());
  eq.x.back() = 1.0;
  for (int i = sc.leader() - 1; i >= 0; --i)
    eq.x[static_cast<std::size_t>(i)] =
        eq.x[static_cast<std::size_t>(i) + 1] - sc.equilibrium_gap_of(i);
  for (double v : rhs(sc, eq)) CHECK(v == doctest::Approx(sc.vbar).epsilon(1e-13));
}

TEST_CASE("two-car problem matches the closed-form solution") {
  MicroScenario sc;
  sc.eta = 0.5;
  sc.kernel = make_kernel("const", 0.5);
  sc.vbar = 0.5;
  sc.ell = 0.05;
  sc.x0 = {0.0, 0.05};
  sc.omegas = {1.0};
  double const lbar = 0.1;  // ell / (1 - vbar)
  double const c1 = (sc.vbar - 1.0) / sc.eta;

  MicroTrajectory const tr = integrate(sc, 2.0, std::vector<double>{0.5, 1.0, 2.0});
  for (double t : {0.5, 1.0, 2.0}) {
    MicroState const& s = tr.at(t);
    double const y_exact = lbar + (0.05 - lbar) * std::exp(c1 * t);
    CHECK(s.x[1] - s.x[0] == doctest::Approx(y_exact).epsilon(1e-6));
    CHECK(s.x[1] == doctest::Approx(0.05 + sc.vbar * t).epsilon(1e-12));
  }
}

TEST_CASE("dynamics are translation invariant") {
  MicroScenario const sc = small_two_state();
  MicroScenario shifted = sc;
  for (double& x : shifted.x0) x += 5.0;
  std::vector<double> const outs{1.0, 3.0};
  MicroIntegrateOptions opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-10;
  MicroTrajectory const a = integrate(sc, 4.0, outs, opt);
  MicroTrajectory const b = integrate(shifted, 4.0, outs, opt);
  for (double t : outs) {
    MicroState const& sa = a.at(t);
    MicroState const& sb = b.at(t);
    for (std::size_t i = 0; i < sa.x.size(); ++i)
      CHECK(std::abs(sb.x[i] - 5.0 - sa.x[i]) <= 5e-8);
  }
}

TEST_CASE("leader follows the prescribed velocity exactly") {
  MicroScenario const sc = small_two_state();
  MicroTrajectory const tr = integrate(sc, 4.0, std::vector<double>{});
  for (MicroState const& s : tr.samples)
    CHECK(std::abs(s.x.back() - (1.0 + sc.vbar * s.t)) <= 1e-12);
}

TEST_CASE("sample grid merges diagnostics and requested outputs") {
  MicroScenario const sc = uniform_equilibrium();
  MicroIntegrateOptions opt;
  opt.diagnostic_samples = 10;
  MicroTrajectory const tr = integrate(sc, 1.0, std::vector<double>{0.25, 0.5}, opt);
  CHECK(tr.samples.size() == 12);  // 11 grid points plus the off-grid 0.25
  CHECK(tr.samples.front().t == 0.0);
  CHECK(tr.samples.back().t == 1.0);
  CHECK_NOTHROW(tr.at(0.25));
  CHECK_NOTHROW(tr.at(0.5));
  CHECK_THROWS_AS(tr.at(0.33), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sc, -1.0, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sc, 1.0, std::vector<double>{2.0}), std::invalid_argument);
}

TEST_CASE("a-priori window index") {
  MicroScenario const sc = uniform_equilibrium();
  auto const J = compute_J(sc);
  REQUIRE(J.has_value());
  CHECK(*J == 3);  // five trailing gaps of max(y, Lbar) = 0.1 fill eta = 0.5

  MicroScenario tight = sc;
  tight.eta = 0.05;
  tight.kernel = make_kernel("const", 0.05);
  CHECK_FALSE(compute_J(tight).has_value());

  MicroScenario const two = small_two_state();
  auto const J2 = compute_J(two);
  REQUIRE(J2.has_value());
  CHECK(*J2 == 7);  // max(1/3, 1/2) = 1/2 alone exhausts eta
}

TEST_CASE("bulk set at equilibrium matches the a-priori index") {
  MicroScenario const sc = uniform_equilibrium();
  MicroTrajectory const tr = integrate(sc, 1.0, std::vector<double>{});
  BulkSet const bs = bulk_set(tr);
  CHECK(bs.j_min == 3);
  REQUIRE(bs.indices.size() == 6);
  CHECK(bs.indices.front() == 3);
  CHECK(bs.indices.back() == 8);
}

TEST_CASE("microscopic density floor") {
  MicroScenario const sc = small_two_state();
  // trailing gap density 0.3, equilibrium density 0.2, boundary equilibrium 0.2
  CHECK(rho_min_micro(sc, 7) == doctest::Approx(0.2).epsilon(1e-14));
  MicroScenario const eq = uniform_equilibrium();
  CHECK(rho_min_micro(eq, 3) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("lyapunov sum by hand") {
  MicroScenario sc;
  sc.eta = 0.5;
  sc.kernel = make_kernel("const", 0.5);
  sc.vbar = 0.5;
  sc.ell = 0.02;
  sc.x0 = {0.0, 0.2, 0.3};
  sc.omegas = {0.625, 0.625};
  sc.validate();
  MicroState const st{0.0, sc.x0};
  // y0 * (rho_0 - rho_eq)^2 = 0.2 * (0.1 - 0.2)^2, the second gap sits at equilibrium
  CHECK(lyapunov_micro(sc, st, 0) == doctest::Approx(0.002).epsilon(1e-14));
  CHECK(lyapunov_micro(sc, st, 1) <= 1e-30);
  std::vector<int> const only_first{0};
  CHECK(lyapunov_micro_set(sc, st, only_first) == doctest::Approx(0.002).epsilon(1e-14));

  double const rate = (2.0 / sc.eta) * (-0.625) * rho_min_micro(sc, 0);
  CHECK(bound_constant(sc, 0, 2.0) ==
        doctest::Approx(0.002 * std::exp(rate * 2.0)).epsilon(1e-13));
  CHECK(bound_constant(sc, 0, 0.0) == doctest::Approx(0.002).epsilon(1e-14));
}

TEST_CASE("concave-case hypotheses flags") {
  MicroScenario const eq = uniform_equilibrium();
  Theorem3Hypotheses const h = theorem3_hypotheses(eq, 3);
  CHECK(h.concave);
  CHECK(h.uniform_omega);
  CHECK(h.monotone_one_side);
  CHECK(h.holds());

  MicroScenario conv = uniform_equilibrium("conv");
  CHECK_FALSE(theorem3_hypotheses(conv, 3).concave);

  MicroScenario mixed = uniform_equilibrium();
  mixed.omegas[5] = 0.9;
  CHECK_FALSE(theorem3_hypotheses(mixed, 3).uniform_omega);

  MicroScenario straddle = uniform_equilibrium();
  straddle.x0 = {0.0, 0.08, 0.2};  // gaps 0.08 and 0.12 straddle Lbar = 0.1
  straddle.omegas = {1.0, 1.0};
  CHECK_FALSE(theorem3_hypotheses(straddle, 0).monotone_one_side);
}

TEST_CASE("concave bound reduces to the constant bound for the constant kernel") {
  MicroScenario sc;
  sc.eta = 0.5;
  sc.kernel = make_kernel("const", 0.5);
  sc.vbar = 0.5;
  sc.ell = 0.05;
  sc.omegas.assign(5, 1.0);
  sc.x0 = {0.0};
  for (double g : {0.06, 0.07, 0.08, 0.09, 0.1}) sc.x0.push_back(sc.x0.back() + g);
  sc.validate();
  REQUIRE(compute_J(sc) == 0);

  MicroTrajectory const tr = integrate(sc, 2.0, std::vector<double>{});
  for (double t : {0.5, 1.0, 2.0}) {
    auto const concave = bound_concave(tr, 0, t);
    REQUIRE(concave.has_value());
    CHECK(*concave == doctest::Approx(bound_constant(sc, 0, t)).epsilon(1e-12));
  }
  MicroScenario mixed = sc;
  mixed.omegas[2] = 0.8;
  mixed.vbar = 0.5;
  MicroTrajectory const tr2 = integrate(mixed, 0.5, std::vector<double>{});
  CHECK_FALSE(bound_concave(tr2, 0, 0.5).has_value());
}

TEST_CASE("gap confinement on the two-state run") {
  MicroScenario const sc = small_two_state();
  MicroTrajectory const tr = integrate(sc, 4.0, std::vector<double>{});
  MaxPrincipleReport const rep = max_principle_check(tr, 7);
  CHECK(rep.pass);
  CHECK(rep.worst <= 1e-8);
}

TEST_CASE("linearization diagonal matches finite differences at equilibrium") {
  MicroScenario const sc = small_two_state();
  int const leader = sc.leader();
  std::vector<double> ybar(static_cast<std::size_t>(leader));
  for (int i = 0; i < leader; ++i) ybar[static_cast<std::size_t>(i)] = sc.equilibrium_gap_of(i);

  auto positions_from_gaps = [&](std::vector<double> const& y) {
    std::vector<double> x(static_cast<std::size_t>(leader) + 1);
    x.back() = 1.0;
    for (int i = leader - 1; i >= 0; --i)
      x[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i) + 1] - y[static_cast<std::size_t>(i)];
    return x;
  };
  MicroState const eq{0.0, positions_from_gaps(ybar)};
  std::vector<double> const diag = jacobian_diagonal(sc, eq);
  REQUIRE(diag.size() == static_cast<std::size_t>(leader));

  double const h = 1e-6;
  for (int k = 0; k < leader; ++k) {
    auto ydot_k = [&](double yk) {
      std::vector<double> y = ybar;
      y[static_cast<std::size_t>(k)] = yk;
      MicroState const st{0.0, positions_from_gaps(y)};
      std::vector<double> const f = rhs(sc, st);
      return f[static_cast<std::size_t>(k) + 1] - f[static_cast<std::size_t>(k)];
    };
    double const fd =
        (ydot_k(ybar[static_cast<std::size_t>(k)] + h) - ydot_k(ybar[static_cast<std::size_t>(k)] - h)) /
        (2.0 * h);
    CHECK(diag[static_cast<std::size_t>(k)] == doctest::Approx(fd).epsilon(1e-5));
    CHECK(diag[static_cast<std::size_t>(k)] < 0.0);
  }
  // last follower: full kernel mass over its gap, slope -omega * ell / ybar^2
  CHECK(diag[7] == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("diagnostics bundle on the two-state run") {
  MicroScenario const sc = small_two_state();
  MicroIntegrateOptions opt;
  opt.diagnostic_samples = 40;
  MicroTrajectory const tr = integrate(sc, 4.0, std::vector<double>{1.0}, opt);
  MicroDiagnostics const d = micro_diagnostics(tr);
  CHECK(d.J == 7);
  CHECK(d.j_exists);
  CHECK(d.bound_kind == "constant");
  CHECK(d.bound_applicable);
  CHECK(d.rho_min == doctest::Approx(0.2).epsilon(1e-14));
  REQUIRE(d.t.size() == tr.samples.size());
  CHECK(d.L.front() == doctest::Approx(d.L0).epsilon(1e-15));
  for (std::size_t k = 0; k < d.t.size(); ++k) {
    CHECK(d.L[k] <= d.bound[k] * (1.0 + 1e-6));
    if (k > 0) CHECK(d.bound[k] < d.bound[k - 1]);
  }
  CHECK(d.max_principle.pass);

  MicroDiagnostics const all = micro_diagnostics(tr, 0);
  CHECK(all.J == 0);
  CHECK(all.L0 > d.L0);
}
