#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "gencahn/diagnostics.hpp"
#include "gencahn/error.hpp"
#include "gencahn/operators.hpp"
#include "gencahn/solver.hpp"

using namespace gencahn;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::InvalidArgument;
}

ModelParams double_well(double delta, double p = 1.0) {
  ModelParams m;
  m.delta = delta;
  m.mobility = MobilitySpec::polynomial(p);
  return m;
}

Field smooth_noise(const GridPtr& g, double m0, double amp, std::uint64_t seed, std::size_t cutoff) {
  InitSpec s;
  s.m0 = m0;
  s.amplitude = amp;
  s.seed = seed;
  s.lowpass_cutoff = cutoff;
  return initial_field(s, g);
}

Trajectory spinodal(double tau, double t_end, double delta) {
  const auto g = Grid::make_1d(64, 16.0);
  SolverConfig cfg;
  cfg.tau = tau;
  cfg.t_end = t_end;
  cfg.newton_tol = 1e-11;
  return run(smooth_noise(g, 0.0, 0.3, 5, 20), double_well(delta), cfg);
}

}  // namespace

TEST_CASE("energy") {
  const auto g = Grid::make_1d(50, 1.0);
  const auto dw = PotentialSpec::double_well();
  CHECK(energy(Field(g, 0.0), dw).total == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(energy(Field(g, 1.0), dw).total == 0.0);
  CHECK(energy(Field(g, -1.0), dw).total == 0.0);

  SUBCASE("single cosine mode") {
    const auto g2 = Grid::make_1d(64, 3.0);
    for (std::size_t k : {1u, 5u, 20u}) {
      const double a = 1e-3;
      Field chi(g2);
      for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = a * std::cos(k * M_PI * g2->centre(0, i) / 3.0);
      const double lam = g2->basis(0).eigenvalues[k];
      const auto e = energy(chi, dw);
      CHECK(e.dirichlet == doctest::Approx(a * a * lam * 3.0 / 4.0).epsilon(1e-12));
      CHECK(e.total == doctest::Approx(e.dirichlet + e.potential));
      // phi_hat(r) = 1/4 - r^2/2 + r^4/4 integrates to |Omega|/4 - |Omega| a^2/4 + O(a^4).
      CHECK(e.potential == doctest::Approx(0.75 - 3.0 * a * a / 4.0).epsilon(1e-12));
    }
  }
  SUBCASE("reflection invariance") {
    const Field chi = smooth_noise(g, 0.1, 0.5, 3, 20);
    Field flipped(g);
    for (std::size_t i = 0; i < chi.size(); ++i) flipped[i] = chi[chi.size() - 1 - i];
    CHECK(std::abs(energy(chi, dw).total - energy(flipped, dw).total) < 1e-12);
  }
  SUBCASE("domain") {
    const auto lg = PotentialSpec::logarithmic(-1.0, 1.0, 3.0);
    Field chi(g, 0.2);
    CHECK(energy(chi, lg).potential >= 0.0);
    chi[0] = 1.0;
    CHECK(kind_of([&] { energy(chi, lg); }) == ErrorKind::OutOfDomain);
    const EffectivePotential trunc(lg, 0.5);
    CHECK(std::isfinite(energy(chi, trunc).total));
  }
}

TEST_CASE("energy identity") {
  SUBCASE("stationary trajectory") {
    const auto g = Grid::make_1d(32, 1.0);
    SolverConfig cfg;
    cfg.tau = 0.01;
    cfg.t_end = 0.1;
    const auto params = double_well(0.5);
    const auto traj = run(Field(g, 0.2), params, cfg);
    const auto r = energy_identity_defect(traj, Model(params), 0.0, 0.1);
    CHECK(r.visc_term == 0.0);
    CHECK(r.mobility_term == 0.0);
    CHECK(r.energy_drop == 0.0);
    CHECK(r.defect == 0.0);
  }
  SUBCASE("delta = 0 has no viscous term") {
    const auto traj = spinodal(1e-2, 0.2, 0.0);
    const auto r = energy_identity_defect(traj, Model(double_well(0.0)), 0.0, 0.2);
    CHECK(r.visc_term == 0.0);
    CHECK(r.mobility_term > 0.0);
    CHECK(r.energy_drop > 0.0);
  }
  SUBCASE("defect is first order in tau") {
    for (double delta : {0.0, 0.1}) {
      const Model model(double_well(delta));
      const auto a = energy_identity_defect(spinodal(2e-3, 0.5, delta), model, 0.0, 0.5);
      const auto b = energy_identity_defect(spinodal(1e-3, 0.5, delta), model, 0.0, 0.5);
      CAPTURE(delta);
      CAPTURE(a.defect);
      CAPTURE(b.defect);
      CHECK(a.visc_term >= 0.0);
      CHECK(a.mobility_term >= 0.0);
      CHECK(a.defect / b.defect >= 1.5);
      CHECK(a.defect / b.defect <= 3.0);
      CHECK(std::abs(b.defect) < 0.25 * b.energy_drop);
    }
  }
  SUBCASE("interval checks") {
    const auto traj = spinodal(1e-2, 0.05, 0.0);
    const Model model(double_well(0.0));
    CHECK(kind_of([&] { energy_identity_defect(traj, model, 0.02, 0.01); }) == ErrorKind::IntervalOutOfRange);
    CHECK(kind_of([&] { energy_identity_defect(traj, model, 0.0, 1.0); }) == ErrorKind::IntervalOutOfRange);
    CHECK(kind_of([&] { energy_identity_defect(traj, model, 0.021, 0.029); }) == ErrorKind::IntervalOutOfRange);
  }
}

TEST_CASE("stationarity and omega-limit probe") {
  const auto g = Grid::make_1d(32, 8.0);
  const auto params = double_well(0.0);
  const Model model(params);
  const Field u(g, 0.3);
  const State uniform{0.0, u, model.phi(u)};
  const auto r0 = stationarity_residual(uniform, model);
  CHECK(r0.r_w == 0.0);
  CHECK(r0.r_chi == 0.0);

  const auto traj = spinodal(1e-2, 1.0, 0.0);
  const auto rs = stationarity_residual(traj.states.back(), Model(double_well(0.0)));
  CHECK(rs.r_w > 10 * 1e-10);
  CHECK(!omega_limit_probe(traj, 5, 1e-7, Model(double_well(0.0))));

  SolverConfig cfg;
  cfg.tau = 0.1;
  cfg.t_end = 0.5;
  const auto still = run(u, params, cfg);
  const auto hit = omega_limit_probe(still, 2, 1e-7, model);
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(0.5));
  CHECK(kind_of([&] { omega_limit_probe(still, 1, 1e-7, model); }) == ErrorKind::InvalidArgument);

  Field guess(g);
  for (std::size_t i = 0; i < guess.size(); ++i) guess[i] = std::tanh((g->centre(0, i) - 4.0) / std::sqrt(2.0));
  const auto rp = solve_rest_point(0.0, params, g, guess);
  const auto rr = stationarity_residual(State{0.0, rp.chi, Field(g, rp.w_bar)}, model);
  CHECK(rr.r_w == 0.0);
  CHECK(rr.r_chi < 1e-10);
}

TEST_CASE("pair divergence") {
  const auto g = Grid::make_1d(32, 8.0);
  SolverConfig cfg;
  cfg.tau = 1e-2;
  cfg.t_end = 1.0;
  const auto params = double_well(1.0, 0.0);
  const Field base = smooth_noise(g, 0.0, 0.4, 1, 8);
  const auto a = run(base, params, cfg);
  SUBCASE("identical data") {
    const auto gaps = pair_gaps(a, a);
    for (double v : gaps.gap_v) CHECK(v == 0.0);
    for (double v : gaps.gap_h1_time) CHECK(v == 0.0);
    CHECK(kind_of([&] { pair_divergence(a, a); }) == ErrorKind::DegenerateInitialGap);
  }
  SUBCASE("linear regime is scale invariant") {
    const Field dir = smooth_noise(g, 0.0, 1.0, 2, 8);
    std::vector<double> ratios;
    for (double scale : {1e-3, 1e-4}) {
      const auto b = run(base + scale * dir, params, cfg);
      const auto d = pair_divergence(a, b);
      CHECK(d.initial_gap == doctest::Approx(norms(scale * dir).v_norm));
      CHECK(d.ratio_sup >= 1.0);
      for (std::size_t i = 1; i < d.gap_h1_time.size(); ++i) CHECK(d.gap_h1_time[i] >= d.gap_h1_time[i - 1]);
      ratios.push_back(d.ratio_sup);
    }
    CHECK(ratios[0] / ratios[1] < 2.0);
    CHECK(ratios[1] / ratios[0] < 2.0);
  }
  SUBCASE("misaligned trajectories") {
    SolverConfig other = cfg;
    other.tau = 2e-2;
    const auto b = run(base, params, other);
    CHECK_THROWS_AS(pair_gaps(a, b), Error);
  }
}

TEST_CASE("norm time series and series rows") {
  const auto g = Grid::make_1d(32, 8.0);
  SolverConfig cfg;
  cfg.tau = 1e-2;
  cfg.t_end = 0.2;
  const auto params = double_well(0.0);
  const Model model(params);
  const double kappa = indices(1.0, 0.5).kappa_p;

  const auto still = norm_timeseries(run(Field(g, 0.4), params, cfg), model, kappa);
  for (const auto& r : still) {
    CHECK(r.grad_w_l2 == 0.0);
    CHECK(r.chit_negsob == 0.0);
  }
  const auto traj = run(smooth_noise(g, 0.1, 0.3, 4, 10), params, cfg);
  const auto rows = norm_timeseries(traj, model, kappa);
  REQUIRE(rows.size() == traj.states.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::abs(rows[i].mean_w - rows[i].mean_phi) < cfg.newton_tol);
    CHECK(std::isfinite(rows[i].grad_pw_l2));
    if (i > 0) CHECK(rows[i].chit_negsob > 0.0);
  }
  CHECK(kind_of([&] { norm_timeseries(traj, model, 7.0); }) == ErrorKind::QOutOfRange);

  const std::string header = series_header();
  CHECK(std::count(header.begin(), header.end(), ',') == 10);
  SeriesRecorder rec(std::make_shared<const Model>(params), kappa);
  const std::string first = rec.row(traj.states[0], traj.stats[0]);
  const std::string second = rec.row(traj.states[1], traj.stats[1]);
  CHECK(std::count(first.begin(), first.end(), ',') == 10);
  std::istringstream in(second);
  std::vector<double> cols;
  for (std::string cell; std::getline(in, cell, ',');) cols.push_back(std::stod(cell));
  REQUIRE(cols.size() == 11);
  CHECK(cols[0] == doctest::Approx(0.01));
  CHECK(cols[4] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(cols[8] == doctest::Approx(rows[1].chit_negsob));
  CHECK(cols[9] == traj.stats[1].newton_iters);
}
