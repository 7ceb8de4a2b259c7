#include <cmath>
#include <vector>

#include "doctest.h"
#include "gencahn/diagnostics.hpp"
#include "gencahn/error.hpp"
#include "gencahn/operators.hpp"
#include "gencahn/random.hpp"
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
  m.potential = PotentialSpec::double_well();
  return m;
}

Field noise(const GridPtr& g, double m0, double amp, std::uint64_t seed) {
  InitSpec s;
  s.kind = InitKind::UniformNoise;
  s.m0 = m0;
  s.amplitude = amp;
  s.seed = seed;
  return initial_field(s, g);
}

// Dense -Delta_h built from neighbour coordinates.
std::vector<std::vector<double>> dense_neumann(std::size_t n, double h) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) a[i][j] = (i == 0 || i == n - 1) ? 1.0 / (h * h) : 2.0 / (h * h);
      else if (i == j + 1 || j == i + 1) a[i][j] = -1.0 / (h * h);
    }
  }
  return a;
}

std::vector<double> matvec(const std::vector<std::vector<double>>& a, const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

}  // namespace

TEST_CASE("model parameter validation") {
  ModelParams m;
  m.delta = 0.0;
  m.potential = PotentialSpec::logarithmic(-1.0, 1.0, 3.0);
  CHECK(kind_of([&] { m.validate(); }) == ErrorKind::InvalidArgument);
  m.trunc_mu = 0.5;
  CHECK_NOTHROW(m.validate());
  m.trunc_mu = 0.0;
  CHECK(kind_of([&] { m.validate(); }) == ErrorKind::NonPositiveMu);
  m.trunc_mu.reset();
  m.delta = 0.1;
  CHECK_NOTHROW(m.validate());
  m.trunc_M = -1.0;
  CHECK(kind_of([&] { m.validate(); }) == ErrorKind::NonPositiveM);
}

TEST_CASE("residual") {
  const auto g = Grid::make_1d(16, 1.0);
  const Model model(double_well(0.3));
  SUBCASE("uniform stationary state") {
    const Field c(g, 0.4);
    const State s{0.0, c, model.phi(c)};
    const auto r = residual(s, s, model, 1e-2);
    CHECK(r.r1.max_abs() == 0.0);
    CHECK(r.r2.max_abs() == doctest::Approx(0.0).epsilon(1e-15));
  }
  SUBCASE("delta = 0 with nonconstant mobility flux") {
    const Model m0(double_well(0.0));
    const Field chi(g, 0.1);
    State next{0.0, chi, noise(g, 0.0, 1.0, 3)};
    const auto r = residual(next, next, m0, 1e-2);
    const Field flux = laplacian(m0.alpha(next.w));
    CHECK(flux.max_abs() > 0.0);
    for (std::size_t i = 0; i < chi.size(); ++i) CHECK(r.r1[i] == flux[i]);
  }
  SUBCASE("matches a dense independent evaluation") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
      const double tau = 1e-3, delta = 0.3, h = 1.0 / 16;
      const Field cp = noise(g, 0.1, 0.8, 100 + trial);
      const Field cn = noise(g, 0.1, 0.8, 200 + trial);
      const Field w = noise(g, 0.0, 2.0, 300 + trial);
      const auto r = residual(State{0.0, cp, cp}, State{tau, cn, w}, model, tau);
      const auto A = dense_neumann(16, h);
      std::vector<double> aw(16), chi(16);
      for (int i = 0; i < 16; ++i) {
        aw[i] = w[i] + w[i] * w[i] * w[i];
        chi[i] = cn[i];
      }
      const auto Aa = matvec(A, aw);
      const auto Ac = matvec(A, chi);
      for (int i = 0; i < 16; ++i) {
        const double r1 = (cn[i] - cp[i]) / tau + Aa[i];
        const double r2 = delta * (cn[i] - cp[i]) / tau + Ac[i] + cn[i] * cn[i] * cn[i] - cp[i] - w[i];
        CHECK(std::abs(r.r1[i] - r1) <= 1e-13 * (std::abs(Aa[i]) + std::abs(cn[i] - cp[i]) / tau));
        CHECK(std::abs(r.r2[i] - r2) <= 1e-13 * (std::abs(Ac[i]) + std::abs(delta * (cn[i] - cp[i]) / tau) + 1));
      }
    }
  }
  SUBCASE("grid mismatch") {
    const auto g2 = Grid::make_1d(8, 1.0);
    const State a{0.0, Field(g, 0.0), Field(g, 0.0)};
    const State b{0.0, Field(g2, 0.0), Field(g2, 0.0)};
    CHECK(kind_of([&] { residual(a, b, model, 1.0); }) == ErrorKind::GridMismatch);
  }
}

TEST_CASE("step") {
  const auto g = Grid::make_1d(64, 1.0);
  SolverConfig cfg;
  cfg.tau = 1e-4;
  SUBCASE("uniform state is a fixed point reached in one iteration") {
    const Field c(g, -0.3);
    const Model model(double_well(0.1));
    StepStats st;
    const State next = step(State{0.0, c, model.phi(c)}, double_well(0.1), cfg, &st);
    CHECK(st.newton_iters == 1);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(next.chi[i] == c[i]);
  }
  SUBCASE("converged step satisfies its own residual and the mean identity") {
    for (double delta : {0.0, 0.1}) {
      const auto params = double_well(delta);
      const Model model(params);
      const Field chi0 = noise(g, 0.05, 0.5, 9);
      const State prev{0.0, chi0, chemical_potential(chi0, model)};
      StepStats st;
      const State next = step(prev, params, cfg, &st);
      CHECK(st.newton_iters > 1);
      CHECK(st.residual < cfg.newton_tol);
      CHECK(residual(prev, next, model, cfg.tau).norm() < 10 * cfg.newton_tol);
      CHECK(std::abs(mean(next.chi) - mean(prev.chi)) <= 1e-14);
      CHECK(std::abs(st.mean_correction) < 1e-13);
      const double c = model.potential().c_split();
      CHECK(mean(next.w) == doctest::Approx(mean(model.phi(next.chi)) + c * (mean(next.chi) - mean(prev.chi)) +
                                             delta * (mean(next.chi) - mean(prev.chi)) / cfg.tau)
                               .epsilon(1e-9));
    }
  }
  SUBCASE("too large a step with a tiny budget diverges") {
    SolverConfig bad = cfg;
    bad.tau = 10.0;
    bad.newton_max_iters = 1;
    const Field chi0 = noise(g, 0.0, 0.9, 5);
    const Model model(double_well(0.0));
    CHECK(kind_of([&] { step(State{0.0, chi0, chemical_potential(chi0, model)}, double_well(0.0), bad); }) ==
          ErrorKind::NewtonDiverged);
  }
  SUBCASE("untruncated singular potential rejects a state outside the domain") {
    ModelParams p;
    p.delta = 0.1;
    p.potential = PotentialSpec::logarithmic(-1.0, 1.0, 3.0);
    Field chi0(g, 0.0);
    chi0[3] = 1.2;
    CHECK(kind_of([&] { step(State{0.0, chi0, chi0}, p, cfg); }) == ErrorKind::DomainEscape);
  }
}

TEST_CASE("run") {
  const auto g = Grid::make_1d(64, 1.0);
  SolverConfig cfg;
  cfg.tau = 1e-3;
  const Field chi0 = noise(g, 0.0, 0.2, 42);
  SUBCASE("t_end = 0 keeps only the initial state") {
    const auto traj = run(chi0, double_well(0.1), cfg);
    CHECK(traj.states.size() == 1);
    CHECK(traj.states[0].t == 0.0);
  }
  SUBCASE("mass conservation and energy dissipation") {
    for (double delta : {0.0, 0.1}) {
      cfg.t_end = 0.2;
      const auto traj = run(chi0, double_well(delta), cfg);
      CHECK(traj.states.size() == 201);
      const Model model(double_well(delta));
      double e_prev = energy(chi0, model.potential()).total;
      const double m0 = mean(chi0);
      int increases = 0;
      for (std::size_t i = 1; i < traj.states.size(); ++i) {
        CHECK(traj.states[i].t > traj.states[i - 1].t);
        CHECK(std::abs(mean(traj.states[i].chi) - m0) <= 1e-11);
        const double e = energy(traj.states[i].chi, model.potential()).total;
        if (e > e_prev + 1e-8) ++increases;
        e_prev = e;
      }
      CHECK(increases == 0);
      CHECK(traj.states.back().t == 0.2);
    }
  }
  SUBCASE("save stride and observers") {
    cfg.t_end = 0.0105;
    cfg.save_stride = 4;
    int calls = 0;
    const auto traj = run(chi0, double_well(0.1), cfg, {[&](const State&, const StepStats&) { ++calls; }});
    CHECK(calls == 12);  // initial state plus 11 steps, the last one short
    CHECK(traj.states.size() == 4);
    CHECK(traj.states[1].t == doctest::Approx(0.004));
    CHECK(traj.states.back().t == 0.0105);
  }
  SUBCASE("determinism") {
    cfg.t_end = 0.05;
    const auto a = run(chi0, double_well(0.0), cfg);
    const auto b = run(noise(g, 0.0, 0.2, 42), double_well(0.0), cfg);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i) {
      for (std::size_t j = 0; j < chi0.size(); ++j) {
        CHECK(a.states[i].chi[j] == b.states[i].chi[j]);
        CHECK(a.states[i].w[j] == b.states[i].w[j]);
      }
    }
  }
  SUBCASE("step halving recovers from a failed step") {
    const auto gs = Grid::make_1d(32, 8.0);
    SolverConfig c2;
    c2.tau = 0.78125;
    c2.t_end = 0.78125;
    c2.newton_max_iters = 5;  // the full step needs 6 updates, half steps fewer
    StepStats seen;
    const auto traj = run(noise(gs, 0.0, 3.0, 4), double_well(0.0, 0.0), c2,
                          {[&](const State&, const StepStats& st) { seen = st; }});
    CHECK(traj.states.back().t == 0.78125);
    CHECK(seen.tau == doctest::Approx(c2.tau / 2));
    c2.newton_max_iters = 1;
    CHECK(kind_of([&] { run(noise(gs, 0.0, 3.0, 4), double_well(0.0, 0.0), c2); }) == ErrorKind::NewtonDiverged);
  }
}

TEST_CASE("linearized dispersion about chi = 0") {
  // Growth factor of backward Euler with the concave part explicit:
  // g = (1 + a tau lambda) / (1 + a tau lambda^2), a = alpha'(0).
  const double L = 32.0;
  const auto g = Grid::make_1d(128, L);
  for (double p : {0.0, 1.0}) {
    const auto params = double_well(0.0, p);
    const double a = p == 0.0 ? 2.0 : 1.0;
    SolverConfig cfg;
    cfg.tau = 0.01;
    cfg.newton_tol = 1e-18;
    const std::size_t k = 7;
    const double lam = g->basis(0).eigenvalues[k];
    Field chi(g);
    for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = 1e-6 * g->basis(0).matrix[k * 128 + i];
    const Model model(params);
    State s{0.0, chi, chemical_potential(chi, model)};
    const double c0 = to_cosine(s.chi)[k];
    for (int n = 0; n < 20; ++n) s = step(s, params, cfg);
    const double rate = std::log(to_cosine(s.chi)[k] / c0) / (20 * cfg.tau);
    CHECK(rate == doctest::Approx(std::log((1 + a * cfg.tau * lam) / (1 + a * cfg.tau * lam * lam)) / cfg.tau)
                      .epsilon(1e-6));
    CHECK(rate == doctest::Approx(-a * lam * (lam - 1)).epsilon(0.05));
  }
}

TEST_CASE("first-order self-convergence in time") {
  const auto g = Grid::make_1d(64, 2 * M_PI);
  InitSpec init;
  init.kind = InitKind::Cosine;
  init.amplitude = 0.5;
  init.mode = {2};
  const Field chi0 = initial_field(init, g);
  const auto params = double_well(0.1);
  auto final_state = [&](double tau) {
    SolverConfig cfg;
    cfg.tau = tau;
    cfg.t_end = 1.0;
    cfg.newton_tol = 1e-12;
    return run(chi0, params, cfg).states.back().chi;
  };
  const Field ref = final_state(0.025 / 8);
  const double e1 = l2_norm(final_state(0.1) - ref);
  const double e2 = l2_norm(final_state(0.05) - ref);
  const double e3 = l2_norm(final_state(0.025) - ref);
  CHECK(e1 / e2 >= 1.7);
  CHECK(e1 / e2 <= 2.5);
  CHECK(e2 / e3 >= 1.7);
  CHECK(e2 / e3 <= 2.5);
}

TEST_CASE("initial fields") {
  const auto g = Grid::make_1d(100, 1.0);
  InitSpec s;
  s.kind = InitKind::Cosine;
  s.amplitude = 0.1;
  s.mode = {1};
  const Field c = initial_field(s, g);
  CHECK(std::abs(mean(c)) <= 1e-14);
  CHECK(c.max_abs() == doctest::Approx(0.1).epsilon(1e-14));

  s.kind = InitKind::UniformNoise;
  s.m0 = 0.3;
  s.seed = 77;
  const Field a = initial_field(s, g);
  const Field b = initial_field(s, g);
  CHECK(std::abs(mean(a) - 0.3) <= 1e-14);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  s.seed = 78;
  CHECK(initial_field(s, g)[0] != a[0]);

  s.lowpass_cutoff = 5;
  const Field smooth = initial_field(s, g);
  CHECK(std::abs(mean(smooth) - 0.3) <= 1e-14);
  const Field coeffs = to_cosine(smooth);
  for (std::size_t k = 5; k < coeffs.size(); ++k) CHECK(std::abs(coeffs[k]) < 1e-14);

  const auto lg = PotentialSpec::logarithmic(-1.0, 1.0, 3.0);
  s.lowpass_cutoff.reset();
  s.m0 = 0.95;
  s.amplitude = 0.1;
  CHECK(kind_of([&] { initial_field(s, g, &lg); }) == ErrorKind::MeanOutOfDomain);
  s.m0 = 0.5;
  CHECK_NOTHROW(initial_field(s, g, &lg));

  const auto g2 = Grid::make_2d(8, 6, 1.0, 2.0);
  s.kind = InitKind::Cosine;
  s.m0 = 0.0;
  s.mode = {1, 2};
  const Field c2 = initial_field(s, g2);
  CHECK(c2.max_abs() == doctest::Approx(0.1));
  CHECK(std::abs(mean(c2)) < 1e-15);
}

TEST_CASE("rest points") {
  const auto g = Grid::make_1d(64, 8.0);
  SUBCASE("uniform guess returns the uniform rest point") {
    const auto r = solve_rest_point(0.3, double_well(0.0), g, Field(g, 0.3));
    for (double v : r.chi.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(r.w_bar == doctest::Approx(0.3 * 0.3 * 0.3 - 0.3));
    CHECK(r.iterations == 1);
  }
  SUBCASE("single interface") {
    Field guess(g);
    for (std::size_t i = 0; i < guess.size(); ++i) guess[i] = std::tanh((g->centre(0, i) - 4.0) / std::sqrt(2.0));
    const auto params = double_well(0.0);
    const auto r = solve_rest_point(0.0, params, g, guess);
    const Model model(params);
    CHECK(r.residual < 1e-10);
    CHECK(std::abs(r.w_bar) < 1e-3);
    CHECK(r.w_bar == doctest::Approx(mean(model.phi(r.chi))).epsilon(1e-12));
    CHECK(std::abs(mean(r.chi)) < 1e-14);
    CHECK(r.chi.max_abs() > 0.9);
    // Stationary under the time stepper.
    SolverConfig cfg;
    cfg.tau = 1e-2;
    State s{0.0, r.chi, Field(g, r.w_bar)};
    const State next = step(s, params, cfg);
    CHECK(l2_norm(next.chi - s.chi) < cfg.tau * 1e-6);
  }
}
