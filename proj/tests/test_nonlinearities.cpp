#include <cmath>
#include <vector>

#include "doctest.h"
#include "gencahn/error.hpp"
#include "gencahn/nonlinearities.hpp"
#include "gencahn/random.hpp"

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

double central_difference(auto&& f, double r, double h) { return (f(r + h) - f(r - h)) / (2 * h); }

}  // namespace

TEST_CASE("built-in mobility") {
  const auto m1 = MobilitySpec::polynomial(1.0);
  CHECK(alpha(m1, 1.0) == 2.0);
  CHECK(alpha(m1, 0.0) == 0.0);
  for (double p : {0.0, 0.5, 1.0, 2.0}) {
    const auto m = MobilitySpec::polynomial(p);
    CHECK(alpha_prime(m, 0.0) == doctest::Approx(p == 0.0 ? 2.0 : 1.0));
    CHECK(alpha(m, -0.7) == doctest::Approx(-alpha(m, 0.7)));
  }
  SUBCASE("H1 constants for p = 1 from a dense sample") {
    double lo = 1e300, hi = 0.0;
    for (int i = -200000; i <= 200000; ++i) {
      const double r = i * 1e-3;
      const double ratio = alpha_prime(m1, r) / (r * r + 1.0);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(lo == doctest::Approx(1.0));
    CHECK(hi == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(lo >= m1.c1);
    CHECK(hi <= m1.c2);
  }
  SUBCASE("alpha' is the derivative of alpha") {
    for (double p : {0.0, 0.5, 1.0, 1.5}) {
      const auto m = MobilitySpec::polynomial(p);
      for (double r : {-2.1, -0.4, 0.3, 1.7}) {
        auto f = [&](double x) { return alpha(m, x); };
        const double e1 = std::abs(central_difference(f, r, 1e-3) - alpha_prime(m, r));
        const double e2 = std::abs(central_difference(f, r, 5e-4) - alpha_prime(m, r));
        CHECK(e1 < 1e-4 * (1 + std::abs(alpha_prime(m, r))));
        if (e1 > 1e-10) CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));  // O(h^2)
      }
    }
  }
}

TEST_CASE("tabulated mobility") {
  std::vector<std::pair<double, double>> table;
  for (int i = -10; i <= 10; ++i) {
    const double r = 0.5 * i;
    table.push_back({r, r + r * r * r / 3.0});
  }
  const auto m = MobilitySpec::tabulated(1.0, table, {-5.0, 5.0});
  for (const auto& [r, a] : table) CHECK(alpha(m, r) == doctest::Approx(a).epsilon(1e-14));
  double prev = alpha(m, -8.0);
  for (int i = 1; i <= 1600; ++i) {
    const double r = -8.0 + 0.01 * i;
    const double v = alpha(m, r);
    CHECK(v > prev);
    CHECK(alpha_prime(m, r) > 0.0);
    prev = v;
  }
  CHECK(m.c1 > 0.0);
  CHECK(m.c2 >= m.c1);
  CHECK_THROWS_AS(MobilitySpec::tabulated(1.0, {{0.0, 1.0}, {1.0, 0.5}}), Error);
}

TEST_CASE("alpha_M truncation and its inverse") {
  const auto m = MobilitySpec::polynomial(1.0);
  CHECK(alpha_trunc(m, 1.0, 2.0) == 3.0);
  CHECK(alpha_trunc(m, 1.0, -2.0) == -3.0);
  for (double r : {-0.9, -0.2, 0.0, 0.5, 1.0}) CHECK(alpha_trunc(m, 1.0, r) == alpha(m, r));
  for (double M : {0.5, 1.0, 3.0}) {
    for (double s : {-1.0, 1.0}) {
      const double e = 1e-9;
      CHECK(alpha_trunc(m, M, s * (M + e)) == doctest::Approx(alpha_trunc(m, M, s * (M - e))).epsilon(1e-8));
    }
  }
  CHECK(kind_of([&] { alpha_trunc(m, 0.0, 1.0); }) == ErrorKind::NonPositiveM);
  CHECK(kind_of([&] { alpha_trunc_inverse(m, -1.0, 1.0); }) == ErrorKind::NonPositiveM);

  CHECK(alpha_trunc_inverse(m, 1.0, 3.0) == 2.0);
  CHECK(alpha_trunc_inverse(m, 1.0, 0.0) == 0.0);

  Rng rng(17);
  for (double M : {0.5, 2.0, 8.0}) {
    for (int i = 0; i < 1000; ++i) {
      const double r = rng.uniform(-3 * M, 3 * M);
      CHECK(std::abs(alpha_trunc_inverse(m, M, alpha_trunc(m, M, r)) - r) <= 1e-12 * std::max(1.0, std::abs(r)));
      CHECK(alpha_trunc_prime(m, M, r) >= m.c1);
    }
    // Lipschitz bound of the inverse.
    for (int i = 0; i < 1000; ++i) {
      const double x = rng.uniform(-50, 50);
      const double y = rng.uniform(-50, 50);
      CHECK(std::abs(alpha_trunc_inverse(m, M, x) - alpha_trunc_inverse(m, M, y)) <=
            std::abs(x - y) / m.c1 * (1 + 1e-12) + 1e-14);
    }
  }
}

TEST_CASE("potentials") {
  const auto dw = PotentialSpec::double_well();
  CHECK(phi(dw, 1.0) == 0.0);
  CHECK(phi_hat(dw, 0.0) == 0.25);
  CHECK(phi_prime(dw, 0.0) == -1.0);
  CHECK(dw.c_split == 1.0);

  const auto lg = PotentialSpec::logarithmic(-1.0, 1.0, 0.0);
  CHECK(phi(lg, 0.0) == 0.0);
  CHECK(phi(lg, 1.0 - 1e-10) > 20.0);
  CHECK(phi(lg, -1.0 + 1e-10) < -20.0);
  CHECK(kind_of([&] { phi(lg, 1.0); }) == ErrorKind::OutOfDomain);
  CHECK(kind_of([&] { phi(lg, 1.0 - 1e-13); }) == ErrorKind::OutOfDomain);
  CHECK(kind_of([&] { phi_hat(lg, -2.0); }) == ErrorKind::OutOfDomain);

  const auto lg3 = PotentialSpec::logarithmic(-1.0, 1.0, 3.0);
  CHECK(lg3.c_split == doctest::Approx(1.0));

  // Same double well through the generic polynomial path.
  const auto pw = PotentialSpec::even_polynomial({0.25, 0.0, -0.5, 0.0, 0.25});
  CHECK(pw.shift == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pw.c_split == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pw.coercive);
  const auto shifted = PotentialSpec::even_polynomial({0.0, 0.0, -1.0, 0.0, 1.0});
  CHECK(shifted.shift == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_FALSE(PotentialSpec::even_polynomial({0.25, 0.0, -0.5, 0.0, -0.25}).coercive);
  CHECK_THROWS_AS(PotentialSpec::even_polynomial({1.0, 0.0, 1.0}), Error);

  SUBCASE("phi_hat' = phi and phi_hat >= 0 (finite differences)") {
    for (const auto& pot : {dw, lg, lg3, pw, shifted}) {
      for (int i = -19; i <= 19; ++i) {
        const double r = pot.singular() ? 0.05 * i : 0.15 * i;
        auto hat = [&](double x) { return phi_hat(pot, x); };
        auto ph = [&](double x) { return phi(pot, x); };
        CHECK(std::abs(central_difference(hat, r, 1e-4) - phi(pot, r)) <= 1e-6 * (1 + std::abs(phi(pot, r))));
        CHECK(std::abs(central_difference(ph, r, 1e-4) - phi_prime(pot, r)) <=
              1e-5 * (1 + std::abs(phi_prime(pot, r))));
        CHECK(phi_hat(pot, r) >= -1e-12);
      }
    }
  }
}

TEST_CASE("phi_mu truncation") {
  const auto dw = PotentialSpec::double_well();
  const auto lg = PotentialSpec::logarithmic(-1.0, 1.0, 0.0);
  CHECK(phi_trunc(dw, 0.5, 2.0) == 2.0);
  CHECK(phi_trunc(dw, 0.5, -2.0) == -2.0);
  CHECK(phi_trunc(dw, 0.1, 1.0) == 0.0);
  CHECK(phi_trunc(lg, 0.5, 1.0) == 2.0);
  CHECK(phi_trunc(lg, 0.5, -1.0) == -2.0);
  CHECK(phi_trunc(lg, 0.5, 3.0) == 2.0);
  CHECK(kind_of([&] { phi_trunc(dw, 0.0, 1.0); }) == ErrorKind::NonPositiveMu);

  SUBCASE("effective potential agrees with the literal clamp and is continuous") {
    for (const auto& pot : {dw, lg, PotentialSpec::logarithmic(-1.0, 1.0, 3.0)}) {
      for (double mu : {1.0, 0.5, 0.25}) {
        const EffectivePotential eff(pot, mu);
        for (int i = -400; i <= 400; ++i) {
          const double r = 0.005 * i;
          CHECK(eff.phi(r) == doctest::Approx(phi_trunc(pot, mu, r)).epsilon(1e-9));
          auto hat = [&](double x) { return eff.phi_hat(x); };
          CHECK(central_difference(hat, r, 1e-6) == doctest::Approx(eff.phi(r)).epsilon(1e-5));
          CHECK(eff.beta_prime(r) >= 0.0);
        }
        CHECK(eff.phi(eff.upper_break()) == doctest::Approx(1.0 / mu).epsilon(1e-12));
        CHECK(eff.phi(eff.lower_break()) == doctest::Approx(-1.0 / mu).epsilon(1e-12));
      }
    }
  }
  SUBCASE("too coarse a clamp is rejected") {
    CHECK_THROWS_AS(EffectivePotential(dw, 5.0), Error);
  }
}

TEST_CASE("truncations converge on compacts, monotonically in the level") {
  const auto m = MobilitySpec::polynomial(1.0);
  std::vector<double> dist_M;
  for (double M : {1.0, 2.0, 4.0, 8.0}) {
    double d = 0.0;
    for (int i = -300; i <= 300; ++i) d = std::max(d, std::abs(alpha_trunc(m, M, 0.01 * i) - alpha(m, 0.01 * i)));
    dist_M.push_back(d);
  }
  CHECK(dist_M[0] > dist_M[1]);
  CHECK(dist_M[1] > dist_M[2]);
  CHECK(dist_M[2] >= dist_M[3]);
  CHECK(dist_M[3] == 0.0);

  for (const auto& pot : {PotentialSpec::double_well(), PotentialSpec::logarithmic(-1.0, 1.0, 0.0)}) {
    std::vector<double> dist_mu;
    const double R = pot.singular() ? 0.999 : 2.0;
    for (double mu : {1.0, 0.5, 0.25}) {
      double d = 0.0;
      for (int i = -1000; i <= 1000; ++i) {
        const double r = R * i / 1000.0;
        d = std::max(d, std::abs(phi_trunc(pot, mu, r) - phi(pot, r)));
      }
      dist_mu.push_back(d);
    }
    CHECK(dist_mu[0] > dist_mu[1]);
    CHECK(dist_mu[1] > dist_mu[2]);
  }
}

TEST_CASE("convex split") {
  const auto dw = PotentialSpec::double_well();
  for (double r : {-1.5, 0.0, 0.3, 2.0}) {
    const auto s = split_convex(dw, r);
    CHECK(s.c_split == 1.0);
    CHECK(s.beta_value == doctest::Approx(r * r * r));
  }
  Rng rng(23);
  for (const auto& pot : {dw, PotentialSpec::logarithmic(-1.0, 1.0, 3.0)}) {
    const double R = pot.singular() ? 0.99 : 3.0;
    for (int i = 0; i < 1000; ++i) {
      double a = rng.uniform(-R, R), b = rng.uniform(-R, R);
      if (a > b) std::swap(a, b);
      CHECK(split_convex(pot, b).beta_value >= split_convex(pot, a).beta_value);
    }
    const double h = 1e-3;
    for (int i = -900; i <= 900; ++i) {
      const double r = R * i / 1000.0;
      auto g = [&](double x) { return phi_hat(pot, x) + 0.5 * pot.c_split * x * x; };
      CHECK(g(r + h) - 2 * g(r) + g(r - h) >= -1e-12);
    }
  }
  CHECK(kind_of([&] { split_convex(PotentialSpec::logarithmic(-1, 1, 0), 1.5); }) == ErrorKind::OutOfDomain);
}

TEST_CASE("integrability indices") {
  CHECK(indices(1.0, 0.5).sigma_min == doctest::Approx(3.0 / 8.0));
  CHECK(indices(2.0, 0.5).sigma_min == doctest::Approx(9.0 / 14.0));
  CHECK_FALSE(indices(2.0, 0.5).compatible);
  CHECK(indices(2.0, 0.7).compatible);
  CHECK(indices(0.0, 0.5).eta_p_sigma == doctest::Approx(11.0 / 3.0));
  CHECK(indices(0.0, 0.5).rho_p == 2.0);
  CHECK(indices(0.0, 0.5).kappa_p == 6.0);
  CHECK(kind_of([] { indices(1.0, 1.0); }) == ErrorKind::SigmaOutOfRange);
  CHECK(kind_of([] { indices(1.0, 0.0); }) == ErrorKind::SigmaOutOfRange);

  double prev_rho = 3.0, prev_kappa = 7.0;
  for (double p = 0.0; p <= 5.0; p += 0.25) {
    const auto s = indices(p, 0.9);
    CHECK(s.rho_p < prev_rho);
    CHECK(s.kappa_p < prev_kappa);
    CHECK(s.rho_p > 1.0);
    CHECK(s.rho_p <= 2.0);
    CHECK(s.kappa_p > 3.0);
    CHECK(s.kappa_p <= 6.0);
    prev_rho = s.rho_p;
    prev_kappa = s.kappa_p;
    // eta > 1 throughout the admissible window
    for (double sigma = s.sigma_min + 1e-3; sigma < 1.0; sigma += 0.01) {
      CHECK(indices(p, sigma).eta_p_sigma > 1.0);
    }
  }
}

TEST_CASE("hypothesis audit") {
  const auto mob = MobilitySpec::polynomial(1.0);
  SUBCASE("double well with the built-in mobility") {
    const auto r = audit_hypotheses(mob, PotentialSpec::double_well(), {-3, 3}, 2001, 0.5);
    for (const char* h : {"H1", "H2", "H3", "H4", "H5", "H6", "H8", "H9", "H10"}) {
      CAPTURE(h);
      CHECK(r.at(h).satisfied);
    }
    CHECK_FALSE(r.at("H7").satisfied);  // alpha' unbounded for p = 1
    CHECK(r.passed());
    CHECK_FALSE(r.passed(true));
    CHECK(r.at("H1").constants.at("C1") == doctest::Approx(1.0));
    CHECK(r.at("H1").constants.at("C2") == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(r.at("H9").constants.at("c_alpha") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.at("H6").constants.at("C_phi2") == doctest::Approx(1.0));
  }
  SUBCASE("p = 0 satisfies the uniqueness hypotheses too") {
    const auto r = audit_hypotheses(MobilitySpec::polynomial(0.0), PotentialSpec::double_well(), {-3, 3}, 2001, 0.5);
    CHECK(r.passed(true));
    CHECK(r.at("H7").constants.at("C9") == 2.0);
    CHECK(r.at("H7").constants.at("C10") == 2.0);
  }
  SUBCASE("logarithmic potential") {
    const auto pot = PotentialSpec::logarithmic(-1.0, 1.0, 3.0);
    for (double sigma : {0.4, 0.6, 0.9}) {
      const auto r = audit_hypotheses(mob, pot, {-1, 1}, 2001, sigma);
      CHECK(r.at("H2").satisfied);
      CHECK(r.at("H3").satisfied);
      CHECK_FALSE(r.at("H5").applicable);
      CHECK_FALSE(r.at("H10").applicable);
    }
  }
  SUBCASE("negated leading coefficient breaks H10") {
    const auto bad = PotentialSpec::even_polynomial({0.25, 0.0, -0.5, 0.0, -0.25});
    const auto r = audit_hypotheses(mob, bad, {-3, 3}, 2001, 0.5);
    CHECK_FALSE(r.at("H10").satisfied);
    CHECK_FALSE(r.passed());
  }
  SUBCASE("tabulated mobility is audited on its range") {
    std::vector<std::pair<double, double>> table;
    for (int i = -12; i <= 12; ++i) table.push_back({0.5 * i, 0.5 * i + std::pow(0.5 * i, 3)});
    const auto tab = MobilitySpec::tabulated(1.0, table, {-6, 6});
    const auto r = audit_hypotheses(tab, PotentialSpec::double_well(), {-6, 6}, 1001, 0.5);
    CHECK(r.at("H1").satisfied);
    CHECK(r.at("H1").constants.at("C1") == doctest::Approx(tab.c1).epsilon(1e-3));
  }
  SUBCASE("incompatible sigma") {
    const auto r = audit_hypotheses(MobilitySpec::polynomial(2.0), PotentialSpec::double_well(), {-3, 3}, 501, 0.5);
    CHECK_FALSE(r.at("H4").satisfied);
  }
  CHECK(kind_of([&] { audit_hypotheses(mob, PotentialSpec::logarithmic(-1, 1, 0), {2, 3}, 100, 0.5); }) ==
        ErrorKind::EmptyRange);
}
