#include "gencahn/nonlinearities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "gencahn/error.hpp"

namespace gencahn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign(double r) { return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Golden-section minimisation of a unimodal bracket.
double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

// Global minimum value of f over [lo, hi] by dense sampling followed by a
// golden-section polish around the best sample.
double sampled_min(const std::function<double(double)>& f, double lo, double hi,
                   std::size_t n = 20001) {
  double best_x = lo;
  double best = kInf;
  const double dx = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + dx * static_cast<double>(i);
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  const double a = std::max(lo, best_x - dx);
  const double b = std::min(hi, best_x + dx);
  return std::min(best, f(golden_min(f, a, b)));
}

double poly(const std::vector<double>& c, double r) {
  double s = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) s = s * r + c[j];
  return s;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t j = 1; j < c.size(); ++j) d.push_back(static_cast<double>(j) * c[j]);
  return d;
}

double cauchy_radius(const std::vector<double>& c) {
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < c.size(); ++j) s += std::abs(c[j]);
  return 2.0 + static_cast<double>(c.size()) * s / std::abs(c.back());
}

double require_domain(const PotentialSpec& spec, double r) {
  if (!in_domain(spec, r)) {
    throw Error(ErrorKind::OutOfDomain, "r = " + fmt(r) + " outside (" + fmt(spec.domain.lo) +
                                            ", " + fmt(spec.domain.hi) + ")");
  }
  return r;
}

double raw_phi_hat(const PotentialSpec& spec, double r) {
  switch (spec.kind) {
    case PotentialKind::DoubleWell: {
      const double s = r * r - 1.0;
      return 0.25 * s * s;
    }
    case PotentialKind::EvenPolynomial:
      return poly(spec.coeffs, r);
    case PotentialKind::Logarithmic: {
      const double a = spec.domain.lo;
      const double b = spec.domain.hi;
      auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
      return xlogx(r - a) + xlogx(b - r) - 0.5 * spec.lambda * r * r;
    }
  }
  return 0.0;
}

// --- PCHIP -----------------------------------------------------------------

std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    delta[k] = (y[k + 1] - y[k]) / h[k];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    const double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    // Keeps the end slope strictly positive inside the Fritsch-Carlson
    // monotonicity region.
    return std::clamp(s, 0.5 * d0, 3.0 * d0);
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

std::pair<double, double> pchip_eval(const MobilitySpec& s, double r) {
  const auto& x = s.nodes;
  const auto& y = s.values;
  const auto& d = s.slopes;
  if (r <= x.front()) return {y.front() + d.front() * (r - x.front()), d.front()};
  if (r >= x.back()) return {y.back() + d.back() * (r - x.back()), d.back()};
  const std::size_t k =
      static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r) - x.begin()) - 1;
  const double h = x[k + 1] - x[k];
  const double t = (r - x[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double value = (2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + t) * h * d[k] +
                       (-2 * t3 + 3 * t2) * y[k + 1] + (t3 - t2) * h * d[k + 1];
  const double slope = ((6 * t2 - 6 * t) * y[k] + (3 * t2 - 4 * t + 1) * h * d[k] +
                        (-6 * t2 + 6 * t) * y[k + 1] + (3 * t2 - 2 * t) * h * d[k + 1]) /
                       h;
  return {value, slope};
}

}  // namespace

// --- mobility ---------------------------------------------------------------

MobilitySpec MobilitySpec::polynomial(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) {
    throw Error(ErrorKind::InvalidArgument, "mobility exponent p must be finite and >= 0");
  }
  MobilitySpec s;
  s.form = MobilityForm::PolynomialOdd;
  s.p = p;
  s.c1 = 1.0;
  s.c2 = p == 0.0 ? 1.0 : 2.0 * p + 1.0;
  return s;
}

MobilitySpec MobilitySpec::tabulated(double p, std::vector<std::pair<double, double>> table,
                                     Interval audit_range) {
  if (!(p >= 0.0)) throw Error(ErrorKind::InvalidArgument, "mobility exponent p must be >= 0");
  if (table.size() < 2) throw Error(ErrorKind::InvalidArgument, "mobility table needs >= 2 rows");
  std::sort(table.begin(), table.end());
  MobilitySpec s;
  s.form = MobilityForm::Tabulated;
  s.p = p;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (i > 0 && !(table[i].first > table[i - 1].first && table[i].second > table[i - 1].second)) {
      throw Error(ErrorKind::InvalidArgument, "mobility table must be strictly increasing");
    }
    s.nodes.push_back(table[i].first);
    s.values.push_back(table[i].second);
  }
  s.slopes = pchip_slopes(s.nodes, s.values);
  if (!audit_range.bounded_below() || !audit_range.bounded_above() ||
      !(audit_range.hi > audit_range.lo)) {
    throw Error(ErrorKind::EmptyRange, "tabulated mobility needs a bounded audit range");
  }
  s.c1 = kInf;
  s.c2 = 0.0;
  const std::size_t n = 4001;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = audit_range.lo + (audit_range.hi - audit_range.lo) * static_cast<double>(i) /
                                          static_cast<double>(n - 1);
    const double ratio = alpha_prime(s, r) / (std::pow(std::abs(r), 2.0 * p) + 1.0);
    s.c1 = std::min(s.c1, ratio);
    s.c2 = std::max(s.c2, ratio);
  }
  return s;
}

double alpha(const MobilitySpec& spec, double r) {
  if (spec.form == MobilityForm::Tabulated) return pchip_eval(spec, r).first;
  return r + r * std::pow(std::abs(r), 2.0 * spec.p);
}

double alpha_prime(const MobilitySpec& spec, double r) {
  if (spec.form == MobilityForm::Tabulated) return pchip_eval(spec, r).second;
  return 1.0 + (2.0 * spec.p + 1.0) * std::pow(std::abs(r), 2.0 * spec.p);
}

namespace {
void require_positive_M(double M) {
  if (!(M > 0.0)) throw Error(ErrorKind::NonPositiveM, "M must be > 0, got " + fmt(M));
}
}  // namespace

double alpha_trunc(const MobilitySpec& spec, double M, double r) {
  require_positive_M(M);
  if (r > M) return alpha(spec, M) + spec.c1 * (r - M);
  // Continuous left tail: the affine piece passes through (-M, alpha(-M)).
  if (r < -M) return alpha(spec, -M) + spec.c1 * (r + M);
  return alpha(spec, r);
}

double alpha_trunc_prime(const MobilitySpec& spec, double M, double r) {
  require_positive_M(M);
  if (r > M || r < -M) return spec.c1;
  return alpha_prime(spec, r);
}

double alpha_trunc_inverse(const MobilitySpec& spec, double M, double x) {
  require_positive_M(M);
  const double top = alpha(spec, M);
  const double bottom = alpha(spec, -M);
  if (x >= top) return M + (x - top) / spec.c1;
  if (x <= bottom) return -M + (x - bottom) / spec.c1;
  double lo = -M;
  double hi = M;
  double r = std::clamp(x / alpha_prime(spec, 0.0), lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = alpha(spec, r) - x;
    if (f == 0.0) return r;
    if (f > 0.0) hi = r; else lo = r;
    const double slope = alpha_prime(spec, r);
    double next = r - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-16 * std::max(1.0, std::abs(r)) || hi - lo <= 1e-300) {
      return next;
    }
    r = next;
  }
  throw Error(ErrorKind::NoConvergence, "alpha_M inversion did not converge for x = " + fmt(x));
}

EffectiveMobility::EffectiveMobility(MobilitySpec spec, std::optional<double> M)
    : spec_(std::move(spec)), M_(M) {
  if (M_) require_positive_M(*M_);
}

double EffectiveMobility::alpha(double r) const {
  return M_ ? alpha_trunc(spec_, *M_, r) : gencahn::alpha(spec_, r);
}

double EffectiveMobility::alpha_prime(double r) const {
  return M_ ? alpha_trunc_prime(spec_, *M_, r) : gencahn::alpha_prime(spec_, r);
}

// --- potentials -------------------------------------------------------------

PotentialSpec PotentialSpec::double_well() {
  PotentialSpec s;
  s.kind = PotentialKind::DoubleWell;
  s.shift = 0.0;
  s.c_split = 1.0;
  return s;
}

PotentialSpec PotentialSpec::even_polynomial(std::vector<double> coeffs) {
  if (coeffs.size() < 5 || coeffs.size() % 2 == 0 || coeffs.back() == 0.0) {
    throw Error(ErrorKind::InvalidArgument,
                "even polynomial potential needs degree m >= 4, m even, nonzero leading term");
  }
  PotentialSpec s;
  s.kind = PotentialKind::EvenPolynomial;
  s.coeffs = std::move(coeffs);
  s.coercive = s.coeffs.back() > 0.0;
  const double R = cauchy_radius(s.coeffs);
  const auto c = s.coeffs;
  const auto d2 = derivative(derivative(c));
  if (s.coercive) s.shift = -sampled_min([&](double r) { return poly(c, r); }, -R, R);
  s.c_split = std::max(0.0, -sampled_min([&](double r) { return poly(d2, r); }, -R, R));
  return s;
}

PotentialSpec PotentialSpec::logarithmic(double a, double b, double lambda) {
  if (!(a < 0.0 && 0.0 < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorKind::InvalidArgument, "logarithmic potential needs a < 0 < b, both finite");
  }
  if (!std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be finite");
  PotentialSpec s;
  s.kind = PotentialKind::Logarithmic;
  s.lambda = lambda;
  s.domain = {a, b};
  s.c_split = std::max(0.0, lambda - 4.0 / (b - a));
  // xlogx terms are continuous up to the endpoints, so sample the closure.
  s.shift = -sampled_min([&](double r) { return raw_phi_hat(s, r); }, a, b);
  return s;
}

bool in_domain(const PotentialSpec& spec, double r) {
  if (!std::isfinite(r)) return false;
  if (spec.domain.bounded_below() && !(r > spec.domain.lo + kDomainGuard)) return false;
  if (spec.domain.bounded_above() && !(r < spec.domain.hi - kDomainGuard)) return false;
  return true;
}

double phi(const PotentialSpec& spec, double r) {
  switch (spec.kind) {
    case PotentialKind::DoubleWell:
      return r * r * r - r;
    case PotentialKind::EvenPolynomial:
      return poly(derivative(spec.coeffs), r);
    case PotentialKind::Logarithmic:
      require_domain(spec, r);
      return std::log((r - spec.domain.lo) / (spec.domain.hi - r)) - spec.lambda * r;
  }
  return 0.0;
}

double phi_prime(const PotentialSpec& spec, double r) {
  switch (spec.kind) {
    case PotentialKind::DoubleWell:
      return 3.0 * r * r - 1.0;
    case PotentialKind::EvenPolynomial:
      return poly(derivative(derivative(spec.coeffs)), r);
    case PotentialKind::Logarithmic:
      require_domain(spec, r);
      return 1.0 / (r - spec.domain.lo) + 1.0 / (spec.domain.hi - r) - spec.lambda;
  }
  return 0.0;
}

double phi_hat(const PotentialSpec& spec, double r) {
  require_domain(spec, r);
  return raw_phi_hat(spec, r) + spec.shift;
}

double phi_trunc(const PotentialSpec& spec, double mu, double r) {
  if (!(mu > 0.0)) throw Error(ErrorKind::NonPositiveMu, "mu must be > 0, got " + fmt(mu));
  if (!in_domain(spec, r)) return sign(r) / mu;
  const double v = phi(spec, r);
  return std::abs(v) <= 1.0 / mu ? v : sign(r) / mu;
}

ConvexSplit split_convex(const PotentialSpec& spec, double r) {
  return {phi(spec, r) + spec.c_split * r, spec.c_split};
}

EffectivePotential::EffectivePotential(PotentialSpec spec, std::optional<double> mu)
    : spec_(std::move(spec)), mu_(mu) {
  if (!mu_) return;
  if (!(*mu_ > 0.0)) throw Error(ErrorKind::NonPositiveMu, "mu must be > 0, got " + fmt(*mu_));
  const double level = 1.0 / *mu_;

  // Working window: the guarded domain, or a symmetric box large enough that
  // |phi| exceeds the clamp level at both ends.
  double lo = spec_.domain.lo + 2.0 * kDomainGuard;
  double hi = spec_.domain.hi - 2.0 * kDomainGuard;
  if (!spec_.domain.bounded_below() || !spec_.domain.bounded_above()) {
    double R = 1.0;
    while ((phi_trunc(spec_, *mu_, R) != level || phi_trunc(spec_, *mu_, -R) != -level) &&
           R < 1e6) {
      R *= 2.0;
    }
    lo = spec_.domain.bounded_below() ? lo : -R;
    hi = spec_.domain.bounded_above() ? hi : R;
  }
  if (!(gencahn::phi(spec_, hi) > level && gencahn::phi(spec_, lo) < -level)) {
    throw Error(ErrorKind::InvalidArgument,
                "mu = " + fmt(*mu_) + " does not clamp phi inside the working window");
  }
  auto crossing = [&](double inside, double outside, double target) {
    // phi - target changes sign between inside and outside.
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (inside + outside);
      if (mid == inside || mid == outside) break;
      const double v = gencahn::phi(spec_, mid);
      if ((target > 0.0 && v > target) || (target < 0.0 && v < target)) outside = mid;
      else inside = mid;
    }
    return inside;
  };
  // Scan inward from each end to the first sample with |phi| <= level.
  const std::size_t n = 20001;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1.0);
  std::size_t top = n - 1;
  while (top > 0 && gencahn::phi(spec_, xs[top]) > level) --top;
  std::size_t bottom = 0;
  while (bottom < n - 1 && gencahn::phi(spec_, xs[bottom]) < -level) ++bottom;
  if (bottom >= top) {
    throw Error(ErrorKind::InvalidArgument, "truncation level leaves no unclamped region");
  }
  r_hi_ = crossing(xs[top], xs[top + 1], level);
  r_lo_ = crossing(xs[bottom], xs[bottom - 1], -level);
  if (!(r_lo_ < 0.0 && r_hi_ > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "truncation breakpoints must straddle 0");
  }
  for (std::size_t i = bottom; i <= top; ++i) {
    if (std::abs(gencahn::phi(spec_, xs[i])) > level) {
      throw Error(ErrorKind::InvalidArgument,
                  "mu = " + fmt(*mu_) + " clamps phi inside the wells; phi_mu would jump");
    }
  }
}

double EffectivePotential::phi(double r) const {
  if (!mu_) return gencahn::phi(spec_, r);
  if (r > r_hi_) return 1.0 / *mu_;
  if (r < r_lo_) return -1.0 / *mu_;
  return gencahn::phi(spec_, r);
}

double EffectivePotential::phi_prime(double r) const {
  if (!mu_) return gencahn::phi_prime(spec_, r);
  if (r > r_hi_ || r < r_lo_) return 0.0;
  return gencahn::phi_prime(spec_, r);
}

double EffectivePotential::phi_hat(double r) const {
  if (!mu_) return gencahn::phi_hat(spec_, r);
  if (r > r_hi_) return gencahn::phi_hat(spec_, r_hi_) + (r - r_hi_) / *mu_;
  if (r < r_lo_) return gencahn::phi_hat(spec_, r_lo_) + (r_lo_ - r) / *mu_;
  return gencahn::phi_hat(spec_, r);
}

// --- indices ----------------------------------------------------------------

IndexSet indices(double p, double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw Error(ErrorKind::SigmaOutOfRange, "sigma must lie in (0,1), got " + fmt(sigma));
  }
  if (!(p >= 0.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 0");
  IndexSet s;
  s.p = p;
  s.sigma = sigma;
  s.rho_p = (2.0 * p + 2.0) / (2.0 * p + 1.0);
  s.kappa_p = (6.0 * p + 6.0) / (2.0 * p + 1.0);
  s.eta_p_sigma = (6.0 - sigma) / ((3.0 - 3.0 * sigma) * (2.0 * p + 1.0));
  s.sigma_min = std::max((6.0 * p - 3.0) / (6.0 * p + 2.0), 0.0);
  s.compatible = sigma > s.sigma_min;
  return s;
}

// --- audit ------------------------------------------------------------------

const HypothesisCheck& AuditReport::at(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error(ErrorKind::InvalidArgument, "no audit check named " + name);
}

bool AuditReport::passed(bool include_uniqueness) const {
  for (const auto& c : checks) {
    if (!include_uniqueness && (c.name == "H7" || c.name == "H8")) continue;
    if (c.applicable && !c.satisfied) return false;
  }
  return true;
}

namespace {

// Points approaching one end of the domain: geometric toward a finite
// endpoint, doubling toward infinity.
std::vector<double> tail_sequence(const PotentialSpec& pot, const Interval& range, bool upper) {
  std::vector<double> t;
  const Interval& d = pot.domain;
  if (upper && d.bounded_above()) {
    for (int k = 1; k <= 12; ++k) t.push_back(d.hi - (d.hi - d.lo) * std::pow(10.0, -k));
  } else if (!upper && d.bounded_below()) {
    for (int k = 1; k <= 12; ++k) t.push_back(d.lo + (d.hi - d.lo) * std::pow(10.0, -k));
  } else {
    const double start = std::max(1.0, upper ? std::abs(range.hi) : std::abs(range.lo));
    for (int k = 1; k <= 20; ++k) t.push_back((upper ? 1.0 : -1.0) * start * std::ldexp(1.0, k));
  }
  return t;
}

// Eventually strictly increasing toward the end and large compared with the
// start of the sequence.
bool diverges_up(const std::vector<double>& v) {
  for (std::size_t i = v.size() / 2; i + 1 < v.size(); ++i) {
    if (!(v[i + 1] > v[i])) return false;
  }
  return std::isfinite(v.back()) && v.back() >= 4.0 * std::max(1.0, std::abs(v.front()));
}

// Ratio sequence settles: consecutive tail values agree to 5%.
bool tail_stable(const std::vector<double>& v) {
  if (v.size() < 2) return true;
  const double a = v[v.size() - 2];
  const double b = v.back();
  return std::isfinite(a) && std::isfinite(b) && std::abs(b - a) <= 0.05 * std::max(std::abs(a), std::abs(b));
}

// Ratio sequence does not grow toward the end.
bool tail_bounded(const std::vector<double>& v, double interior_max) {
  if (v.empty()) return true;
  return std::isfinite(v.back()) &&
         (v.back() <= v[v.size() - 2] * (1.0 + 1e-9) || v.back() <= interior_max);
}

}  // namespace

AuditReport audit_hypotheses(const MobilitySpec& mob, const PotentialSpec& pot, Interval range,
                             std::size_t samples, double sigma, double mean_shift) {
  const double lo = std::max(range.lo, pot.domain.bounded_below() ? pot.domain.lo + 1e-9 : -kInf);
  const double hi = std::min(range.hi, pot.domain.bounded_above() ? pot.domain.hi - 1e-9 : kInf);
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi) || samples < 3) {
    throw Error(ErrorKind::EmptyRange, "audit range has no interior inside the domain");
  }
  AuditReport report;
  report.range = {lo, hi};
  report.samples = samples;
  report.sigma = sigma;

  std::vector<double> xs(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  const auto up = tail_sequence(pot, report.range, true);
  const auto down = tail_sequence(pot, report.range, false);
  std::vector<double> all = xs;
  all.insert(all.end(), up.begin(), up.end());
  all.insert(all.end(), down.begin(), down.end());

  auto map = [](const std::vector<double>& in, auto f) {
    std::vector<double> out;
    out.reserve(in.size());
    for (double x : in) out.push_back(f(x));
    return out;
  };
  auto vmax = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
  auto vmin = [](const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); };
  const bool unbounded = !pot.domain.bounded_below() && !pot.domain.bounded_above();

  // H1: strict monotonicity and two-sided growth of alpha'.
  {
    HypothesisCheck c{"H1", true, false, {}, {}};
    const double p = mob.p;
    auto ratio = [&](double r) { return alpha_prime(mob, r) / (std::pow(std::abs(r), 2 * p) + 1.0); };
    // alpha does not depend on the potential domain; audit it on the
    // requested range and on doubling tails.
    Interval ar{range.lo, range.hi};
    if (!std::isfinite(ar.lo) || !std::isfinite(ar.hi)) ar = {lo, hi};
    std::vector<double> ys;
    for (std::size_t i = 0; i < samples; ++i) {
      ys.push_back(ar.lo + (ar.hi - ar.lo) * static_cast<double>(i) / static_cast<double>(samples - 1));
    }
    std::vector<double> ut, dt;
    // Tables continue linearly, so only the closed form has meaningful tails.
    for (int k = 1; k <= 20 && mob.form == MobilityForm::PolynomialOdd; ++k) {
      ut.push_back(std::max(1.0, std::abs(ar.hi)) * std::ldexp(1.0, k));
      dt.push_back(-std::max(1.0, std::abs(ar.lo)) * std::ldexp(1.0, k));
    }
    std::vector<double> pts = ys;
    pts.insert(pts.end(), ut.begin(), ut.end());
    pts.insert(pts.end(), dt.begin(), dt.end());
    const auto r = map(pts, ratio);
    bool increasing = vmin(map(pts, [&](double x) { return alpha_prime(mob, x); })) > 0.0;
    for (std::size_t i = 0; i + 1 < ys.size(); ++i) increasing &= alpha(mob, ys[i + 1]) > alpha(mob, ys[i]);
    c.constants["C1"] = vmin(r);
    c.constants["C2"] = vmax(r);
    c.constants["p"] = p;
    c.satisfied = increasing && vmin(r) > 0.0 && std::isfinite(vmax(r)) &&
                  tail_stable(map(ut, ratio)) && tail_stable(map(dt, ratio));
    if (!increasing) c.note = "alpha not strictly increasing on samples";
    else if (!c.satisfied) c.note = "alpha'/(|r|^{2p}+1) not bounded above and below at the tails";
    report.checks.push_back(c);
  }

  const auto phis = map(all, [&](double x) { return phi(pot, x); });
  const auto phi_primes = map(all, [&](double x) { return phi_prime(pot, x); });
  const auto hats = map(all, [&](double x) { return phi_hat(pot, x); });
  const double min_hat = vmin(hats);

  // H2: domain, regularity, blow-up at both ends; semiconvexity and the
  // mean-shift estimate ride along.
  {
    HypothesisCheck c{"H2", true, false, {}, {}};
    const bool domain_ok = pot.domain.lo < 0.0 && 0.0 < pot.domain.hi;
    bool finite = true;
    for (double v : phis) finite &= std::isfinite(v);
    for (double v : phi_primes) finite &= std::isfinite(v);
    const bool up_ok = diverges_up(map(up, [&](double x) { return phi(pot, x); }));
    const bool down_ok = diverges_up(map(down, [&](double x) { return -phi(pot, x); }));
    const bool dup_ok = diverges_up(map(up, [&](double x) { return phi_prime(pot, x); }));
    const bool ddown_ok = diverges_up(map(down, [&](double x) { return phi_prime(pot, x); }));
    c.constants["C_phi1"] = std::max(0.0, -vmin(phi_primes));
    c.constants["min_phi_hat"] = min_hat;
    // |phi(r+m)| <= C_m phi(r+m) r + C_m' with C_m = 1.
    double cm_prime = -kInf;
    for (double s : all) {
      if (!in_domain(pot, s)) continue;
      const double v = phi(pot, s);
      cm_prime = std::max(cm_prime, std::abs(v) - v * (s - mean_shift));
    }
    c.constants["C_m"] = 1.0;
    c.constants["C_m_prime"] = std::max(cm_prime, 0.0);
    c.constants["m"] = mean_shift;
    c.satisfied = domain_ok && finite && up_ok && down_ok && dup_ok && ddown_ok &&
                  min_hat >= -1e-12 && std::isfinite(cm_prime);
    if (!c.satisfied) {
      c.note = !domain_ok ? "domain must satisfy a < 0 < b"
             : !(up_ok && down_ok) ? "phi does not blow up with the right sign at the ends"
             : !(dup_ok && ddown_ok) ? "phi' does not diverge to +inf at the ends"
             : "phi_hat negative or non-finite samples";
    }
    report.checks.push_back(c);
  }

  // H3: |phi|^sigma <= C6 (phi_hat + 1).
  {
    HypothesisCheck c{"H3", true, false, {}, {}};
    auto ratio = [&](double x) { return std::pow(std::abs(phi(pot, x)), sigma) / (phi_hat(pot, x) + 1.0); };
    const auto r = map(all, ratio);
    c.constants["C6"] = vmax(r);
    c.constants["sigma"] = sigma;
    bool ok = std::isfinite(vmax(r)) && sigma > 0.0 && sigma < 1.0;
    // Growth at infinite ends is detectable by sampling; at finite ends the
    // sampled supremum is the estimate.
    const double interior = vmax(map(xs, ratio));
    if (!pot.domain.bounded_above()) ok &= tail_bounded(map(up, ratio), interior);
    if (!pot.domain.bounded_below()) ok &= tail_bounded(map(down, ratio), interior);
    c.satisfied = ok;
    if (!ok) c.note = "|phi|^sigma grows faster than phi_hat";
    report.checks.push_back(c);
  }

  // H4: compatibility of sigma with p.
  {
    HypothesisCheck c{"H4", true, false, {}, {}};
    const double smin = std::max((6.0 * mob.p - 3.0) / (6.0 * mob.p + 2.0), 0.0);
    c.constants["sigma_min"] = smin;
    c.constants["sigma"] = sigma;
    c.satisfied = sigma > smin && sigma < 1.0;
    if (!c.satisfied) c.note = "sigma outside (max{(6p-3)/(6p+2),0}, 1)";
    report.checks.push_back(c);
  }

  // H5, H6, H8, H10 concern potentials defined on the whole line.
  auto not_applicable = [&](const char* name) {
    HypothesisCheck c{name, true, false, {}, {}};
    c.applicable = false;
    c.satisfied = false;
    c.note = "potential domain is bounded";
    report.checks.push_back(c);
  };

  if (unbounded) {
    HypothesisCheck c{"H5", true, false, {}, {}};
    auto ratio = [&](double x) { return std::abs(phi(pot, x)) / (phi_hat(pot, x) + 1.0); };
    const auto r = map(all, ratio);
    const double interior = vmax(map(xs, ratio));
    c.constants["C7"] = vmax(r);
    c.satisfied = std::isfinite(vmax(r)) && min_hat >= -1e-12 &&
                  tail_bounded(map(up, ratio), interior) && tail_bounded(map(down, ratio), interior);
    if (!c.satisfied) c.note = "|phi| not controlled by phi_hat + 1, or phi_hat < 0";
    report.checks.push_back(c);
  } else {
    not_applicable("H5");
  }

  if (unbounded) {
    HypothesisCheck c{"H6", true, false, {}, {}};
    const double interior_min = vmin(map(xs, [&](double x) { return phi_prime(pot, x); }));
    const double m = vmin(phi_primes);
    c.constants["C_phi2"] = std::max(0.0, -m);
    // phi' must not keep decreasing toward either end.
    c.satisfied = std::isfinite(m) && m >= interior_min - 1e-12 * std::max(1.0, std::abs(interior_min));
    if (!c.satisfied) c.note = "phi' unbounded below";
    report.checks.push_back(c);
  } else {
    not_applicable("H6");
  }

  // H7: alpha' bounded above and below (uniqueness setting).
  {
    HypothesisCheck c{"H7", true, false, {}, {}};
    std::vector<double> pts = xs;
    std::vector<double> tail_up, tail_down;
    for (int k = 1; k <= 20; ++k) {
      pts.push_back(std::ldexp(1.0, k));
      pts.push_back(-std::ldexp(1.0, k));
      tail_up.push_back(alpha_prime(mob, std::ldexp(1.0, k)));
      tail_down.push_back(alpha_prime(mob, -std::ldexp(1.0, k)));
    }
    const auto d = map(pts, [&](double x) { return alpha_prime(mob, x); });
    c.constants["C9"] = vmin(d);
    c.constants["C10"] = vmax(d);
    c.satisfied = vmin(d) > 0.0 && tail_stable(tail_up) && tail_stable(tail_down);
    if (!c.satisfied) c.note = "alpha' is not bounded (growth exponent p > 0)";
    report.checks.push_back(c);
  }

  if (unbounded) {
    HypothesisCheck c{"H8", true, false, {}, {}};
    double worst = 0.0;
    for (double x : all) {
      const double cubic = x * x * x - x;
      worst = std::max(worst, std::abs(phi(pot, x) - cubic) / std::max(1.0, std::abs(cubic)));
    }
    c.constants["max_rel_deviation"] = worst;
    c.satisfied = worst <= 1e-12;
    if (!c.satisfied) c.note = "phi differs from r^3 - r";
    report.checks.push_back(c);
  } else {
    not_applicable("H8");
  }

  // H9: alpha(r) r - c_alpha |r|^{2p+2} = Psi(r) with Psi >= 0 convex.
  {
    HypothesisCheck c{"H9", true, false, {}, {}};
    const double e = 2.0 * mob.p + 2.0;
    std::vector<double> pts = xs;
    for (int k = 1; k <= 20; ++k) {
      pts.push_back(std::ldexp(1.0, k));
      pts.push_back(-std::ldexp(1.0, k));
    }
    double c_alpha = kInf;
    for (double x : pts) {
      if (x == 0.0) continue;
      c_alpha = std::min(c_alpha, alpha(mob, x) * x / std::pow(std::abs(x), e));
    }
    auto psi = [&](double x) { return alpha(mob, x) * x - c_alpha * std::pow(std::abs(x), e); };
    // Convexity by second differences on a symmetric uniform stencil.
    const double span = std::max(std::abs(lo), std::abs(hi));
    const std::size_t n = std::max<std::size_t>(samples, 201);
    const double hstep = 2.0 * span / static_cast<double>(n - 1);
    double worst_second = 0.0;
    double psi_min = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = -span + hstep * static_cast<double>(i);
      const double v = psi(x);
      psi_min = std::min(psi_min, v);
      if (i == 0 || i + 1 == n) continue;
      const double second = psi(x + hstep) - 2.0 * v + psi(x - hstep);
      const double scale = std::abs(psi(x + hstep)) + 2.0 * std::abs(v) + std::abs(psi(x - hstep));
      worst_second = std::min(worst_second, second / std::max(scale, 1e-300));
    }
    c.constants["c_alpha"] = c_alpha;
    c.constants["min_Psi"] = psi_min;
    c.constants["min_rel_second_difference"] = worst_second;
    c.satisfied = c_alpha > 0.0 && std::isfinite(c_alpha) &&
                  psi_min >= -1e-10 * std::max(1.0, span * span) && worst_second >= -1e-9;
    if (!c.satisfied) c.note = "Psi negative or not convex on samples";
    report.checks.push_back(c);
  }

  if (unbounded) {
    HypothesisCheck c{"H10", true, false, {}, {}};
    const bool up_ok = diverges_up(map(up, [&](double x) { return phi(pot, x); }));
    const bool down_ok = diverges_up(map(down, [&](double x) { return -phi(pot, x); }));
    const bool dup_ok = diverges_up(map(up, [&](double x) { return phi_prime(pot, x); }));
    const bool ddown_ok = diverges_up(map(down, [&](double x) { return phi_prime(pot, x); }));
    c.constants["phi_at_far_right"] = phi(pot, up.back());
    c.constants["phi_at_far_left"] = phi(pot, down.back());
    c.satisfied = up_ok && down_ok && dup_ok && ddown_ok;
    if (!c.satisfied) c.note = "phi or phi' does not diverge with the required sign at infinity";
    report.checks.push_back(c);
  } else {
    not_applicable("H10");
  }

  return report;
}

}  // namespace gencahn
