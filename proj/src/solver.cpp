#include "gencahn/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>
#include <limits>

#include "gencahn/error.hpp"
#include "gencahn/operators.hpp"
#include "gencahn/random.hpp"
#include "gencahn/snapshot.hpp"

namespace gencahn {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

constexpr double kMinStep = 1.0 / 1048576.0;  // 2^-20

Eigen::Map<const Vec> view(const Field& f) { return {f.values().data(), static_cast<Eigen::Index>(f.size())}; }

// Same stencil as laplacian(), assembled once per grid.
SpMat laplacian_matrix(const Grid& g) {
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = g.dim() == 2 ? g.cells(1) : 1;
  const double c0 = 1.0 / (g.spacing(0) * g.spacing(0));
  const double c1 = g.dim() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * g.size());
  auto link = [&](std::size_t a, std::size_t b, double c) {
    t.emplace_back(a, a, c);
    t.emplace_back(a, b, -c);
  };
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t c = i * n1 + j;
      if (i > 0) link(c, c - n1, c0);
      if (i + 1 < n0) link(c, c + n1, c0);
      if (g.dim() == 2) {
        if (j > 0) link(c, c - 1, c1);
        if (j + 1 < n1) link(c, c + 1, c1);
      }
    }
  }
  SpMat a(g.size(), g.size());
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SpMat diagonal(const Vec& d) {
  SpMat m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (Eigen::Index i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
  m.makeCompressed();
  return m;
}

Vec map_values(const Field& f, auto&& fn) {
  Vec out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
  return out;
}

// Residual size attainable in double precision: the terms of r1, r2 cancel at
// convergence, each carrying relative rounding of order eps.
double roundoff_floor(const State& prev, const State& x, const Model& m, double tau) {
  const Grid& g = x.chi.grid();
  double hmin = g.spacing(0);
  if (g.dim() == 2) hmin = std::min(hmin, g.spacing(1));
  const double stencil = 4.0 * static_cast<double>(g.dim()) / (hmin * hmin);
  const double scale = l2_norm(x.chi - prev.chi) * (1.0 + m.delta()) / tau +
                       stencil * (l2_norm(m.alpha(x.w)) + l2_norm(x.chi)) + l2_norm(m.phi(x.chi)) + l2_norm(x.w);
  return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

[[noreturn]] void diverged(const std::string& what) { throw Error(ErrorKind::NewtonDiverged, what); }

}  // namespace

void ModelParams::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::InvalidArgument, "delta must be a finite value >= 0");
  }
  if (trunc_M && !(*trunc_M > 0.0)) throw Error(ErrorKind::NonPositiveM, "trunc.M must be positive");
  if (trunc_mu && !(*trunc_mu > 0.0)) throw Error(ErrorKind::NonPositiveMu, "trunc.mu must be positive");
  if (delta == 0.0 && potential.singular() && !trunc_mu) {
    throw Error(ErrorKind::InvalidArgument, "delta = 0 with a singular potential needs trunc.mu");
  }
}

Model::Model(ModelParams params)
    : params_((params.validate(), std::move(params))),
      mobility_(params_.mobility, params_.trunc_M),
      potential_(params_.potential, params_.trunc_mu) {}

Field Model::alpha(const Field& w) const {
  Field out(w.grid_ptr());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = mobility_.alpha(w[i]);
  return out;
}

Field Model::phi(const Field& chi) const {
  Field out(chi.grid_ptr());
  for (std::size_t i = 0; i < chi.size(); ++i) out[i] = potential_.phi(chi[i]);
  return out;
}

void Model::require_admissible(const Field& chi) const {
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (!potential_.admissible(chi[i])) {
      throw Error(ErrorKind::DomainEscape,
                  "chi = " + std::to_string(chi[i]) + " left the potential domain; set trunc.mu");
    }
  }
}

void SolverConfig::validate() const {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  if (!(newton_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "newton_tol must be positive");
  if (newton_max_iters < 1) throw Error(ErrorKind::InvalidArgument, "newton_max_iters must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw Error(ErrorKind::InvalidArgument, "damping must lie in (0,1]");
  if (!(linear_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "linear_tol must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw Error(ErrorKind::InvalidArgument, "t_end must be >= 0");
  if (save_stride < 1) throw Error(ErrorKind::InvalidArgument, "save_stride must be >= 1");
}

double Residual::norm() const { return std::sqrt(inner(r1, r1) + inner(r2, r2)); }

Residual residual(const State& prev, const State& next, const Model& model, double tau) {
  require_same_grid(prev.chi, next.chi);
  require_same_grid(prev.chi, prev.w);
  require_same_grid(next.chi, next.w);
  const double c = model.potential().c_split();
  Field dchi = next.chi - prev.chi;
  Residual r;
  r.r1 = (1.0 / tau) * dchi + laplacian(model.alpha(next.w));
  // beta(chi) - c chi_prev = phi(chi) + c (chi - chi_prev)
  r.r2 = (model.delta() / tau + c) * dchi + laplacian(next.chi) + model.phi(next.chi) - next.w;
  return r;
}

Field chemical_potential(const Field& chi, const Model& model) { return laplacian(chi) + model.phi(chi); }

struct Integrator::Impl {
  SpMat A;
  SpMat I;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
};

Integrator::Integrator(GridPtr grid, std::shared_ptr<const Model> model, SolverConfig cfg)
    : grid_(std::move(grid)), model_(std::move(model)), cfg_(cfg), impl_(std::make_unique<Impl>()) {
  cfg_.validate();
  impl_->A = laplacian_matrix(*grid_);
  impl_->I = diagonal(Vec::Ones(grid_->size()));
}

Integrator::~Integrator() = default;

State Integrator::step(const State& prev, double tau, StepStats* stats) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  if (!prev.chi.all_finite() || !prev.w.all_finite()) diverged("non-finite previous state");
  if (!grid_->same_shape(prev.chi.grid())) throw Error(ErrorKind::GridMismatch, "state grid differs from solver grid");
  const Model& m = *model_;
  m.require_admissible(prev.chi);

  // Start from the better of the previous w and the w at rest for chi^n.
  State x{prev.t + tau, prev.chi, chemical_potential(prev.chi, m)};
  Residual res = residual(prev, x, m, tau);
  double nr = res.norm();
  if (prev.w.grid().same_shape(*grid_)) {
    State alt{x.t, prev.chi, prev.w};
    Residual ra = residual(prev, alt, m, tau);
    if (ra.norm() < nr) {
      x = std::move(alt);
      res = std::move(ra);
      nr = res.norm();
    }
  }
  int iters = 1;
  const auto& mob = m.mobility();
  const auto& pot = m.potential();

  while (!(nr < cfg_.newton_tol)) {
    if (iters > cfg_.newton_max_iters) {
      diverged("Newton budget exhausted at residual " + std::to_string(nr) + "; tau may be too large");
    }
    const Vec da = map_values(x.w, [&](double v) { return mob.alpha_prime(v); });
    const Vec db = map_values(x.chi, [&](double v) { return pot.beta_prime(v) + m.delta() / tau; });
    const SpMat AD = impl_->A * diagonal(da);
    const SpMat B = impl_->A + diagonal(db);
    const SpMat J = SpMat(AD * B) + (1.0 / tau) * impl_->I;
    const Vec r1 = view(res.r1);
    const Vec r2 = view(res.r2);
    const Vec rhs = -r1 - AD * r2;

    impl_->lu.compute(J);
    if (impl_->lu.info() != Eigen::Success) diverged("sparse factorization failed");
    Vec dchi = impl_->lu.solve(rhs);
    const double rhs_norm = std::max(rhs.norm(), 1e-300);
    for (int k = 0; k < 3 && (J * dchi - rhs).norm() > cfg_.linear_tol * rhs_norm; ++k) {
      dchi += impl_->lu.solve(rhs - J * dchi);
    }
    const Vec dw = B * dchi + r2;

    bool accepted = false;
    bool only_domain = true;
    for (double s = cfg_.damping; s >= kMinStep; s *= 0.5) {
      State trial{x.t, x.chi, x.w};
      for (std::size_t i = 0; i < trial.chi.size(); ++i) {
        trial.chi[i] += s * dchi[i];
        trial.w[i] += s * dw[i];
      }
      bool ok = true;
      for (std::size_t i = 0; i < trial.chi.size() && ok; ++i) ok = pot.admissible(trial.chi[i]);
      if (!ok) continue;
      only_domain = false;
      Residual tr = residual(prev, trial, m, tau);
      const double tn = tr.norm();
      if (std::isfinite(tn) && tn < nr) {
        x = std::move(trial);
        res = std::move(tr);
        nr = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted && nr < roundoff_floor(prev, x, m, tau)) break;
    if (!accepted) {
      if (only_domain) {
        throw Error(ErrorKind::DomainEscape, "every damped Newton step leaves the potential domain");
      }
      diverged("line search failed at residual " + std::to_string(nr));
    }
    ++iters;
  }

  const double correction = mean(prev.chi) - mean(x.chi);
  x.chi += correction;
  if (stats) *stats = StepStats{iters, nr, tau, correction};
  return x;
}

State step(const State& prev, const ModelParams& params, const SolverConfig& cfg, StepStats* stats) {
  Integrator integ(prev.chi.grid_ptr(), std::make_shared<const Model>(params), cfg);
  return integ.step(prev, cfg.tau, stats);
}

namespace {

State advance(Integrator& integ, const State& s, double tau, int depth, StepStats& acc) {
  try {
    StepStats st;
    State next = integ.step(s, tau, &st);
    acc.newton_iters += st.newton_iters;
    acc.residual = std::max(acc.residual, st.residual);
    acc.tau = acc.tau == 0.0 ? st.tau : std::min(acc.tau, st.tau);
    acc.mean_correction += st.mean_correction;
    return next;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NewtonDiverged || depth >= 5) throw;
  }
  const State mid = advance(integ, s, 0.5 * tau, depth + 1, acc);
  return advance(integ, mid, 0.5 * tau, depth + 1, acc);
}

}  // namespace

Trajectory run(const Field& init, const ModelParams& params, const SolverConfig& cfg,
               const std::vector<Observer>& observers) {
  cfg.validate();
  auto model = std::make_shared<const Model>(params);
  model->require_admissible(init);
  Integrator integ(init.grid_ptr(), model, cfg);

  Trajectory traj;
  traj.save_stride = cfg.save_stride;
  State s{0.0, init, chemical_potential(init, *model)};
  traj.states.push_back(s);
  traj.stats.push_back({});
  for (const auto& obs : observers) obs(s, traj.stats.back());

  const auto steps = cfg.t_end > 0.0 ? static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.tau - 1e-9)) : 0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t_next = n == steps ? cfg.t_end : static_cast<double>(n) * cfg.tau;
    StepStats st;
    State next = advance(integ, s, t_next - s.t, 0, st);
    next.t = t_next;
    s = std::move(next);
    for (const auto& obs : observers) obs(s, st);
    if (n % cfg.save_stride == 0 || n == steps) {
      traj.states.push_back(s);
      traj.stats.push_back(st);
    }
  }
  return traj;
}

Field initial_field(const InitSpec& spec, const GridPtr& grid, const PotentialSpec* potential) {
  const bool check_domain = potential && potential->singular();
  if (check_domain && !(in_domain(*potential, spec.m0 - spec.amplitude) && in_domain(*potential, spec.m0 + spec.amplitude))) {
    throw Error(ErrorKind::MeanOutOfDomain, "m0 +- amplitude must lie inside the potential domain");
  }
  Field f(grid);
  switch (spec.kind) {
    case InitKind::UniformNoise: {
      Rng rng(spec.seed);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = spec.amplitude * rng.uniform(-1.0, 1.0);
      break;
    }
    case InitKind::Cosine: {
      const std::size_t n1 = grid->dim() == 2 ? grid->cells(1) : 1;
      auto k = [&](std::size_t axis) { return axis < spec.mode.size() ? spec.mode[axis] : 0; };
      for (std::size_t i = 0; i < grid->cells(0); ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
          double v = std::cos(k(0) * M_PI * grid->centre(0, i) / grid->length(0));
          if (grid->dim() == 2) v *= std::cos(k(1) * M_PI * grid->centre(1, j) / grid->length(1));
          f[i * n1 + j] = v;
        }
      }
      const double peak = f.max_abs();
      if (peak > 0.0) f *= spec.amplitude / peak;
      break;
    }
    case InitKind::FromFile: {
      Field loaded = read_snapshot(spec.file);
      if (!loaded.grid().same_shape(*grid)) {
        throw Error(ErrorKind::GridMismatch, "snapshot " + spec.file.string() + " does not match the grid");
      }
      f = Field(grid, std::vector<double>(loaded.values().begin(), loaded.values().end()));
      if (spec.lowpass_cutoff) f = lowpass(f, *spec.lowpass_cutoff);
      if (check_domain) {
        for (double v : f.values()) {
          if (!in_domain(*potential, v)) throw Error(ErrorKind::MeanOutOfDomain, "snapshot leaves the potential domain");
        }
      }
      return f;
    }
  }
  if (spec.lowpass_cutoff) f = lowpass(f, *spec.lowpass_cutoff);
  f += spec.m0 - mean(f);
  if (check_domain) {
    for (double v : f.values()) {
      if (!in_domain(*potential, v)) throw Error(ErrorKind::MeanOutOfDomain, "initial field leaves the potential domain");
    }
  }
  return f;
}

namespace {

struct RestResidual {
  Field r;
  double constraint = 0.0;
  double norm() const { return std::sqrt(inner(r, r) + constraint * constraint); }
};

RestResidual rest_residual(const Field& chi, double w_bar, double m0, const Model& m) {
  RestResidual out{chemical_potential(chi, m), mean(chi) - m0};
  out.r += -w_bar;
  return out;
}

}  // namespace

RestPoint solve_rest_point(double m0, const ModelParams& params, const GridPtr& grid, const Field& guess, double tol,
                           int max_iters) {
  const Model m(params);
  if (!grid->same_shape(guess.grid())) throw Error(ErrorKind::GridMismatch, "guess grid differs");
  Field chi(grid, std::vector<double>(guess.values().begin(), guess.values().end()));
  chi += m0 - mean(chi);
  m.require_admissible(chi);
  double w_bar = mean(m.phi(chi));

  const std::size_t n = grid->size();
  const SpMat A = laplacian_matrix(*grid);
  RestResidual res = rest_residual(chi, w_bar, m0, m);
  double nr = res.norm();
  int iters = 1;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  while (!(nr < tol)) {
    if (iters > max_iters) diverged("rest-point Newton budget exhausted at residual " + std::to_string(nr));
    // Bordered Jacobian [[A + D_phi', -1], [1/n, 0]].
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(A.nonZeros() + 3 * n);
    for (int k = 0; k < A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(A, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    }
    for (std::size_t i = 0; i < n; ++i) {
      t.emplace_back(i, i, m.potential().phi_prime(chi[i]));
      t.emplace_back(i, n, -1.0);
      t.emplace_back(n, i, 1.0 / static_cast<double>(n));
    }
    SpMat J(n + 1, n + 1);
    J.setFromTriplets(t.begin(), t.end());
    Vec rhs(n + 1);
    rhs.head(n) = -view(res.r);
    rhs[n] = -res.constraint;
    lu.compute(J);
    if (lu.info() != Eigen::Success) diverged("rest-point Jacobian is singular");
    const Vec d = lu.solve(rhs);

    bool accepted = false;
    for (double s = 1.0; s >= kMinStep; s *= 0.5) {
      Field trial = chi;
      for (std::size_t i = 0; i < n; ++i) trial[i] += s * d[i];
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) ok = m.potential().admissible(trial[i]);
      if (!ok) continue;
      const double tw = w_bar + s * d[n];
      RestResidual tr = rest_residual(trial, tw, m0, m);
      if (std::isfinite(tr.norm()) && tr.norm() < nr) {
        chi = std::move(trial);
        w_bar = tw;
        res = std::move(tr);
        nr = res.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) diverged("rest-point line search failed at residual " + std::to_string(nr));
    ++iters;
  }
  chi += m0 - mean(chi);
  // The mean of A chi vanishes, so this is the constant that best fits phi(chi).
  w_bar = mean(m.phi(chi));
  res = rest_residual(chi, w_bar, m0, m);
  return RestPoint{chi, w_bar, iters, res.norm()};
}

}  // namespace gencahn
