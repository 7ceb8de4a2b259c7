#include "gencahn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gencahn/error.hpp"
#include "gencahn/operators.hpp"

namespace gencahn {

namespace {

template <class HatFn>
EnergyRecord energy_with(const Field& chi, HatFn&& hat) {
  EnergyRecord e;
  const double g = gradient_l2(chi);
  e.dirichlet = 0.5 * g * g;
  double s = 0.0;
  for (double v : chi.values()) s += hat(v);
  e.potential = s * chi.grid().cell_volume();
  e.total = e.dirichlet + e.potential;
  return e;
}

// <A alpha(w), w> written face by face, so it stays >= 0 under rounding.
double mobility_density(const Field& w, const Model& m) {
  const Grid& g = w.grid();
  const std::size_t n0 = g.cells(0);
  const std::size_t n1 = g.dim() == 2 ? g.cells(1) : 1;
  const auto& mob = m.mobility();
  double s = 0.0;
  auto face = [&](std::size_t a, std::size_t b, double h) {
    const double dw = w[b] - w[a];
    s += (mob.alpha(w[b]) - mob.alpha(w[a])) * dw / (h * h);
  };
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t c = i * n1 + j;
      if (i + 1 < n0) face(c, c + n1, g.spacing(0));
      if (g.dim() == 2 && j + 1 < n1) face(c, c + 1, g.spacing(1));
    }
  }
  return s * g.cell_volume();
}

std::size_t locate(const Trajectory& traj, double t, bool lower) {
  const auto& st = traj.states;
  const double eps = 1e-9 * std::max(1.0, std::abs(t));
  if (lower) {
    for (std::size_t i = 0; i < st.size(); ++i) {
      if (st[i].t >= t - eps) return i;
    }
  } else {
    for (std::size_t i = st.size(); i-- > 0;) {
      if (st[i].t <= t + eps) return i;
    }
  }
  return st.size();
}

Field power_map(const Field& w, double p) {
  Field out(w.grid_ptr());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::pow(std::abs(w[i]), p) * w[i];
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

EnergyRecord energy(const Field& chi, const PotentialSpec& pot) {
  return energy_with(chi, [&](double v) { return phi_hat(pot, v); });
}

EnergyRecord energy(const Field& chi, const EffectivePotential& pot) {
  return energy_with(chi, [&](double v) { return pot.phi_hat(v); });
}

IdentityReport energy_identity_defect(const Trajectory& traj, const Model& model, double s, double t) {
  const auto& st = traj.states;
  if (st.empty() || !(s < t) || s < st.front().t - 1e-9 || t > st.back().t + 1e-9 * std::max(1.0, std::abs(t))) {
    throw Error(ErrorKind::IntervalOutOfRange, "interval must satisfy s < t inside the trajectory");
  }
  const std::size_t i0 = locate(traj, s, true);
  const std::size_t i1 = locate(traj, t, false);
  if (i0 >= st.size() || i1 >= st.size() || i0 >= i1) {
    throw Error(ErrorKind::IntervalOutOfRange, "interval contains fewer than two saved states");
  }
  const double delta = model.delta();
  auto visc = [&](std::size_t i) {
    if (delta == 0.0 || st.size() < 2) return 0.0;
    const std::size_t a = i == 0 ? 0 : i - 1;
    const std::size_t b = i == 0 ? 1 : i;
    const Field chit = (1.0 / (st[b].t - st[a].t)) * (st[b].chi - st[a].chi);
    return delta * inner(chit, chit);
  };
  auto mob = [&](std::size_t i) { return mobility_density(st[i].w, model); };

  IdentityReport r;
  r.s = st[i0].t;
  r.t = st[i1].t;
  r.stride = traj.save_stride;
  double v_prev = visc(i0), m_prev = mob(i0);
  for (std::size_t i = i0 + 1; i <= i1; ++i) {
    const double dt = st[i].t - st[i - 1].t;
    const double v = visc(i), m = mob(i);
    r.visc_term += 0.5 * dt * (v_prev + v);
    r.mobility_term += 0.5 * dt * (m_prev + m);
    v_prev = v;
    m_prev = m;
  }
  r.energy_drop = energy(st[i0].chi, model.potential()).total - energy(st[i1].chi, model.potential()).total;
  r.defect = r.visc_term + r.mobility_term - r.energy_drop;
  return r;
}

Stationarity stationarity_residual(const State& state, const Model& model) {
  Stationarity s;
  s.r_w = l2_norm(laplacian(model.alpha(state.w)));
  s.r_chi = l2_norm(chemical_potential(state.chi, model) - state.w);
  return s;
}

std::optional<State> omega_limit_probe(std::span<const State> states, std::size_t window, double tol,
                                       const Model& model) {
  if (window < 2) throw Error(ErrorKind::InvalidArgument, "window must be >= 2");
  if (states.size() < window) return std::nullopt;
  const auto last = states.subspan(states.size() - window);
  for (std::size_t i = 0; i < last.size(); ++i) {
    for (std::size_t j = i + 1; j < last.size(); ++j) {
      if (!(norms(last[i].chi - last[j].chi).v_norm < tol)) return std::nullopt;
    }
  }
  const auto r = stationarity_residual(last.back(), model);
  if (!(r.r_w < tol && r.r_chi < tol)) return std::nullopt;
  return last.back();
}

std::optional<State> omega_limit_probe(const Trajectory& traj, std::size_t window, double tol, const Model& model) {
  return omega_limit_probe(std::span<const State>(traj.states), window, tol, model);
}

PairDivergence pair_gaps(const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size() || a.states.empty()) {
    throw Error(ErrorKind::InvalidArgument, "trajectories have different numbers of saved states");
  }
  PairDivergence out;
  double h1 = 0.0;
  std::optional<Field> prev;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    const double t = a.states[i].t;
    if (std::abs(t - b.states[i].t) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorKind::InvalidArgument, "trajectories are not time aligned");
    }
    Field d = a.states[i].chi - b.states[i].chi;
    out.times.push_back(t);
    out.gap_v.push_back(norms(d).v_norm);
    if (prev) {
      const double dt = t - a.states[i - 1].t;
      const Field dd = (1.0 / dt) * (d - *prev);
      h1 += dt * (inner(d, d) + inner(dd, dd));
    }
    out.gap_h1_time.push_back(std::sqrt(h1));
    prev = std::move(d);
  }
  out.initial_gap = out.gap_v.front();
  const double sup = *std::max_element(out.gap_v.begin(), out.gap_v.end());
  out.ratio_sup = out.initial_gap > 0.0 ? sup / out.initial_gap : 0.0;
  return out;
}

PairDivergence pair_divergence(const Trajectory& a, const Trajectory& b) {
  PairDivergence out = pair_gaps(a, b);
  if (!(out.initial_gap > 1e-12)) {
    throw Error(ErrorKind::DegenerateInitialGap, "initial V-norm gap must exceed 1e-12");
  }
  return out;
}

std::vector<NormRow> norm_timeseries(const Trajectory& traj, const Model& model, double kappa) {
  if (!(kappa > 2.0 && kappa <= 6.0)) throw Error(ErrorKind::QOutOfRange, "kappa must lie in (2,6]");
  std::vector<NormRow> rows;
  const double p = model.params().mobility.p;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const State& s = traj.states[i];
    NormRow r;
    r.t = s.t;
    r.chi_v = norms(s.chi).v_norm;
    r.grad_w_l2 = gradient_l2(s.w);
    r.grad_pw_l2 = gradient_l2(power_map(s.w, p));
    if (i > 0) {
      const State& q = traj.states[i - 1];
      r.chit_negsob = neg_sobolev_norm((1.0 / (s.t - q.t)) * (s.chi - q.chi), kappa);
    }
    r.mean_w = mean(s.w);
    r.mean_phi = mean(model.phi(s.chi));
    rows.push_back(r);
  }
  return rows;
}

std::string series_header() {
  return "t,energy_total,energy_dirichlet,energy_potential,mass,mean_w,mean_phi,grad_w_l2,chit_negsob,newton_iters,"
         "residual";
}

SeriesRecorder::SeriesRecorder(std::shared_ptr<const Model> model, double kappa)
    : model_(std::move(model)), kappa_(kappa) {}

std::string SeriesRecorder::row(const State& s, const StepStats& st) {
  const EnergyRecord e = energy(s.chi, model_->potential());
  double chit = 0.0;
  if (prev_ && s.t > prev_->t) chit = neg_sobolev_norm((1.0 / (s.t - prev_->t)) * (s.chi - prev_->chi), kappa_);
  prev_ = s;
  std::string out;
  for (double v : {s.t, e.total, e.dirichlet, e.potential, mean(s.chi), mean(s.w), mean(model_->phi(s.chi)),
                   gradient_l2(s.w), chit}) {
    out += fmt(v);
    out += ',';
  }
  out += std::to_string(st.newton_iters);
  out += ',';
  out += fmt(st.residual);
  return out;
}

}  // namespace gencahn
