#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gencahn/solver.hpp"

namespace gencahn {

struct EnergyRecord {
  double t = 0.0;
  double dirichlet = 0.0;  // (1/2) |grad chi|^2
  double potential = 0.0;  // integral of phi_hat(chi)
  double total = 0.0;
};

/// Throws OutOfDomain for values outside the potential domain.
EnergyRecord energy(const Field& chi, const PotentialSpec& pot);
/// Uses phi_hat_mu when the potential is truncated.
EnergyRecord energy(const Field& chi, const EffectivePotential& pot);

struct IdentityReport {
  double s = 0.0;
  double t = 0.0;
  double visc_term = 0.0;
  double mobility_term = 0.0;
  double energy_drop = 0.0;
  double defect = 0.0;
  std::size_t stride = 1;
};

/// Energy balance over [s, t] on the saved states. Time integrals use the
/// trapezoid rule, chi_t backward differences, and the mobility density
/// (alpha(w_R) - alpha(w_L))(w_R - w_L)/h^2 on each face. Throws
/// IntervalOutOfRange.
IdentityReport energy_identity_defect(const Trajectory& traj, const Model& model, double s, double t);

struct Stationarity {
  double r_w = 0.0;    // |A alpha_eff(w)|
  double r_chi = 0.0;  // |A chi + phi_eff(chi) - w|
};

Stationarity stationarity_residual(const State& state, const Model& model);

/// Latest state of the window if the window is V-norm stable and stationary
/// to tol. Throws InvalidArgument for window < 2.
std::optional<State> omega_limit_probe(std::span<const State> states, std::size_t window, double tol,
                                       const Model& model);
std::optional<State> omega_limit_probe(const Trajectory& traj, std::size_t window, double tol, const Model& model);

struct PairDivergence {
  std::vector<double> times;
  std::vector<double> gap_v;       // |chi1 - chi2|_V
  std::vector<double> gap_h1_time; // cumulative discrete H1(0,t;L2) norm of chi1 - chi2
  double initial_gap = 0.0;
  double ratio_sup = 0.0;
};

/// Gap series without the degenerate guard. Throws GridMismatch or
/// InvalidArgument when the trajectories are not time aligned.
PairDivergence pair_gaps(const Trajectory& a, const Trajectory& b);
/// As pair_gaps, and throws DegenerateInitialGap when the initial gap is <= 1e-12.
PairDivergence pair_divergence(const Trajectory& a, const Trajectory& b);

struct NormRow {
  double t = 0.0;
  double chi_v = 0.0;
  double grad_w_l2 = 0.0;
  double grad_pw_l2 = 0.0;  // |grad(|w|^p w)|
  double chit_negsob = 0.0; // W^{-2,kappa} norm of the backward difference
  double mean_w = 0.0;
  double mean_phi = 0.0;
};

/// One row per saved state; kappa must lie in (2, 6].
std::vector<NormRow> norm_timeseries(const Trajectory& traj, const Model& model, double kappa);

/// Columns of series.csv.
std::string series_header();

/// Incremental writer of series.csv rows; feed it every step in order.
class SeriesRecorder {
 public:
  SeriesRecorder(std::shared_ptr<const Model> model, double kappa);
  std::string row(const State& s, const StepStats& st);

 private:
  std::shared_ptr<const Model> model_;
  double kappa_;
  std::optional<State> prev_;
};

}  // namespace gencahn
