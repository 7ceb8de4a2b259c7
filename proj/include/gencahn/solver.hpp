#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gencahn/grid.hpp"
#include "gencahn/nonlinearities.hpp"

namespace gencahn {

struct ModelParams {
  double delta = 0.0;
  MobilitySpec mobility = MobilitySpec::polynomial(1.0);
  PotentialSpec potential = PotentialSpec::double_well();
  std::optional<double> trunc_M;
  std::optional<double> trunc_mu;

  /// Throws InvalidArgument, NonPositiveM or NonPositiveMu.
  void validate() const;
};

/// The nonlinearities actually used by the scheme: alpha or alpha_M, phi or
/// phi_mu. Immutable, cheap to share.
class Model {
 public:
  explicit Model(ModelParams params);

  const ModelParams& params() const { return params_; }
  double delta() const { return params_.delta; }
  const EffectiveMobility& mobility() const { return mobility_; }
  const EffectivePotential& potential() const { return potential_; }

  Field alpha(const Field& w) const;
  Field phi(const Field& chi) const;
  /// Throws DomainEscape when some value lies outside the potential domain.
  void require_admissible(const Field& chi) const;

 private:
  ModelParams params_;
  EffectiveMobility mobility_;
  EffectivePotential potential_;
};

struct State {
  double t = 0.0;
  Field chi;
  Field w;
};

struct SolverConfig {
  double tau = 1e-3;
  double t_end = 0.0;
  double newton_tol = 1e-10;
  int newton_max_iters = 50;
  double damping = 1.0;
  double linear_tol = 1e-12;
  std::size_t save_stride = 1;

  void validate() const;
};

struct StepStats {
  int newton_iters = 0;
  double residual = 0.0;
  double tau = 0.0;
  /// Constant added to chi to restore the previous mean.
  double mean_correction = 0.0;
};

struct Trajectory {
  std::vector<State> states;
  /// stats[i] belongs to the step that produced states[i]; stats[0] is empty.
  std::vector<StepStats> stats;
  std::size_t save_stride = 1;
};

struct Residual {
  Field r1;
  Field r2;
  /// sqrt(|r1|^2 + |r2|^2) in discrete L2.
  double norm() const;
};

Residual residual(const State& prev, const State& next, const Model& model, double tau);

/// w consistent with chi at rest: A chi + phi_eff(chi).
Field chemical_potential(const Field& chi, const Model& model);

/// Backward Euler with convex splitting, solved by damped Newton.
///
/// The Newton system is reduced to chi alone,
///   (I/tau + A D_alpha B) dchi = -r1 - A D_alpha r2,  B = delta/tau + A + D_beta,
/// and factorized with a sparse LU. Reuse an Integrator across steps on one grid.
class Integrator {
 public:
  Integrator(GridPtr grid, std::shared_ptr<const Model> model, SolverConfig cfg);
  ~Integrator();
  Integrator(const Integrator&) = delete;
  Integrator& operator=(const Integrator&) = delete;

  const Model& model() const { return *model_; }
  const SolverConfig& config() const { return cfg_; }

  /// One step of size tau. Throws NewtonDiverged or DomainEscape.
  State step(const State& prev, double tau, StepStats* stats = nullptr);

 private:
  struct Impl;
  GridPtr grid_;
  std::shared_ptr<const Model> model_;
  SolverConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

State step(const State& prev, const ModelParams& params, const SolverConfig& cfg, StepStats* stats = nullptr);

using Observer = std::function<void(const State&, const StepStats&)>;

/// Steps from init to cfg.t_end. A step that fails to converge is retried as
/// two half steps, recursively, up to five halvings. Saved states are every
/// save_stride-th step plus the final one.
Trajectory run(const Field& init, const ModelParams& params, const SolverConfig& cfg,
               const std::vector<Observer>& observers = {});

enum class InitKind { UniformNoise, Cosine, FromFile };

struct InitSpec {
  InitKind kind = InitKind::UniformNoise;
  double m0 = 0.0;
  double amplitude = 0.0;
  /// Cosine wave numbers per axis; missing axes use 0.
  std::vector<int> mode{1};
  std::uint64_t seed = 0;
  std::filesystem::path file;
  /// Keeps only cosine modes below the cutoff on each axis.
  std::optional<std::size_t> lowpass_cutoff;
};

/// Throws MeanOutOfDomain when a singular potential is given and the field
/// would leave its domain; GridMismatch or IoError for files.
Field initial_field(const InitSpec& spec, const GridPtr& grid, const PotentialSpec* potential = nullptr);

struct RestPoint {
  Field chi;
  double w_bar = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Newton on A chi + phi_eff(chi) = w_bar, m(chi) = m0 with the scalar w_bar
/// as an extra unknown. Throws NewtonDiverged.
RestPoint solve_rest_point(double m0, const ModelParams& params, const GridPtr& grid, const Field& guess,
                           double tol = 1e-10, int max_iters = 100);

}  // namespace gencahn
