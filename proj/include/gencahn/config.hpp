#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gencahn/grid.hpp"
#include "gencahn/nonlinearities.hpp"
#include "gencahn/solver.hpp"
#include "json.hpp"

namespace gencahn {

inline constexpr const char* kVersion = "0.1.0";

struct GridSpec {
  std::vector<std::size_t> cells{128};
  std::vector<double> lengths{1.0};

  GridPtr make() const;
};

enum class SweepAxis { Delta, M, Mu, Tau };

struct SweepSpec {
  SweepAxis axis = SweepAxis::Delta;
  std::vector<double> values;
  std::string reference = "finest";
};

struct ContdepSpec {
  int n_pairs = 10;
  int calibration_pairs = 10;
  double perturb_scale = 1e-3;
};

struct RestSpec {
  double max_time = 2000.0;
  std::size_t window = 5;
  double tol = 1e-7;
  std::size_t sample_every = 20;
  double refine_tol = 1e-10;
};

struct AuditSpec {
  Interval range{-3.0, 3.0};
  std::size_t samples = 2001;
  double sigma = 0.5;
  std::vector<double> q_values{2.5, 3.0, 4.0, 5.5};
  int fields = 20;
  int poincare_fields = 1000;
  std::vector<double> p_values{0.0, 0.5, 1.0};
  std::size_t poincare_cells = 64;
};

struct RunConfig {
  GridSpec grid;
  ModelParams model;
  /// Range on which a tabulated mobility's C1, C2 are estimated.
  Interval mobility_audit_range{-10.0, 10.0};
  SolverConfig solver;
  InitSpec init;
  std::string scenario = "single_run";
  std::filesystem::path out_dir = "out";
  std::optional<SweepSpec> sweep;
  ContdepSpec contdep;
  RestSpec rest;
  AuditSpec audit;
  int workers = 0;  // 0: hardware concurrency
};

/// Keys may be given flat ("solver.tau") or nested ({"solver": {"tau": ...}}).
/// Unknown keys, wrong types and out-of-range values throw ConfigError.
/// Relative file paths resolve against base_dir.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Range checks shared by the parser and programmatic callers.
void validate(const RunConfig& cfg);

/// Fully resolved configuration as flat keys; parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& cfg);

const std::vector<std::string>& scenario_names();
std::string to_string(SweepAxis axis);

}  // namespace gencahn
