#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gencahn/config.hpp"
#include "gencahn/error.hpp"
#include "json.hpp"

namespace gencahn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitCheck = 4;

int exit_code_for(ErrorKind kind);

struct ScenarioOutcome {
  int exit_code = kExitOk;
  std::string message;
  /// Scenario-specific results, also written to the scenario's JSON report.
  nlohmann::json summary;
};

/// Runs cfg.scenario into cfg.out_dir. Library errors propagate as Error;
/// failed checks come back with exit code 4.
ScenarioOutcome run_scenario(const RunConfig& cfg, int workers);

/// GENCAHN_WORKERS beats the flag, which beats the config; 0 means hardware
/// concurrency.
int resolve_workers(std::optional<int> flag, const RunConfig& cfg);

/// Constants actually used by the model plus a compact hypothesis audit.
nlohmann::json constants_report(const RunConfig& cfg);

/// The command-line entry point with argv[0] stripped.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gencahn
