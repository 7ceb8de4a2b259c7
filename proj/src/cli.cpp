#include <algorithm>
#include <filesystem>

#include "CLI11.hpp"
#include "gencahn/scenarios.hpp"

namespace gencahn {

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Cahn-Hilliard simulator and verification harness", "gencahn"};
  std::string config;
  std::optional<std::string> scenario;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool list = false;
  bool validate_only = false;
  app.add_option("--config", config, "JSON run configuration");
  app.add_option("--scenario", scenario, "Override the configured scenario");
  app.add_option("--out-dir", out_dir, "Override the output directory");
  app.add_option("--seed", seed, "Override init.seed");
  app.add_option("--workers", workers, "Concurrent sweep members (0: all cores)");
  app.add_flag("--list-scenarios", list, "Print the scenario registry and exit");
  app.add_flag("--validate-only", validate_only, "Check the configuration and exit without writing outputs");
  app.add_flag_callback("--version", [&] { throw CLI::CallForVersion(kVersion, 0); }, "Print the version");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (list) {
    for (const auto& name : scenario_names()) out << name << '\n';
    return kExitOk;
  }
  try {
    if (config.empty()) throw Error(ErrorKind::ConfigError, "--config is required");
    RunConfig cfg = load_config(config);
    if (scenario) cfg.scenario = *scenario;
    if (out_dir) cfg.out_dir = *out_dir;
    if (seed) cfg.init.seed = *seed;
    validate(cfg);
    const int n = resolve_workers(workers, cfg);
    if (validate_only) {
      out << "config ok: scenario " << cfg.scenario << ", " << n << " worker(s)\n";
      return kExitOk;
    }
    const auto outcome = run_scenario(cfg, n);
    (outcome.exit_code == kExitOk ? out : err) << outcome.message << '\n';
    return outcome.exit_code;
  } catch (const Error& e) {
    err << "gencahn: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "gencahn: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "gencahn: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace gencahn
