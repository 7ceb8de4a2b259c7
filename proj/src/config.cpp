#include "gencahn/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "gencahn/error.hpp"

namespace gencahn {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

void flatten(const json& j, const std::string& prefix, std::map<std::string, json>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else {
    if (out.count(prefix)) config_error("duplicate key '" + prefix + "'");
    out[prefix] = j;
  }
}

// Model pieces that are assembled only after every key has been read.
struct RawModel {
  double p = 1.0;
  std::string form = "polynomial";
  std::vector<std::pair<double, double>> table;
  std::string kind = "double_well";
  std::vector<double> coeffs;
  double lambda = 0.0;
  std::vector<double> interval{-1.0, 1.0};
};

template <class T>
T as(const std::string& key, const json& v) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw std::runtime_error("expected a number");
    }
    return v.get<T>();
  } catch (const std::exception& e) {
    config_error("key '" + key + "': " + e.what());
  }
}

template <class T>
std::vector<T> as_list(const std::string& key, const json& v) {
  if (v.is_array()) return as<std::vector<T>>(key, v);
  return {as<T>(key, v)};
}

Interval as_interval(const std::string& key, const json& v) {
  const auto xs = as<std::vector<double>>(key, v);
  if (xs.size() != 2 || !(xs[0] < xs[1])) config_error("key '" + key + "' must be [lo, hi] with lo < hi");
  return {xs[0], xs[1]};
}

std::size_t as_count(const std::string& key, const json& v) {
  if (!v.is_number_integer() || v.get<long long>() < 0) config_error("key '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "delta") return SweepAxis::Delta;
  if (s == "M") return SweepAxis::M;
  if (s == "mu") return SweepAxis::Mu;
  if (s == "tau") return SweepAxis::Tau;
  config_error("sweep.axis must be one of delta, M, mu, tau; got '" + s + "'");
}

using Handler = std::function<void(RunConfig&, RawModel&, SweepSpec&, const std::string&, const json&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = [] {
    std::map<std::string, Handler> m;
    m["scenario"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.scenario = as<std::string>(k, v); };
    m["out_dir"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.out_dir = as<std::string>(k, v); };
    m["workers"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.workers = static_cast<int>(as_count(k, v)); };

    m["grid.dim"] = [](RunConfig&, RawModel&, SweepSpec&, const std::string& k, const json& v) {
      const auto d = as_count(k, v);
      if (d != 1 && d != 2) config_error("grid.dim must be 1 or 2");
    };
    m["grid.cells"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.grid.cells = as_list<std::size_t>(k, v); };
    m["grid.lengths"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.grid.lengths = as_list<double>(k, v); };

    m["model.delta"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.model.delta = as<double>(k, v); };
    m["mobility.p"] = [](RunConfig&, RawModel& r, SweepSpec&, const std::string& k, const json& v) { r.p = as<double>(k, v); };
    m["mobility.form"] = [](RunConfig&, RawModel& r, SweepSpec&, const std::string& k, const json& v) { r.form = as<std::string>(k, v); };
    m["mobility.table"] = [](RunConfig&, RawModel& r, SweepSpec&, const std::string& k, const json& v) {
      for (const auto& row : as<std::vector<std::vector<double>>>(k, v)) {
        if (row.size() != 2) config_error("mobility.table rows must be [r, alpha]");
        r.table.emplace_back(row[0], row[1]);
      }
    };
    m["mobility.audit_range"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.mobility_audit_range = as_interval(k, v); };
    m["potential.kind"] = [](RunConfig&, RawModel& r, SweepSpec&, const std::string& k, const json& v) { r.kind = as<std::string>(k, v); };
    m["potential.coeffs"] = [](RunConfig&, RawModel& r, SweepSpec&, const std::string& k, const json& v) { r.coeffs = as<std::vector<double>>(k, v); };
    m["potential.lambda"] = [](RunConfig&, RawModel& r, SweepSpec&, const std::string& k, const json& v) { r.lambda = as<double>(k, v); };
    m["potential.interval"] = [](RunConfig&, RawModel& r, SweepSpec&, const std::string& k, const json& v) { r.interval = as<std::vector<double>>(k, v); };
    m["trunc.M"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) {
      if (!v.is_null()) c.model.trunc_M = as<double>(k, v);
    };
    m["trunc.mu"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) {
      if (!v.is_null()) c.model.trunc_mu = as<double>(k, v);
    };

    m["solver.tau"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.solver.tau = as<double>(k, v); };
    m["solver.t_end"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.solver.t_end = as<double>(k, v); };
    m["solver.newton_tol"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.solver.newton_tol = as<double>(k, v); };
    m["solver.newton_max_iters"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.solver.newton_max_iters = static_cast<int>(as_count(k, v)); };
    m["solver.damping"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.solver.damping = as<double>(k, v); };
    m["solver.linear_tol"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.solver.linear_tol = as<double>(k, v); };
    m["solver.save_stride"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.solver.save_stride = as_count(k, v); };

    m["init.kind"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) {
      const auto s = as<std::string>(k, v);
      if (s == "uniform_noise") c.init.kind = InitKind::UniformNoise;
      else if (s == "cosine") c.init.kind = InitKind::Cosine;
      else if (s == "from_file") c.init.kind = InitKind::FromFile;
      else config_error("init.kind must be uniform_noise, cosine or from_file; got '" + s + "'");
    };
    m["init.m0"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.init.m0 = as<double>(k, v); };
    m["init.amplitude"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.init.amplitude = as<double>(k, v); };
    m["init.mode"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.init.mode = as_list<int>(k, v); };
    m["init.seed"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.init.seed = as_count(k, v); };
    m["init.file"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.init.file = as<std::string>(k, v); };
    m["init.lowpass"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) {
      if (!v.is_null()) c.init.lowpass_cutoff = as_count(k, v);
    };

    m["sweep.axis"] = [](RunConfig&, RawModel&, SweepSpec& s, const std::string& k, const json& v) { s.axis = parse_axis(as<std::string>(k, v)); };
    m["sweep.values"] = [](RunConfig&, RawModel&, SweepSpec& s, const std::string& k, const json& v) { s.values = as<std::vector<double>>(k, v); };
    m["sweep.reference"] = [](RunConfig&, RawModel&, SweepSpec& s, const std::string& k, const json& v) { s.reference = as<std::string>(k, v); };

    m["contdep.n_pairs"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.contdep.n_pairs = static_cast<int>(as_count(k, v)); };
    m["contdep.calibration_pairs"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.contdep.calibration_pairs = static_cast<int>(as_count(k, v)); };
    m["contdep.perturb_scale"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.contdep.perturb_scale = as<double>(k, v); };

    m["rest.max_time"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.rest.max_time = as<double>(k, v); };
    m["rest.window"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.rest.window = as_count(k, v); };
    m["rest.tol"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.rest.tol = as<double>(k, v); };
    m["rest.sample_every"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.rest.sample_every = as_count(k, v); };
    m["rest.refine_tol"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.rest.refine_tol = as<double>(k, v); };

    m["audit.range"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.audit.range = as_interval(k, v); };
    m["audit.samples"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.audit.samples = as_count(k, v); };
    m["audit.sigma"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.audit.sigma = as<double>(k, v); };
    m["audit.q_values"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.audit.q_values = as_list<double>(k, v); };
    m["audit.fields"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.audit.fields = static_cast<int>(as_count(k, v)); };
    m["audit.poincare_fields"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.audit.poincare_fields = static_cast<int>(as_count(k, v)); };
    m["audit.p_values"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.audit.p_values = as_list<double>(k, v); };
    m["audit.poincare_cells"] = [](RunConfig& c, RawModel&, SweepSpec&, const std::string& k, const json& v) { c.audit.poincare_cells = as_count(k, v); };
    return m;
  }();
  return h;
}

void build_model(RunConfig& c, const RawModel& r) {
  try {
    if (r.form == "polynomial") {
      if (!r.table.empty()) config_error("mobility.table is only valid with mobility.form = tabulated");
      c.model.mobility = MobilitySpec::polynomial(r.p);
    } else if (r.form == "tabulated") {
      c.model.mobility = MobilitySpec::tabulated(r.p, r.table, c.mobility_audit_range);
    } else {
      config_error("mobility.form must be polynomial or tabulated; got '" + r.form + "'");
    }
    if (r.kind == "double_well") {
      c.model.potential = PotentialSpec::double_well();
    } else if (r.kind == "even_polynomial") {
      c.model.potential = PotentialSpec::even_polynomial(r.coeffs);
    } else if (r.kind == "logarithmic") {
      if (r.interval.size() != 2) config_error("potential.interval must be [a, b]");
      c.model.potential = PotentialSpec::logarithmic(r.interval[0], r.interval[1], r.lambda);
    } else {
      config_error("potential.kind must be double_well, even_polynomial or logarithmic; got '" + r.kind + "'");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    config_error(e.what());
  }
}

}  // namespace

GridPtr GridSpec::make() const { return Grid::make(cells, lengths); }

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"single_run", "limit_sweep", "contdep", "rest_point", "audit"};
  return names;
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Delta: return "delta";
    case SweepAxis::M: return "M";
    case SweepAxis::Mu: return "mu";
    case SweepAxis::Tau: return "tau";
  }
  return "?";
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) config_error("config must be a JSON object");
  std::map<std::string, json> flat;
  flatten(j, "", flat);
  RunConfig c;
  RawModel raw;
  SweepSpec sweep;
  bool has_sweep = false;
  std::optional<std::size_t> dim;
  for (const auto& [key, value] : flat) {
    const auto it = handlers().find(key);
    if (it == handlers().end()) config_error("unknown key '" + key + "'");
    it->second(c, raw, sweep, key, value);
    if (key.rfind("sweep.", 0) == 0) has_sweep = true;
    if (key == "grid.dim") dim = value.get<std::size_t>();
  }
  if (dim && *dim != c.grid.cells.size()) {
    if (c.grid.cells.size() == 1) c.grid.cells.assign(*dim, c.grid.cells[0]);
    else config_error("grid.dim does not match grid.cells");
  }
  if (c.grid.lengths.size() == 1 && c.grid.cells.size() == 2) c.grid.lengths.push_back(c.grid.lengths[0]);
  if (has_sweep) c.sweep = sweep;
  if (c.init.kind == InitKind::FromFile && !c.init.file.empty() && c.init.file.is_relative() && !base_dir.empty()) {
    c.init.file = base_dir / c.init.file;
  }
  build_model(c, raw);
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    config_error("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

void validate(const RunConfig& c) {
  const auto& g = c.grid;
  if (g.cells.empty() || g.cells.size() > 2) config_error("grid.cells must have one or two entries");
  if (g.lengths.size() != g.cells.size()) config_error("grid.lengths must match grid.cells");
  for (auto n : g.cells) {
    if (n < 2) config_error("grid.cells entries must be >= 2");
  }
  for (double l : g.lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) config_error("grid.lengths entries must be positive");
  }
  if (std::find(scenario_names().begin(), scenario_names().end(), c.scenario) == scenario_names().end()) {
    config_error("unknown scenario '" + c.scenario + "'");
  }
  try {
    c.model.validate();
    c.solver.validate();
    if (c.model.trunc_mu) EffectivePotential(c.model.potential, c.model.trunc_mu);
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (c.init.kind == InitKind::FromFile) {
    if (c.init.file.empty()) config_error("init.file is required for init.kind = from_file");
    if (!std::filesystem::exists(c.init.file)) config_error("init.file '" + c.init.file.string() + "' does not exist");
  }
  if (c.init.amplitude < 0.0) config_error("init.amplitude must be >= 0");
  if (c.scenario == "limit_sweep") {
    if (!c.sweep) config_error("limit_sweep needs a sweep block");
    const auto& v = c.sweep->values;
    if (v.size() < 2) config_error("sweep.values needs at least two values");
    const bool up = v[1] > v[0];
    for (std::size_t i = 1; i < v.size(); ++i) {
      if ((v[i] > v[i - 1]) != up || v[i] == v[i - 1]) config_error("sweep.values must be strictly monotone");
    }
    for (double x : v) {
      if (!(x > 0.0) && !(c.sweep->axis == SweepAxis::Delta && x == 0.0)) config_error("sweep.values must be positive");
    }
    if (c.sweep->reference != "finest") config_error("sweep.reference supports only 'finest'");
    if (c.sweep->axis == SweepAxis::Mu) {
      for (double mu : v) {
        try {
          EffectivePotential(c.model.potential, mu);
        } catch (const Error& e) {
          config_error("sweep value mu = " + std::to_string(mu) + ": " + e.what());
        }
      }
    }
  }
  if (c.scenario == "contdep") {
    if (c.contdep.n_pairs < 1 || c.contdep.calibration_pairs < 1) config_error("contdep needs at least one pair");
    if (!(c.contdep.perturb_scale >= 0.0)) config_error("contdep.perturb_scale must be >= 0");
  }
  if (c.rest.window < 2) config_error("rest.window must be >= 2");
  if (c.rest.sample_every < 1) config_error("rest.sample_every must be >= 1");
  if (!(c.rest.tol > 0.0) || !(c.rest.refine_tol > 0.0)) config_error("rest tolerances must be positive");
  if (!(c.rest.max_time > 0.0)) config_error("rest.max_time must be positive");
  if (!(c.audit.sigma > 0.0 && c.audit.sigma < 1.0)) config_error("audit.sigma must lie in (0,1)");
  for (double q : c.audit.q_values) {
    if (!(q > 2.0 && q < 6.0)) config_error("audit.q_values must lie in (2,6)");
  }
  if (c.audit.samples < 3) config_error("audit.samples must be >= 3");
  if (c.audit.poincare_cells < 2) config_error("audit.poincare_cells must be >= 2");
}

json to_json(const RunConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["out_dir"] = c.out_dir.string();
  j["workers"] = c.workers;
  j["grid.dim"] = c.grid.cells.size();
  j["grid.cells"] = c.grid.cells;
  j["grid.lengths"] = c.grid.lengths;
  j["model.delta"] = c.model.delta;
  const auto& mob = c.model.mobility;
  j["mobility.p"] = mob.p;
  j["mobility.form"] = mob.form == MobilityForm::Tabulated ? "tabulated" : "polynomial";
  if (mob.form == MobilityForm::Tabulated) {
    json rows = json::array();
    for (std::size_t i = 0; i < mob.nodes.size(); ++i) rows.push_back({mob.nodes[i], mob.values[i]});
    j["mobility.table"] = rows;
  }
  j["mobility.audit_range"] = {c.mobility_audit_range.lo, c.mobility_audit_range.hi};
  const auto& pot = c.model.potential;
  switch (pot.kind) {
    case PotentialKind::DoubleWell: j["potential.kind"] = "double_well"; break;
    case PotentialKind::EvenPolynomial:
      j["potential.kind"] = "even_polynomial";
      j["potential.coeffs"] = pot.coeffs;
      break;
    case PotentialKind::Logarithmic:
      j["potential.kind"] = "logarithmic";
      j["potential.lambda"] = pot.lambda;
      j["potential.interval"] = {pot.domain.lo, pot.domain.hi};
      break;
  }
  j["trunc.M"] = c.model.trunc_M ? json(*c.model.trunc_M) : json(nullptr);
  j["trunc.mu"] = c.model.trunc_mu ? json(*c.model.trunc_mu) : json(nullptr);
  j["solver.tau"] = c.solver.tau;
  j["solver.t_end"] = c.solver.t_end;
  j["solver.newton_tol"] = c.solver.newton_tol;
  j["solver.newton_max_iters"] = c.solver.newton_max_iters;
  j["solver.damping"] = c.solver.damping;
  j["solver.linear_tol"] = c.solver.linear_tol;
  j["solver.save_stride"] = c.solver.save_stride;
  switch (c.init.kind) {
    case InitKind::UniformNoise: j["init.kind"] = "uniform_noise"; break;
    case InitKind::Cosine: j["init.kind"] = "cosine"; break;
    case InitKind::FromFile: j["init.kind"] = "from_file"; break;
  }
  j["init.m0"] = c.init.m0;
  j["init.amplitude"] = c.init.amplitude;
  j["init.mode"] = c.init.mode;
  j["init.seed"] = c.init.seed;
  if (c.init.kind == InitKind::FromFile) j["init.file"] = c.init.file.string();
  j["init.lowpass"] = c.init.lowpass_cutoff ? json(*c.init.lowpass_cutoff) : json(nullptr);
  if (c.sweep) {
    j["sweep.axis"] = to_string(c.sweep->axis);
    j["sweep.values"] = c.sweep->values;
    j["sweep.reference"] = c.sweep->reference;
  }
  j["contdep.n_pairs"] = c.contdep.n_pairs;
  j["contdep.calibration_pairs"] = c.contdep.calibration_pairs;
  j["contdep.perturb_scale"] = c.contdep.perturb_scale;
  j["rest.max_time"] = c.rest.max_time;
  j["rest.window"] = c.rest.window;
  j["rest.tol"] = c.rest.tol;
  j["rest.sample_every"] = c.rest.sample_every;
  j["rest.refine_tol"] = c.rest.refine_tol;
  j["audit.range"] = {c.audit.range.lo, c.audit.range.hi};
  j["audit.samples"] = c.audit.samples;
  j["audit.sigma"] = c.audit.sigma;
  j["audit.q_values"] = c.audit.q_values;
  j["audit.fields"] = c.audit.fields;
  j["audit.poincare_fields"] = c.audit.poincare_fields;
  j["audit.p_values"] = c.audit.p_values;
  j["audit.poincare_cells"] = c.audit.poincare_cells;
  return j;
}

}  // namespace gencahn
