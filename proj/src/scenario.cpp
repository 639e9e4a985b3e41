#include "kinred/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kinred/errors.hpp"

namespace kinred {

using nlohmann::json;

const char* to_string(InitialPreset preset) {
  switch (preset) {
    case InitialPreset::Maxwellian: return "maxwellian";
    case InitialPreset::SineDensity: return "sine-density";
    case InitialPreset::TwoMaxwellianMix: return "two-maxwellian-mix";
  }
  return "?";
}

Profile InitialCondition::profile_at(double x, double length, const QuadratureRule& grid) const {
  const double phase = std::sin(2.0 * std::numbers::pi * mode * x / length);
  switch (preset) {
    case InitialPreset::Maxwellian:
      return maxwellian(rho, u, theta, grid);
    case InitialPreset::SineDensity: {
      const double density = rho * (1.0 + amplitude * phase);
      const Eigen::ArrayXd w2 = (grid.nodes().array() - u).square() / theta;
      return (maxwellian(density, u, theta, grid).array() * (1.0 + shape * w2) / (1.0 + shape))
          .matrix();
    }
    case InitialPreset::TwoMaxwellianMix: {
      const double m = 0.5 * (1.0 + amplitude * phase);
      return (1.0 - m) * maxwellian(rho, u, theta, grid) + m * maxwellian(rho2, u2, theta2, grid);
    }
  }
  return {};
}

double InitialCondition::max_speed() const {
  if (preset == InitialPreset::TwoMaxwellianMix) return std::max(std::abs(u), std::abs(u2));
  return std::abs(u);
}

double InitialCondition::max_theta() const {
  switch (preset) {
    case InitialPreset::Maxwellian: return theta;
    case InitialPreset::SineDensity: return theta * (1.0 + 3.0 * shape) / (1.0 + shape);
    case InitialPreset::TwoMaxwellianMix:
      return std::max(theta, theta2) + 0.25 * (u - u2) * (u - u2);
  }
  return theta;
}

double ScenarioConfig::half_width() const {
  if (velocity_half_width) return *velocity_half_width;
  return default_truncation(initial.max_speed(), initial.max_theta());
}

std::shared_ptr<const QuadratureRule> ScenarioConfig::make_grid() const {
  return std::make_shared<const QuadratureRule>(truncated_rule(half_width(), velocity_cells));
}

DistributionField ScenarioConfig::initial_field() const {
  DistributionField f(make_grid(), mesh);
  for (int i = 0; i < mesh.cells; ++i) {
    f.set_cell(i, initial.profile_at(mesh.center(i), mesh.length, *f.grid));
  }
  return f;
}

std::vector<double> ScenarioConfig::output_times() const {
  std::vector<double> times(static_cast<std::size_t>(outputs) + 1);
  for (int k = 0; k <= outputs; ++k) times[static_cast<std::size_t>(k)] = final_time * k / outputs;
  return times;
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  throw ConfigurationError("config field '" + path + "': " + why);
}

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0) || !std::isfinite(v)) bad(path, "must be a finite positive number");
}

/// Thin cursor over one JSON object that remembers which keys were read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_, "must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) bad(child(key), "is required");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) bad(child(key), "must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }
  int integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) bad(child(key), "must be an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }
  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) bad(child(key), "must be a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) bad(child(key), "must be true or false");
    return v.get<bool>();
  }
  Section object(const std::string& key) { return Section(at(key), child(key)); }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  /// Rejects keys nobody asked for.
  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!used_.count(key)) bad(child(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

InitialCondition parse_initial(Section s) {
  InitialCondition ic;
  const std::string preset = s.string("preset");
  if (preset == "maxwellian") {
    ic.preset = InitialPreset::Maxwellian;
  } else if (preset == "sine-density") {
    ic.preset = InitialPreset::SineDensity;
  } else if (preset == "two-maxwellian-mix") {
    ic.preset = InitialPreset::TwoMaxwellianMix;
  } else {
    bad(s.child("preset"), "unknown preset '" + preset + "'");
  }
  if (s.has("params")) {
    Section p = s.object("params");
    ic.rho = p.number("rho", ic.rho);
    ic.u = p.number("u", ic.u);
    ic.theta = p.number("theta", ic.theta);
    if (ic.preset != InitialPreset::Maxwellian) {
      ic.amplitude = p.number("amplitude", ic.amplitude);
      ic.mode = p.integer("mode", ic.mode);
    }
    if (ic.preset == InitialPreset::SineDensity) ic.shape = p.number("shape", ic.shape);
    if (ic.preset == InitialPreset::TwoMaxwellianMix) {
      ic.rho2 = p.number("rho2", ic.rho2);
      ic.u2 = p.number("u2", ic.u2);
      ic.theta2 = p.number("theta2", ic.theta2);
    }
    p.finish();
    const std::string base = s.child("params");
    require_positive(ic.rho, base + ".rho");
    require_positive(ic.theta, base + ".theta");
    if (!std::isfinite(ic.u)) bad(base + ".u", "must be finite");
    if (!(std::abs(ic.amplitude) < 1.0)) bad(base + ".amplitude", "must satisfy |amplitude| < 1");
    if (ic.mode < 1) bad(base + ".mode", "must be >= 1");
    if (!(ic.shape >= 0.0) || !std::isfinite(ic.shape)) bad(base + ".shape", "must be >= 0");
    if (ic.preset == InitialPreset::TwoMaxwellianMix) {
      require_positive(ic.rho2, base + ".rho2");
      require_positive(ic.theta2, base + ".theta2");
      if (!std::isfinite(ic.u2)) bad(base + ".u2", "must be finite");
    }
  }
  s.finish();
  return ic;
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    manifold.validate();
  } catch (const ParameterError& e) {
    bad("manifold.order", e.what());
  }
  require_positive(collision.tau, "collision.tau");
  try {
    collision.validate(1);
    // The audit linearizes in audit.dimension velocity dimensions.
    if (collision.kind == CollisionKind::ESBGK) collision.validate(audit.dimension);
  } catch (const ParameterError& e) {
    bad("collision.prandtl", e.what());
  }
  if (velocity_half_width) require_positive(*velocity_half_width, "velocity_grid.half_width");
  if (velocity_cells < 1 || velocity_cells > 4096) bad("velocity_grid.cells", "must be in [1, 4096]");
  if (mesh.cells < 1 || mesh.cells > 100000) bad("mesh.cells", "must be in [1, 100000]");
  require_positive(mesh.length, "mesh.length");
  if (!(final_time >= 0.0) || !std::isfinite(final_time)) bad("time.final", "must be >= 0");
  if (!(cfl > 0.0 && cfl < 1.0)) bad("time.cfl", "must lie in (0, 1)");
  if (outputs < 1) bad("time.outputs", "must be >= 1");
  if (!(norm_p > 1.0) || !std::isfinite(norm_p)) bad("norms.p", "must lie in (1, inf)");
  if (audit.samples < 1) bad("audit.samples", "must be >= 1");
  if (audit.lambda_claim && !std::isfinite(*audit.lambda_claim)) bad("audit.lambda_claim", "must be finite");
  if (audit.hermite_degree < 2 || audit.hermite_degree > 8) bad("audit.hermite_degree", "must be in [2, 8]");
  if (audit.dimension < 1 || audit.dimension > 3) bad("audit.dimension", "must be 1, 2 or 3");
  require_positive(audit.theta_max, "audit.theta_max");
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  Section top(root, "");

  {
    Section m = top.object("manifold");
    const std::string kind = m.string("kind");
    const auto k = manifold_kind_from_string(kind);
    if (!k) bad("manifold.kind", "unknown manifold kind '" + kind + "'");
    cfg.manifold = Manifold{*k, m.integer("order")};
    m.finish();
  }
  {
    Section c = top.object("collision");
    const std::string kind = c.string("kind");
    const auto k = collision_kind_from_string(kind);
    if (!k) bad("collision.kind", "unknown collision kind '" + kind + "'");
    cfg.collision.kind = *k;
    cfg.collision.tau = c.number("tau", 1.0);
    cfg.collision.prandtl = c.number("prandtl", 1.0);
    c.finish();
  }
  if (top.has("velocity_grid")) {
    Section v = top.object("velocity_grid");
    if (v.has("half_width")) cfg.velocity_half_width = v.number("half_width");
    cfg.velocity_cells = v.integer("cells", cfg.velocity_cells);
    v.finish();
  }
  {
    Section m = top.object("mesh");
    cfg.mesh.cells = m.integer("cells");
    cfg.mesh.length = m.number("length", 1.0);
    if (!m.boolean("periodic", true)) bad("mesh.periodic", "only periodic meshes are supported");
    m.finish();
  }
  cfg.initial = parse_initial(top.object("initial_condition"));
  {
    Section t = top.object("time");
    cfg.final_time = t.number("final");
    cfg.cfl = t.number("cfl", cfg.cfl);
    cfg.outputs = t.integer("outputs", cfg.outputs);
    t.finish();
  }
  if (top.has("norms")) {
    Section n = top.object("norms");
    cfg.norm_p = n.number("p", cfg.norm_p);
    n.finish();
  }
  if (top.has("seed")) {
    const json& s = top.at("seed");
    if (!s.is_number_unsigned()) bad("seed", "must be a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (top.has("audit")) {
    Section a = top.object("audit");
    cfg.audit.samples = a.integer("samples", cfg.audit.samples);
    if (a.has("lambda_claim")) cfg.audit.lambda_claim = a.number("lambda_claim");
    cfg.audit.hermite_degree = a.integer("hermite_degree", cfg.audit.hermite_degree);
    cfg.audit.dimension = a.integer("dimension", cfg.audit.dimension);
    cfg.audit.theta_max = a.number("theta_max", cfg.audit.theta_max);
    a.finish();
  }
  top.finish();
  cfg.validate();
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["manifold"] = {{"kind", to_string(cfg.manifold.kind)}, {"order", cfg.manifold.order}};
  j["collision"] = {{"kind", to_string(cfg.collision.kind)},
                    {"tau", cfg.collision.tau},
                    {"prandtl", cfg.collision.prandtl}};
  j["velocity_grid"] = {{"half_width", cfg.half_width()}, {"cells", cfg.velocity_cells}};
  j["mesh"] = {{"cells", cfg.mesh.cells}, {"length", cfg.mesh.length}, {"periodic", true}};
  const InitialCondition& ic = cfg.initial;
  json params = {{"rho", ic.rho}, {"u", ic.u}, {"theta", ic.theta}};
  if (ic.preset != InitialPreset::Maxwellian) {
    params["amplitude"] = ic.amplitude;
    params["mode"] = ic.mode;
  }
  if (ic.preset == InitialPreset::SineDensity) params["shape"] = ic.shape;
  if (ic.preset == InitialPreset::TwoMaxwellianMix) {
    params["rho2"] = ic.rho2;
    params["u2"] = ic.u2;
    params["theta2"] = ic.theta2;
  }
  j["initial_condition"] = {{"preset", to_string(ic.preset)}, {"params", params}};
  j["time"] = {{"final", cfg.final_time}, {"cfl", cfg.cfl}, {"outputs", cfg.outputs}};
  j["norms"] = {{"p", cfg.norm_p}};
  j["seed"] = cfg.seed;
  json audit = {{"samples", cfg.audit.samples},
                {"hermite_degree", cfg.audit.hermite_degree},
                {"dimension", cfg.audit.dimension},
                {"theta_max", cfg.audit.theta_max}};
  if (cfg.audit.lambda_claim) audit["lambda_claim"] = *cfg.audit.lambda_claim;
  j["audit"] = audit;
  return j.dump(2);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace kinred
