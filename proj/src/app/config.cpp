#include "dimers/app/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "dimers/errors.hpp"

namespace dimers::app {

ModelParams ModelConfig::params() const {
  return physical ? ModelParams::from_physical(N, Omega, U, omega) : ModelParams::from_scaled(N, u, w, Omega);
}

ModelParams ModelConfig::params_with_w(double w_override) const {
  const ModelParams p = params();
  return ModelParams::from_scaled(N, p.u(), w_override, p.Omega());
}

RunConfig::RunConfig() {
  LaunchConfig symmetric{"symmetric", LaunchSpec{11, 0, 0, 0}, std::nullopt};
  LaunchConfig trapped{"trapped", LaunchSpec{11, 18.2, 9.3, 0}, std::nullopt};
  trapped.spec.phi_right = std::numbers::pi;
  LaunchConfig control = trapped;
  control.label = "control_w0";
  control.w = 0.0;
  classical.launches = {symmetric, trapped, control};
}

namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where() + key + ": " + e.what());
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  const nlohmann::json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where() const { return path_.empty() ? "" : path_ + "."; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + where() + key + "'");
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

LaunchConfig parse_launch(const nlohmann::json& j, std::size_t k) {
  LaunchConfig l;
  l.label = "launch" + std::to_string(k);
  Section s(j, "classical.launches[" + std::to_string(k) + "]");
  s.get("label", l.label);
  s.get("J", l.spec.J);
  s.get("n", l.spec.n);
  s.get("j", l.spec.j);
  s.get("phi_lr", l.spec.phi_lr);
  s.get("phi_left", l.spec.phi_left);
  s.get("phi_right", l.spec.phi_right);
  s.get("z_sign_left", l.spec.z_sign_left);
  s.get("z_sign_right", l.spec.z_sign_right);
  if (s.has("w")) {
    double w = 0.0;
    s.get("w", w);
    l.w = w;
  }
  s.finish();
  return l;
}

nlohmann::json launch_to_json(const LaunchConfig& l) {
  nlohmann::json j = {{"label", l.label},
                      {"J", l.spec.J},
                      {"n", l.spec.n},
                      {"j", l.spec.j},
                      {"phi_lr", l.spec.phi_lr},
                      {"phi_left", l.spec.phi_left},
                      {"phi_right", l.spec.phi_right},
                      {"z_sign_left", l.spec.z_sign_left},
                      {"z_sign_right", l.spec.z_sign_right}};
  if (l.w) j["w"] = *l.w;
  return j;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  Section top(j, "");
  top.get("seed", c.seed);
  top.get("threads", c.threads);

  if (const auto* m = top.child("model")) {
    Section s(*m, "model");
    s.get("N", c.model.N);
    s.get("Omega", c.model.Omega);
    const bool scaled = s.has("u") || s.has("w");
    c.model.physical = s.has("U") || s.has("omega");
    if (scaled && c.model.physical) throw ConfigError("model: give either (u, w) or (U, omega), not both");
    s.get("u", c.model.u);
    s.get("w", c.model.w);
    s.get("U", c.model.U);
    s.get("omega", c.model.omega);
    s.finish();
  }
  if (const auto* m = top.child("spectrum")) {
    Section s(*m, "spectrum");
    s.get("shell", c.spectrum.shell);
    s.get("dump_json", c.spectrum.dump_json);
    s.finish();
  }
  if (const auto* m = top.child("entanglement")) {
    Section s(*m, "entanglement");
    s.get("shell", c.entanglement.shell);
    s.get("states", c.entanglement.states);
    s.get("cutoff", c.entanglement.cutoff);
    s.get("chaos_method", c.entanglement.chaos_method);
    s.get("K", c.entanglement.K);
    s.get("theta", c.entanglement.theta);
    s.finish();
  }
  if (const auto* m = top.child("ensemble")) {
    Section s(*m, "ensemble");
    s.get("N", c.ensemble.N);
    s.get("samples", c.ensemble.samples);
    s.get("symmetrize", c.ensemble.symmetrize);
    s.finish();
  }
  if (const auto* m = top.child("levelstats")) {
    Section s(*m, "levelstats");
    s.get("omegas", c.levelstats.omegas);
    s.get("bandwidth", c.levelstats.bandwidth);
    s.get("trim", c.levelstats.trim);
    s.get("bins", c.levelstats.bins);
    s.get("s_max", c.levelstats.s_max);
    s.get("bootstrap", c.levelstats.bootstrap);
    s.finish();
  }
  if (const auto* m = top.child("classical")) {
    Section s(*m, "classical");
    if (const auto* l = s.child("launches")) {
      if (!l->is_array()) throw ConfigError("classical.launches must be an array");
      c.classical.launches.clear();
      for (std::size_t k = 0; k < l->size(); ++k) c.classical.launches.push_back(parse_launch(l->at(k), k));
    }
    s.get("t_max", c.classical.t_max);
    s.get("dt_out", c.classical.dt_out);
    s.get("tolerance", c.classical.tolerance);
    s.get("initial_step", c.classical.initial_step);
    s.get("min_step", c.classical.min_step);
    s.finish();
  }
  if (const auto* m = top.child("scan")) {
    Section s(*m, "scan");
    s.get("u", c.scan.u);
    s.get("w", c.scan.w);
    s.get("brody", c.scan.brody);
    s.finish();
  }
  if (const auto* m = top.child("cache")) {
    Section s(*m, "cache");
    s.get("enabled", c.cache.enabled);
    s.get("dir", c.cache.dir);
    s.finish();
  }
  top.finish();
  validate(c);
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json model = {{"N", c.model.N}, {"Omega", c.model.Omega}};
  if (c.model.physical) {
    model["U"] = c.model.U;
    model["omega"] = c.model.omega;
  } else {
    model["u"] = c.model.u;
    model["w"] = c.model.w;
  }
  nlohmann::json launches = nlohmann::json::array();
  for (const auto& l : c.classical.launches) launches.push_back(launch_to_json(l));
  return {
      {"model", model},
      {"seed", c.seed},
      {"threads", c.threads},
      {"spectrum", {{"shell", c.spectrum.shell}, {"dump_json", c.spectrum.dump_json}}},
      {"entanglement",
       {{"shell", c.entanglement.shell},
        {"states", c.entanglement.states},
        {"cutoff", c.entanglement.cutoff},
        {"chaos_method", c.entanglement.chaos_method},
        {"K", c.entanglement.K},
        {"theta", c.entanglement.theta}}},
      {"ensemble", {{"N", c.ensemble.N}, {"samples", c.ensemble.samples}, {"symmetrize", c.ensemble.symmetrize}}},
      {"levelstats",
       {{"omegas", c.levelstats.omegas},
        {"bandwidth", c.levelstats.bandwidth},
        {"trim", c.levelstats.trim},
        {"bins", c.levelstats.bins},
        {"s_max", c.levelstats.s_max},
        {"bootstrap", c.levelstats.bootstrap}}},
      {"classical",
       {{"launches", launches},
        {"t_max", c.classical.t_max},
        {"dt_out", c.classical.dt_out},
        {"tolerance", c.classical.tolerance},
        {"initial_step", c.classical.initial_step},
        {"min_step", c.classical.min_step}}},
      {"scan", {{"u", c.scan.u}, {"w", c.scan.w}, {"brody", c.scan.brody}}},
      {"cache", {{"enabled", c.cache.enabled}, {"dir", c.cache.dir}}},
  };
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + file.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  nlohmann::json* node = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("empty key in override " + assignment);
    if (!node->is_object()) throw ConfigError("override path " + path + " crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null()) *node = nlohmann::json::object();
    start = dot + 1;
  }
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(c.model.N >= 1, "model.N must be >= 1");
  require(c.model.Omega > 0.0, "model.Omega must be positive");
  if (c.model.physical) {
    require(c.model.U >= 0.0 && std::isfinite(c.model.U), "model.U must be finite and >= 0");
    require(c.model.omega >= 0.0 && std::isfinite(c.model.omega), "model.omega must be finite and >= 0");
  } else {
    require(c.model.u >= 0.0 && std::isfinite(c.model.u), "model.u must be finite and >= 0");
    require(c.model.w >= 0.0 && std::isfinite(c.model.w), "model.w must be finite and >= 0");
  }
  require(c.threads >= 1, "threads must be >= 1");
  require(c.spectrum.shell <= c.model.N, "spectrum.shell must lie in [0, N]");
  require(c.entanglement.shell <= c.model.N, "entanglement.shell must lie in [0, N]");
  require(c.entanglement.cutoff >= 0.0, "entanglement.cutoff must be >= 0");
  require(c.entanglement.chaos_method == "topK_shannon" || c.entanglement.chaos_method == "pn_threshold",
          "entanglement.chaos_method must be topK_shannon or pn_threshold");
  require(c.entanglement.K >= 1, "entanglement.K must be >= 1");
  require(c.entanglement.theta >= 0.0 && c.entanglement.theta <= 1.0, "entanglement.theta must lie in [0, 1]");
  require(c.ensemble.N >= 1, "ensemble.N must be >= 1");
  require(c.ensemble.samples >= 2, "ensemble.samples must be >= 2");
  require(!c.levelstats.omegas.empty(), "levelstats.omegas is empty");
  for (double w : c.levelstats.omegas) require(w >= 0.0, "levelstats.omegas must be >= 0");
  require(c.levelstats.bandwidth > 0.0, "levelstats.bandwidth must be positive");
  require(c.levelstats.trim >= 0.0 && c.levelstats.trim < 0.5, "levelstats.trim must lie in [0, 0.5)");
  require(c.levelstats.bins >= 1 && c.levelstats.s_max > 0.0, "levelstats histogram needs bins >= 1, s_max > 0");
  require(c.classical.t_max > 0.0 && c.classical.dt_out > 0.0, "classical.t_max and dt_out must be positive");
  require(c.classical.tolerance > 0.0, "classical.tolerance must be positive");
  require(c.classical.initial_step > 0.0 && c.classical.min_step > 0.0 &&
              c.classical.min_step <= c.classical.initial_step,
          "classical steps must satisfy 0 < min_step <= initial_step");
  std::set<std::string> labels;
  for (const auto& l : c.classical.launches) {
    require(!l.label.empty(), "launch label must not be empty");
    require(labels.insert(l.label).second, "duplicate launch label " + l.label);
    require(l.label.find_first_of("/\\") == std::string::npos, "launch label must not contain path separators");
    if (l.w) require(*l.w >= 0.0, "launch w must be >= 0");
  }
  require(!c.scan.u.empty() && !c.scan.w.empty(), "scan grid is empty");
}

}  // namespace dimers::app
