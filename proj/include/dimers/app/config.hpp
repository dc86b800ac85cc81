#pragma once

// Run configuration: strict JSON with defaults for every field. Unknown keys
// and inconsistent values raise ConfigError.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimers/classical.hpp"
#include "dimers/model.hpp"

namespace dimers::app {

struct ModelConfig {
  int N = 21;
  // scaled form (default) or physical form; exactly one is used
  double u = 0.5;
  double w = 0.082;
  double Omega = 1.0;
  bool physical = false;
  double U = 0.0;
  double omega = 0.0;

  ModelParams params() const;
  ModelParams params_with_w(double w_override) const;
};

/// A negative shell selects the middle one, (N + 1) / 2 (J = 11 at N = 21).
inline int resolve_shell(int shell, int N) { return shell < 0 ? (N + 1) / 2 : shell; }

struct SpectrumConfig {
  int shell = -1;  // shell whose marked states get joint (n, j) tables; -1: middle
  bool dump_json = false;  // basis and Hamiltonian debug dumps
};

struct EntanglementConfig {
  int shell = -1;  // -1: middle
  std::vector<std::string> states{"min_sigma_n", "max_sigma_n", "max_H"};
  double cutoff = 1e-14;
  std::string chaos_method = "topK_shannon";
  int K = 100;
  double theta = 0.5;
};

struct EnsembleConfig {
  int N = 29;
  std::size_t samples = 1000;
  bool symmetrize = true;
};

struct LevelstatsConfig {
  std::vector<double> omegas{0.01, 0.082, 0.5};  // values of w
  double bandwidth = 8.0;
  double trim = 0.02;
  std::size_t bins = 40;
  double s_max = 4.0;
  std::size_t bootstrap = 200;
};

struct LaunchConfig {
  std::string label;
  LaunchSpec spec;
  std::optional<double> w;  // coupling for this run only, e.g. 0 for the control
};

struct ClassicalConfig {
  std::vector<LaunchConfig> launches;
  double t_max = 1000.0;
  double dt_out = 1.0;
  double tolerance = 1e-8;
  double initial_step = 0.05;
  double min_step = 1e-4;
};

struct ScanConfig {
  std::vector<double> u{0.5};
  std::vector<double> w{0.01, 0.02, 0.04, 0.06, 0.082, 0.1, 0.15, 0.2, 0.3, 0.5};
  bool brody = false;  // gap ratios only unless set
};

struct CacheConfig {
  bool enabled = true;
  std::string dir;  // empty: <out>/cache
};

struct RunConfig {
  ModelConfig model;
  std::uint64_t seed = 12345;
  int threads = 1;
  SpectrumConfig spectrum;
  EntanglementConfig entanglement;
  EnsembleConfig ensemble;
  LevelstatsConfig levelstats;
  ClassicalConfig classical;
  ScanConfig scan;
  CacheConfig cache;

  RunConfig();  // fills the default launches
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& file);

/// Applies "a.b.c=value"; value is parsed as JSON, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Range and consistency checks beyond what parsing enforces.
void validate(const RunConfig& c);

}  // namespace dimers::app
