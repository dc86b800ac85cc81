// dimers: figure-data pipelines for two coupled Bose-Hubbard dimers.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 1 other.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimers/app/commands.hpp"
#include "dimers/app/config.hpp"
#include "dimers/errors.hpp"
#include "dimers/version.hpp"

namespace {

std::string number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dimers;

  CLI::App cli{"Spectra, entanglement and mean-field dynamics of two coupled Bose-Hubbard dimers"};
  cli.set_version_flag("--version", kVersion);

  std::string command;
  std::string config_file;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> N;
  std::optional<double> u, w;
  std::vector<std::string> sets;
  bool print_config = false;

  cli.add_option("command", command, "spectrum | entanglement | ensemble | levelstats | classical | scan")
      ->check(CLI::IsMember(app::command_names()));
  cli.add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
  cli.add_option("--out", out, "output directory")->capture_default_str();
  cli.add_option("--seed", seed, "master random seed");
  cli.add_option("--threads", threads, "worker thread cap");
  cli.add_option("--N", N, "particle number");
  cli.add_option("--u", u, "interaction u = UN/Omega");
  cli.add_option("--w", w, "coupling w = omega/Omega");
  cli.add_option("--set", sets, "override a config entry, e.g. --set ensemble.samples=200");
  cli.add_flag("--print-config", print_config, "print the resolved configuration and exit");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + config_file + ": " + e.what());
      }
    }
    for (const auto& s : sets) app::apply_override(j, s);
    if (N) app::apply_override(j, "model.N=" + std::to_string(*N));
    if (u) app::apply_override(j, "model.u=" + number(*u));
    if (w) app::apply_override(j, "model.w=" + number(*w));
    if (seed) app::apply_override(j, "seed=" + std::to_string(*seed));
    if (threads) app::apply_override(j, "threads=" + std::to_string(*threads));
    const app::RunConfig config = app::config_from_json(j);

    if (print_config) {
      std::cout << app::config_to_json(config).dump(2) << '\n';
      return 0;
    }
    if (command.empty()) throw ConfigError("no command given (see --help)");
    const auto manifest = app::run_command(command, config, out);
    std::cout << command << ": wrote " << manifest["outputs"].size() << " files to " << out << " in "
              << manifest["wall_time_s"].get<double>() << " s\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
