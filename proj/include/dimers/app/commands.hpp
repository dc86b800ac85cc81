#pragma once

// Subcommands that turn a RunConfig into CSV tables plus a manifest.json in
// the output directory.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimers/app/config.hpp"
#include "dimers/spectral.hpp"

namespace dimers::app {

const std::vector<std::string>& command_names();

/// Runs one subcommand. Throws ConfigError for bad input or an unwritable
/// output directory, NumericError when a computation misses its tolerance.
nlohmann::json run_command(const std::string& name, const RunConfig& config, const std::filesystem::path& out);

/// Exact spectrum, unperturbed basis and their overlaps for one parameter set.
struct SpectralData {
  SpectralData(const ModelParams& params, EigenDecomposition exact);
  SpectralData(const SpectralData&) = delete;
  SpectralData& operator=(const SpectralData&) = delete;

  ModelParams params;
  FockBasis basis;
  EigenDecomposition exact;
  UnperturbedBasis unperturbed;
  RowMatrix overlaps;
  std::vector<EigenstateRow> rows;
};

/// Index of the exact state picked by a selector within shell J:
/// "min_sigma_n", "max_sigma_n", "max_H", or a plain eigenstate index.
std::size_t select_state(const std::vector<EigenstateRow>& rows, int J, const std::string& selector);

}  // namespace dimers::app
