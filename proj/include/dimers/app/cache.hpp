#pragma once

// On-disk cache of exact eigendecompositions keyed by the model parameters.
// Binary layout (little-endian host order):
//   "DIMEIG01" | u64 FNV-1a of payload | payload
//   payload = i32 N | f64 Omega, U, omega | u64 D | D energies | D*D vectors
//             (column-major) | D x (i8 lr, i8 pm)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dimers/model.hpp"
#include "dimers/spectral.hpp"

namespace dimers::app {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t hash = kFnvOffset);

/// Hex key over (N, u, w, Omega).
std::string cache_key(const ModelParams& params);

void save_decomposition(const std::filesystem::path& file, const ModelParams& params, const EigenDecomposition& e);
/// nullopt when the file is missing, corrupt, or belongs to other parameters.
std::optional<EigenDecomposition> load_decomposition(const std::filesystem::path& file, const ModelParams& params);

class DecompositionCache {
 public:
  DecompositionCache(std::filesystem::path dir, bool enabled) : dir_(std::move(dir)), enabled_(enabled) {}

  /// solve_exact, through the cache when enabled.
  EigenDecomposition get(const ModelParams& params, const FockBasis& basis);

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::filesystem::path dir_;
  bool enabled_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace dimers::app
