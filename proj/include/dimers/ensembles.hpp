#pragma once

// Ergodic, GOE and GGE predictions for the number-resolved entanglement, random
// canonical states, and chaotic-region counting inside a J shell.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimers/entanglement.hpp"
#include "dimers/model.hpp"
#include "dimers/spectral.hpp"

namespace dimers {

enum class EnsembleKind { ergodic, goe, gge };
std::string to_string(EnsembleKind kind);

struct EnsemblePrediction {
  EnsembleKind kind = EnsembleKind::ergodic;
  int N = 0;
  std::vector<double> p;        // per n_L
  std::vector<double> S;        // S^{(n_L)}
  std::vector<double> S_tilde;  // normalized-block entropy; empty for GGE
  double S_total = 0.0;
  double S_max = 0.0;

  // GGE only
  int J = -1;
  std::size_t D_ch = 0;
  std::vector<std::size_t> counts;
};

/// p = D^{(n_L)}/D, S^{(n_L)} = -p log(p/d_{n_L}).
EnsemblePrediction ergodic_prediction(int N);
/// Ergodic prediction with the finite-size fluctuation correction of random states.
EnsemblePrediction goe_prediction(int N);
/// counts[n_L] chaotic unperturbed states of shell J.
EnsemblePrediction gge_prediction(int N, int J, const std::vector<std::size_t>& counts);

struct RandomState {
  Eigen::VectorXd state;       // unit norm
  double norm_squared = 0.0;   // sum c^2 before renormalization (after projection if symmetrized)
};

/// c = z / sqrt(D) with z standard normal, optionally projected onto the trivial
/// D2 irrep, then renormalized. Stream k of a seed gives an independent,
/// reproducible sample.
RandomState sample_canonical_random_state(const FockBasis& basis, std::uint64_t seed, std::uint64_t stream,
                                          bool symmetrize);

/// Group average over {1, L<->R, +<->-, both}.
Eigen::VectorXd project_trivial_irrep(const FockBasis& basis, const Eigen::VectorXd& v);

struct EnsembleOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 12345;
  bool symmetrize = true;
  bool keep_states = false;
};

struct RandomStateEnsemble {
  int N = 0;
  std::uint64_t seed = 0;
  bool symmetrize = true;
  std::vector<double> norms_squared;
  std::vector<EntropySummary> entropies;
  std::vector<Eigen::VectorXd> states;  // only with keep_states
};

/// Sample i uses stream i; results do not depend on the thread count.
RandomStateEnsemble random_state_ensemble(const FockBasis& basis, const EnsembleOptions& options);

struct EnsembleStatistics {
  std::size_t count = 0;
  std::vector<double> mean_p, std_p;
  std::vector<double> mean_S, std_S;
  std::vector<double> mean_S_tilde, std_S_tilde;
  double mean_S_total = 0.0;
  double std_S_total = 0.0;

  double standard_error_p(std::size_t nl) const;
  double standard_error_S(std::size_t nl) const;
};

/// Per-n_L mean and unbiased standard deviation; needs at least two samples.
EnsembleStatistics ensemble_statistics(const std::vector<EntropySummary>& samples);

enum class ChaosMethod { top_k_shannon, pn_threshold };
std::string to_string(ChaosMethod method);
ChaosMethod parse_chaos_method(const std::string& name);

struct ChaoticRegion {
  int J = 0;
  ChaosMethod method = ChaosMethod::top_k_shannon;
  double param = 0.0;
  std::vector<std::size_t> exact_states;        // indices into the exact decomposition
  std::vector<std::size_t> unperturbed_states;  // indices into the unperturbed basis
  std::size_t D_ch = 0;
  std::vector<std::size_t> counts;              // per n_L label of the unperturbed states
};

/// top_k_shannon (param = K): the K exact states of the shell with the largest
/// Shannon entropy, and the K unperturbed shell states carrying the largest
/// summed weight over them.
/// pn_threshold (param = theta): unperturbed shell states with PN >= theta times
/// the shell maximum, and the same number of exact shell states carrying the
/// largest weight on them.
ChaoticRegion chaotic_region(int J, ChaosMethod method, double param, const std::vector<EigenstateRow>& rows,
                             const RowMatrix& overlaps, const UnperturbedBasis& unperturbed);

void write_prediction_csv(std::ostream& os, const std::vector<EnsemblePrediction>& predictions);
void write_statistics_csv(std::ostream& os, const EnsembleStatistics& stats);

}  // namespace dimers
