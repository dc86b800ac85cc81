#pragma once

// Exact and unperturbed eigenbases and per-eigenstate chaos diagnostics.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimers/model.hpp"

namespace dimers {

/// D2 irrep of an eigenvector; lr = pm = 0 when the solver did not resolve sectors.
struct SectorTag {
  int lr = 0;
  int pm = 0;

  bool resolved() const { return lr != 0; }
  std::string str() const;

  friend bool operator==(const SectorTag&, const SectorTag&) = default;
};

struct EigenDecomposition {
  Eigen::VectorXd energies;  // ascending, units of Omega
  Eigen::MatrixXd vectors;   // columns over the Fock basis
  std::vector<SectorTag> sectors;

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
};

/// Full spectrum of a symmetric matrix. The matrix is split into its connected
/// components (e.g. the n_L blocks at omega = 0) and each is diagonalized densely.
EigenDecomposition diagonalize(const HamiltonianMatrix& H);

/// Diagonalize each D2 sector separately and merge, keeping sector tags.
EigenDecomposition diagonalize_sectors(const HamiltonianMatrix& H,
                                       const std::array<SymmetrySector, 4>& sectors);

/// Sector-resolved diagonalization when omega > 0, component-wise when omega = 0.
EigenDecomposition solve_exact(const ModelParams& params, const FockBasis& basis);

/// Quantum numbers of an omega = 0 product eigenstate |n_L, j_L> x |n_R, j_R>.
struct UnperturbedLabel {
  int N = 0;
  int J = 0;  // j_L + j_R
  int n = 0;  // n_L - n_R
  int j = 0;  // j_L - j_R

  int n_left() const { return (N + n) / 2; }
  int n_right() const { return (N - n) / 2; }
  int j_left() const { return (J + j) / 2; }
  int j_right() const { return (J - j) / 2; }
  bool valid() const;
};

struct DimerSpectrum {
  Eigen::VectorXd energies;  // ascending; index is the excitation number j_alpha
  Eigen::MatrixXd vectors;   // columns over |n_+ = n - m, n_- = m>
};

/// Product basis of single-dimer eigenstates, laid out exactly like the Fock basis:
/// block n_L, then j_L, then j_R.
class UnperturbedBasis {
 public:
  UnperturbedBasis(const ModelParams& params, const FockBasis& basis);

  int N() const { return N_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<UnperturbedLabel>& labels() const { return labels_; }
  const Eigen::VectorXd& energies() const { return energies_; }
  /// Single-dimer spectrum for n particles, 0 <= n <= N.
  const DimerSpectrum& dimer(int n) const { return dimers_.at(n); }

  /// Expansion coefficients <mu|psi> of a Fock-basis state.
  Eigen::VectorXd coefficients(const Eigen::VectorXd& fock_state) const;
  /// Product state mu embedded in the Fock basis.
  Eigen::VectorXd vector(std::size_t mu) const;

 private:
  int N_;
  const FockBasis* basis_;
  std::vector<DimerSpectrum> dimers_;
  std::vector<UnperturbedLabel> labels_;
  Eigen::VectorXd energies_;
};

UnperturbedBasis build_unperturbed_basis(const ModelParams& params, const FockBasis& basis);

/// p(nu, mu) = |<nu|mu>|^2; rows are exact eigenstates.
RowMatrix overlap_probabilities(const EigenDecomposition& exact, const UnperturbedBasis& unperturbed);

double participation_number(std::span<const double> probabilities);

/// Shannon entropy (nats) of the Fock-basis probabilities of a normalized state.
double shannon_entropy(std::span<const double> state);
inline double shannon_entropy(const Eigen::VectorXd& state) {
  return shannon_entropy(std::span<const double>(state.data(), static_cast<std::size_t>(state.size())));
}
/// log(0.48 D)
double goe_shannon_reference(std::size_t D);

struct ImbalanceObservables {
  double mean_n = 0.0;
  double sigma_n = 0.0;
  double sigma_j = 0.0;
  double mean_J = 0.0;
  int shell = 0;
  bool ambiguous = false;  // |<J> - shell| > 0.25
};

ImbalanceObservables imbalance_observables(const Eigen::VectorXd& state, std::span<const double> overlaps,
                                           const FockBasis& basis, const UnperturbedBasis& unperturbed);

struct JointEntry {
  int n = 0;
  int j = 0;
  double p = 0.0;
};

struct JointDistribution {
  int J = 0;
  std::vector<JointEntry> entries;  // all shell-J labels, in basis order
  double in_shell = 0.0;
  double leakage = 0.0;
  bool leaky = false;  // leakage > 1e-3
};

JointDistribution joint_distribution(std::span<const double> overlaps, const UnperturbedBasis& unperturbed,
                                     int J);

struct EigenstateRow {
  std::size_t index = 0;
  SectorTag sector;
  double energy = 0.0;
  double pn = 0.0;
  double shannon = 0.0;
  ImbalanceObservables imbalance;
};

std::vector<EigenstateRow> eigenstate_table(const EigenDecomposition& exact, const RowMatrix& overlaps,
                                            const FockBasis& basis, const UnperturbedBasis& unperturbed);

struct UnperturbedRow {
  std::size_t index = 0;
  UnperturbedLabel label;
  double energy = 0.0;
  double pn = 0.0;       // in the exact eigenbasis
  double shannon = 0.0;  // over the Fock basis
};

std::vector<UnperturbedRow> unperturbed_table(const UnperturbedBasis& unperturbed, const RowMatrix& overlaps);

void write_eigenstate_csv(std::ostream& os, const std::vector<EigenstateRow>& rows);
void write_unperturbed_csv(std::ostream& os, const std::vector<UnperturbedRow>& rows);
void write_joint_csv(std::ostream& os, const JointDistribution& dist, std::size_t state_index);

}  // namespace dimers
