#pragma once

// Reduced one-dimer density matrices in n_L blocks and the number-resolved
// entanglement spectrum and entropies.

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "dimers/model.hpp"

namespace dimers {

/// rho_L = sum_{n_L} p_{n_L} rho^{(n_L)} stored block by block (unnormalized
/// blocks, trace = p_{n_L}).
struct ReducedDensityBlocks {
  int N = 0;
  std::vector<Eigen::MatrixXd> blocks;  // index n_L, dimension n_L + 1
  std::vector<double> weights;          // p_{n_L}
};

/// Left-dimer blocks C C^T from coefficients over a block-ordered product
/// basis: the Fock basis, or the unperturbed basis (dimer eigenstates), which
/// shares its layout.
ReducedDensityBlocks reduced_density_blocks(const FockBasis& basis, const Eigen::VectorXd& coefficients);
/// Right-dimer blocks C^T C, still indexed by n_L (the right dimer holds N - n_L).
ReducedDensityBlocks reduced_density_blocks_right(const FockBasis& basis, const Eigen::VectorXd& coefficients);

struct EntanglementBlock {
  int n_left = 0;
  double p = 0.0;
  std::vector<double> lambda;     // retained eigenvalues, descending
  std::vector<double> xi;         // -log(lambda)
  std::vector<double> xi_tilde;   // xi + log(p)
  double S = 0.0;                 // -sum lambda log lambda
  double S_tilde = 0.0;           // entropy of rho^{(n_L)} / p
};

struct EntanglementSpectrum {
  int N = 0;
  std::vector<EntanglementBlock> blocks;
};

inline constexpr double kDefaultEigenvalueCutoff = 1e-14;

/// Eigenvalues below the cutoff are dropped; an eigenvalue below -1e-10 means a
/// corrupted block and raises NumericError.
EntanglementSpectrum entanglement_spectrum(const ReducedDensityBlocks& blocks,
                                           double cutoff = kDefaultEigenvalueCutoff);

/// Same spectrum from singular values of each coefficient rectangle.
EntanglementSpectrum entanglement_spectrum_svd(const FockBasis& basis, const Eigen::VectorXd& coefficients,
                                               double cutoff = kDefaultEigenvalueCutoff);

inline EntanglementSpectrum state_entanglement(const FockBasis& basis, const Eigen::VectorXd& coefficients,
                                               double cutoff = kDefaultEigenvalueCutoff) {
  return entanglement_spectrum(reduced_density_blocks(basis, coefficients), cutoff);
}

struct EntropySummary {
  double S = 0.0;
  double S_max = 0.0;  // log of the Schmidt capacity
  std::vector<double> p;
  std::vector<double> S_block;
  std::vector<double> S_tilde;
};

EntropySummary total_entropy(const EntanglementSpectrum& spectrum);

double purity(const EntanglementSpectrum& spectrum);

/// Rows (state, n_L, i, lambda, xi, xi_tilde).
void write_spectrum_csv(std::ostream& os, const std::vector<std::pair<std::size_t, EntanglementSpectrum>>& spectra);
/// Rows (state, n_L, p, S_nL, S_tilde_nL); totals are the sums over n_L.
void write_entropy_blocks_csv(std::ostream& os, const std::vector<std::pair<std::size_t, EntropySummary>>& rows);

}  // namespace dimers
