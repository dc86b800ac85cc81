#pragma once

// Two weakly coupled Bose-Hubbard dimers: Fock basis at fixed particle number,
// Hamiltonian assembly and the D2 (L<->R, +<->-) symmetry decomposition.

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dimers {

using SparseMatrix = Eigen::SparseMatrix<double>;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Model parameters. Energies are in units of the intra-dimer hopping Omega.
class ModelParams {
 public:
  static ModelParams from_physical(int N, double Omega, double U, double omega);
  /// u = U N / Omega, w = omega / Omega.
  static ModelParams from_scaled(int N, double u, double w, double Omega = 1.0);

  int N() const { return N_; }
  double Omega() const { return Omega_; }
  double U() const { return U_; }
  double omega() const { return omega_; }
  double w() const { return w_; }
  double u() const { return u_; }

  /// Derived w, u agree with the primitive fields to machine precision.
  bool consistent() const;

 private:
  ModelParams(int N, double Omega, double U, double omega);

  int N_;
  double Omega_;
  double U_;
  double omega_;
  double w_;
  double u_;
};

/// Mode order is (L+, L-, R+, R-).
enum Mode : int { kLeftPlus = 0, kLeftMinus = 1, kRightPlus = 2, kRightMinus = 3 };

struct FockState {
  std::array<int, 4> n{};

  int left() const { return n[kLeftPlus] + n[kLeftMinus]; }
  int right() const { return n[kRightPlus] + n[kRightMinus]; }
  int total() const { return left() + right(); }
  /// Particle imbalance n_L - n_R.
  int imbalance() const { return left() - right(); }

  friend bool operator==(const FockState&, const FockState&) = default;
};

/// The slice of the basis holding all states with a given n_L. Inside the
/// slice, state (n_L-, n_R-) sits at offset + n_L- * d_right + n_R-, so the
/// amplitudes form a row-major d_left x d_right coefficient rectangle.
struct BlockRange {
  std::size_t offset = 0;
  std::size_t size = 0;
  int d_left = 0;
  int d_right = 0;
};

std::size_t hilbert_dimension(int N);
std::size_t block_dimension(int N, int n_left);
/// Rank bound of the n_L block of the reduced density matrix, min(d_L, d_R).
int block_rank_bound(int N, int n_left);
/// Maximal number of nonzero reduced-density eigenvalues, sum of the rank bounds.
int schmidt_capacity(int N);
/// Number of unperturbed states in the fixed-J shell, (J+1)(N+1-J).
std::size_t shell_dimension(int N, int J);
/// Number of unperturbed states in the fixed-J shell with a given n_L.
std::size_t shell_block_dimension(int N, int J, int n_left);

class FockBasis {
 public:
  explicit FockBasis(int N);

  int N() const { return N_; }
  std::size_t size() const { return states_.size(); }
  const FockState& operator[](std::size_t i) const { return states_[i]; }
  const std::vector<FockState>& states() const { return states_; }

  std::size_t index_of(const FockState& s) const;
  const BlockRange& block(int n_left) const;

  /// Index of the image of state i under L<->R and under +<->-.
  std::size_t swap_lr(std::size_t i) const { return swap_lr_[i]; }
  std::size_t swap_pm(std::size_t i) const { return swap_pm_[i]; }

 private:
  int N_;
  std::vector<FockState> states_;
  std::vector<BlockRange> blocks_;
  std::vector<std::size_t> swap_lr_;
  std::vector<std::size_t> swap_pm_;
};

FockBasis enumerate_basis(int N);

struct HamiltonianMatrix {
  int N = 0;
  SparseMatrix matrix;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
};

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const FockBasis& basis);

/// Two-mode Bose-Hubbard matrix of one dimer in the basis |n_+ = n - m, n_- = m>, m = 0..n.
Eigen::MatrixXd build_dimer_hamiltonian(int n, double Omega, double U);

struct Parity {
  int lr = 1;
  int pm = 1;

  friend bool operator==(const Parity&, const Parity&) = default;
};

inline constexpr std::array<Parity, 4> kSectorParities{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

struct SymmetrySector {
  Parity parity;
  /// D x d matrix whose orthonormal columns span the sector.
  SparseMatrix vectors;

  std::size_t dimension() const { return static_cast<std::size_t>(vectors.cols()); }
};

std::array<SymmetrySector, 4> symmetry_sectors(const FockBasis& basis);

/// Dense sector block V^T H V.
Eigen::MatrixXd sector_hamiltonian(const HamiltonianMatrix& H, const SymmetrySector& sector);

/// Group average of a state onto the irrep with the given parities (not renormalized).
Eigen::VectorXd project_onto_sector(const FockBasis& basis, const Eigen::VectorXd& state,
                                    Parity parity = {1, 1});

struct JosonParams {
  double w_J = 0.0;
  double U_J = 0.0;
};

/// Effective joson tunnelling and interaction for scaled (w, u) and bare U.
JosonParams effective_joson_params(double w, double u, double U);
JosonParams effective_joson_params(const ModelParams& params);

}  // namespace dimers
