#include "dimers/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dimers {

ModelParams::ModelParams(int N, double Omega, double U, double omega)
    : N_(N), Omega_(Omega), U_(U), omega_(omega), w_(omega / Omega), u_(U * N / Omega) {}

ModelParams ModelParams::from_physical(int N, double Omega, double U, double omega) {
  if (N < 1) throw std::domain_error("particle number must be >= 1, got " + std::to_string(N));
  if (!(Omega > 0.0)) throw std::domain_error("Omega must be positive");
  if (!(U >= 0.0)) throw std::domain_error("U must be non-negative");
  if (!(omega >= 0.0)) throw std::domain_error("omega must be non-negative");
  return ModelParams(N, Omega, U, omega);
}

ModelParams ModelParams::from_scaled(int N, double u, double w, double Omega) {
  if (N < 1) throw std::domain_error("particle number must be >= 1, got " + std::to_string(N));
  return from_physical(N, Omega, u * Omega / N, w * Omega);
}

bool ModelParams::consistent() const {
  const double eps = 4 * std::numeric_limits<double>::epsilon();
  const double w = omega_ / Omega_;
  const double u = U_ * N_ / Omega_;
  return std::abs(w - w_) <= eps * std::max(1.0, std::abs(w)) &&
         std::abs(u - u_) <= eps * std::max(1.0, std::abs(u));
}

std::size_t hilbert_dimension(int N) {
  const auto n = static_cast<std::size_t>(N);
  return (n + 1) * (n + 2) * (n + 3) / 6;
}

std::size_t block_dimension(int N, int n_left) {
  return static_cast<std::size_t>(n_left + 1) * static_cast<std::size_t>(N - n_left + 1);
}

int block_rank_bound(int N, int n_left) { return std::min(n_left + 1, N - n_left + 1); }

int schmidt_capacity(int N) {
  int d = 0;
  for (int nl = 0; nl <= N; ++nl) d += block_rank_bound(N, nl);
  return d;
}

std::size_t shell_dimension(int N, int J) {
  if (J < 0 || J > N) return 0;
  return static_cast<std::size_t>(J + 1) * static_cast<std::size_t>(N + 1 - J);
}

std::size_t shell_block_dimension(int N, int J, int n_left) {
  if (J < 0 || J > N || n_left < 0 || n_left > N) return 0;
  return static_cast<std::size_t>(std::min({n_left, N - n_left, J, N - J}) + 1);
}

FockBasis::FockBasis(int N) : N_(N) {
  if (N < 1) throw std::domain_error("Fock basis needs N >= 1, got " + std::to_string(N));
  states_.reserve(hilbert_dimension(N));
  blocks_.reserve(N + 1);
  for (int nl = 0; nl <= N; ++nl) {
    const int nr = N - nl;
    BlockRange b;
    b.offset = states_.size();
    b.d_left = nl + 1;
    b.d_right = nr + 1;
    b.size = block_dimension(N, nl);
    for (int lm = 0; lm <= nl; ++lm) {
      for (int rm = 0; rm <= nr; ++rm) {
        states_.push_back(FockState{{nl - lm, lm, nr - rm, rm}});
      }
    }
    blocks_.push_back(b);
  }

  swap_lr_.resize(states_.size());
  swap_pm_.resize(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto& s = states_[i].n;
    swap_lr_[i] = index_of(FockState{{s[2], s[3], s[0], s[1]}});
    swap_pm_[i] = index_of(FockState{{s[1], s[0], s[3], s[2]}});
  }
}

std::size_t FockBasis::index_of(const FockState& s) const {
  for (int x : s.n) {
    if (x < 0) throw std::out_of_range("negative occupation");
  }
  if (s.total() != N_) throw std::out_of_range("state has wrong particle number");
  const BlockRange& b = blocks_[s.left()];
  return b.offset + static_cast<std::size_t>(s.n[kLeftMinus]) * b.d_right +
         static_cast<std::size_t>(s.n[kRightMinus]);
}

const BlockRange& FockBasis::block(int n_left) const {
  if (n_left < 0 || n_left > N_) throw std::out_of_range("n_L outside [0, N]");
  return blocks_[n_left];
}

FockBasis enumerate_basis(int N) { return FockBasis(N); }

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const FockBasis& basis) {
  if (params.N() != basis.N()) {
    throw std::invalid_argument("basis built for N=" + std::to_string(basis.N()) +
                                " but parameters have N=" + std::to_string(params.N()));
  }
  const double half_Omega = 0.5 * params.Omega();
  const double half_omega = 0.5 * params.omega();
  const double half_U = 0.5 * params.U();

  // Each hopping pair is listed once; its transpose is inserted with the same value.
  struct Hop {
    int from;
    int to;
    double amplitude;
  };
  const std::array<Hop, 4> hops{{{kLeftMinus, kLeftPlus, -half_Omega},
                                 {kRightMinus, kRightPlus, -half_Omega},
                                 {kLeftPlus, kRightPlus, -half_omega},
                                 {kLeftMinus, kRightMinus, -half_omega}}};

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(basis.size() * 9);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const FockState& s = basis[i];
    double diag = 0.0;
    for (int x : s.n) diag += half_U * x * (x - 1);
    if (diag != 0.0) triplets.emplace_back(i, i, diag);

    for (const Hop& h : hops) {
      if (h.amplitude == 0.0 || s.n[h.from] == 0) continue;
      FockState t = s;
      t.n[h.from] -= 1;
      t.n[h.to] += 1;
      const double value = h.amplitude * std::sqrt(static_cast<double>(s.n[h.from]) * t.n[h.to]);
      const std::size_t j = basis.index_of(t);
      triplets.emplace_back(j, i, value);
      triplets.emplace_back(i, j, value);
    }
  }

  HamiltonianMatrix H;
  H.N = basis.N();
  H.matrix.resize(basis.size(), basis.size());
  H.matrix.setFromTriplets(triplets.begin(), triplets.end());
  H.matrix.makeCompressed();
  return H;
}

Eigen::MatrixXd build_dimer_hamiltonian(int n, double Omega, double U) {
  if (n < 0) throw std::invalid_argument("dimer particle number must be >= 0");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int m = 0; m <= n; ++m) {
    const int p = n - m;
    h(m, m) = 0.5 * U * (p * (p - 1.0) + m * (m - 1.0));
    if (m < n) {
      const double t = -0.5 * Omega * std::sqrt((m + 1.0) * p);
      h(m + 1, m) = t;
      h(m, m + 1) = t;
    }
  }
  return h;
}

std::array<SymmetrySector, 4> symmetry_sectors(const FockBasis& basis) {
  constexpr double kNullTolerance = 1e-12;
  const std::size_t D = basis.size();

  std::array<SymmetrySector, 4> sectors;
  for (std::size_t k = 0; k < kSectorParities.size(); ++k) {
    const Parity p = kSectorParities[k];
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<bool> seen(D, false);
    Eigen::Index column = 0;
    for (std::size_t i = 0; i < D; ++i) {
      if (seen[i]) continue;
      // Orbit of i under {e, LR, PM, LR*PM} with the irrep characters.
      const std::size_t lr = basis.swap_lr(i);
      const std::size_t pm = basis.swap_pm(i);
      const std::size_t both = basis.swap_lr(pm);
      const std::array<std::size_t, 4> orbit{i, lr, pm, both};
      const std::array<double, 4> chars{1.0, double(p.lr), double(p.pm), double(p.lr * p.pm)};
      for (std::size_t g : orbit) seen[g] = true;

      // Accumulate the group average on the (at most four) orbit members. Vectors
      // from distinct orbits have disjoint support, so only the norm needs checking.
      std::array<std::pair<std::size_t, double>, 4> acc{};
      std::size_t used = 0;
      for (std::size_t g = 0; g < 4; ++g) {
        std::size_t slot = 0;
        while (slot < used && acc[slot].first != orbit[g]) ++slot;
        if (slot == used) acc[used++] = {orbit[g], 0.0};
        acc[slot].second += 0.25 * chars[g];
      }
      double norm2 = 0.0;
      for (std::size_t s = 0; s < used; ++s) norm2 += acc[s].second * acc[s].second;
      if (std::sqrt(norm2) <= kNullTolerance) continue;
      const double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t s = 0; s < used; ++s) {
        if (acc[s].second != 0.0) triplets.emplace_back(acc[s].first, column, acc[s].second * inv);
      }
      ++column;
    }
    sectors[k].parity = p;
    sectors[k].vectors.resize(D, column);
    sectors[k].vectors.setFromTriplets(triplets.begin(), triplets.end());
    sectors[k].vectors.makeCompressed();
  }
  return sectors;
}

Eigen::MatrixXd sector_hamiltonian(const HamiltonianMatrix& H, const SymmetrySector& sector) {
  const SparseMatrix& V = sector.vectors;
  if (static_cast<std::size_t>(V.rows()) != H.size()) {
    throw std::invalid_argument("sector basis does not match Hamiltonian dimension");
  }
  const SparseMatrix block = V.transpose() * H.matrix * V;
  Eigen::MatrixXd dense(block);
  // Symmetrize away round-off from the triple product.
  return 0.5 * (dense + dense.transpose());
}

Eigen::VectorXd project_onto_sector(const FockBasis& basis, const Eigen::VectorXd& state,
                                    Parity parity) {
  if (static_cast<std::size_t>(state.size()) != basis.size()) {
    throw std::invalid_argument("state dimension does not match basis");
  }
  Eigen::VectorXd out(state.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::size_t lr = basis.swap_lr(i);
    const std::size_t pm = basis.swap_pm(i);
    const std::size_t both = basis.swap_lr(pm);
    out[i] = 0.25 * (state[i] + parity.lr * state[lr] + parity.pm * state[pm] +
                     parity.lr * parity.pm * state[both]);
  }
  return out;
}

JosonParams effective_joson_params(double w, double u, double U) {
  if (u < 0.0) throw std::domain_error("u must be non-negative");
  return {w * (1.0 + u / 4.0) / std::sqrt(1.0 + u / 2.0), U * (1.0 + u / 8.0) / (1.0 + u / 2.0)};
}

JosonParams effective_joson_params(const ModelParams& params) {
  return effective_joson_params(params.w(), params.u(), params.U());
}

}  // namespace dimers
