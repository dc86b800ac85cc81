#include "dimers/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "dimers/csv.hpp"
#include "dimers/errors.hpp"
#include "dimers/parallel.hpp"

namespace dimers {

namespace {

constexpr double kDegeneracyTolerance = 1e-12;

// Fix the arbitrary sign of an eigenvector: largest-magnitude entry positive
// (first one on ties), so output does not depend on solver internals.
template <class Vec>
void fix_sign(Vec&& v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best + 1e-12) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0) v = -v;
}

void check_symmetric(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("Hamiltonian is not square");
  double scale = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  const SparseMatrix diff = m - SparseMatrix(m.transpose());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  if (worst > 1e-12 * std::max(1.0, scale)) {
    throw std::invalid_argument("Hamiltonian is not symmetric (max asymmetry " + std::to_string(worst) + ")");
  }
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dense_solve(const Eigen::MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    throw NumericError(std::string("eigensolver did not converge on ") + what + " of dimension " +
                       std::to_string(m.rows()));
  }
  return es;
}

// Modified Gram-Schmidt inside each cluster of (near-)degenerate energies.
void orthogonalize_degenerate(const Eigen::VectorXd& energies, Eigen::MatrixXd& vectors) {
  const Eigen::Index n = energies.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && energies[stop] - energies[stop - 1] <= kDegeneracyTolerance) ++stop;
    for (Eigen::Index a = start + 1; a < stop; ++a) {
      for (Eigen::Index b = start; b < a; ++b) vectors.col(a) -= vectors.col(b).dot(vectors.col(a)) * vectors.col(b);
      vectors.col(a).normalize();
    }
    start = stop;
  }
}

// Sort (energy, secondary key) ascending and permute columns accordingly.
EigenDecomposition assemble(const std::vector<double>& energies, const std::vector<int>& keys,
                            Eigen::MatrixXd&& vectors, std::vector<SectorTag>&& tags) {
  std::vector<std::size_t> order(energies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (energies[a] != energies[b]) return energies[a] < energies[b];
    return keys[a] < keys[b];
  });
  EigenDecomposition out;
  out.energies.resize(static_cast<Eigen::Index>(order.size()));
  out.vectors.resize(vectors.rows(), static_cast<Eigen::Index>(order.size()));
  out.sectors.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.energies[k] = energies[order[k]];
    out.vectors.col(k) = vectors.col(order[k]);
    out.sectors[k] = tags[order[k]];
  }
  orthogonalize_degenerate(out.energies, out.vectors);
  return out;
}

// Within each cluster of degenerate energies, rotate to eigenvectors of a
// commuting observable so that the basis is fixed by more than solver round-off.
void resolve_degeneracies(EigenDecomposition& e, const SparseMatrix& observable, double tolerance) {
  const Eigen::Index n = e.energies.size();
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && e.energies[stop] - e.energies[stop - 1] <= tolerance) ++stop;
    const Eigen::Index m = stop - start;
    if (m > 1) {
      const Eigen::MatrixXd V = e.vectors.middleCols(start, m);
      Eigen::MatrixXd O = V.transpose() * (observable * V);
      O = 0.5 * (O + O.transpose()).eval();
      const auto es = dense_solve(O, "degenerate cluster");
      e.vectors.middleCols(start, m) = V * es.eigenvectors();
      for (Eigen::Index k = start; k < stop; ++k) fix_sign(e.vectors.col(k));
    }
    start = stop;
  }
}

// Left-dimer Hamiltonian plus an incommensurate multiple of n_L; commutes with H at omega = 0.
SparseMatrix left_dimer_label_operator(const ModelParams& params, const FockBasis& basis) {
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const FockState& s = basis[i];
    const int p = s.n[kLeftPlus], m = s.n[kLeftMinus];
    t.emplace_back(i, i, 0.5 * params.U() * (p * (p - 1.0) + m * (m - 1.0)) + std::numbers::pi * s.left());
    if (m > 0) {
      FockState u = s;
      --u.n[kLeftMinus];
      ++u.n[kLeftPlus];
      const std::size_t j = basis.index_of(u);
      const double v = -0.5 * params.Omega() * std::sqrt(m * (p + 1.0));
      t.emplace_back(i, j, v);
      t.emplace_back(j, i, v);
    }
  }
  SparseMatrix O(basis.size(), basis.size());
  O.setFromTriplets(t.begin(), t.end());
  return O;
}

}  // namespace

std::string SectorTag::str() const {
  if (!resolved()) return "na";
  std::string s;
  s += lr > 0 ? '+' : '-';
  s += pm > 0 ? '+' : '-';
  return s;
}

EigenDecomposition diagonalize(const HamiltonianMatrix& H) {
  const SparseMatrix& m = H.matrix;
  check_symmetric(m);
  const Eigen::Index D = m.rows();

  // Connected components of the nonzero pattern (union-find).
  std::vector<Eigen::Index> parent(D);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (it.value() == 0.0) continue;
      const auto a = find(it.row()), b = find(it.col());
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<Eigen::Index>> components;
  std::vector<Eigen::Index> slot(D, -1);
  for (Eigen::Index i = 0; i < D; ++i) {
    const auto r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Eigen::Index>(components.size());
      components.emplace_back();
    }
    components[slot[r]].push_back(i);
  }

  std::vector<double> energies;
  std::vector<int> keys;
  energies.reserve(D);
  Eigen::MatrixXd vectors = Eigen::MatrixXd::Zero(D, D);
  const Eigen::MatrixXd dense(m);
  Eigen::Index column = 0;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& idx = components[c];
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd block(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) block(a, b) = dense(idx[a], idx[b]);
    const auto es = dense_solve(block, "connected component");
    for (Eigen::Index k = 0; k < n; ++k, ++column) {
      energies.push_back(es.eigenvalues()[k]);
      keys.push_back(static_cast<int>(c));
      for (Eigen::Index a = 0; a < n; ++a) vectors(idx[a], column) = es.eigenvectors()(a, k);
      fix_sign(vectors.col(column));
    }
  }
  return assemble(energies, keys, std::move(vectors), std::vector<SectorTag>(energies.size()));
}

EigenDecomposition diagonalize_sectors(const HamiltonianMatrix& H, const std::array<SymmetrySector, 4>& sectors) {
  check_symmetric(H.matrix);
  const auto D = static_cast<Eigen::Index>(H.size());
  std::size_t total = 0;
  for (const auto& s : sectors) total += s.dimension();
  if (total != H.size()) throw std::invalid_argument("symmetry sectors do not span the Hamiltonian space");

  std::array<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>, 4> solved;
  parallel_for(4, [&](std::size_t k) {
    if (sectors[k].dimension() > 0) solved[k] = dense_solve(sector_hamiltonian(H, sectors[k]), "symmetry sector");
  });

  std::vector<double> energies;
  std::vector<int> keys;
  std::vector<SectorTag> tags;
  Eigen::MatrixXd vectors(D, D);
  Eigen::Index column = 0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (sectors[k].dimension() == 0) continue;
    const Eigen::MatrixXd full = sectors[k].vectors * solved[k].eigenvectors();
    for (Eigen::Index c = 0; c < full.cols(); ++c, ++column) {
      energies.push_back(solved[k].eigenvalues()[c]);
      keys.push_back(static_cast<int>(k));
      tags.push_back({sectors[k].parity.lr, sectors[k].parity.pm});
      vectors.col(column) = full.col(c);
      fix_sign(vectors.col(column));
    }
  }
  return assemble(energies, keys, std::move(vectors), std::move(tags));
}

EigenDecomposition solve_exact(const ModelParams& params, const FockBasis& basis) {
  const HamiltonianMatrix H = build_hamiltonian(params, basis);
  // At omega = 0 the sectors mix degenerate L/R product states; the n_L blocks
  // give the product eigenbasis directly.
  if (params.omega() == 0.0) {
    EigenDecomposition e = diagonalize(H);
    resolve_degeneracies(e, left_dimer_label_operator(params, basis), 1e-10);
    return e;
  }
  return diagonalize_sectors(H, symmetry_sectors(basis));
}

bool UnperturbedLabel::valid() const {
  if (N < 0 || J < 0 || J > N) return false;
  if ((N + n) % 2 != 0 || (J + j) % 2 != 0) return false;
  const int nl = n_left(), nr = n_right(), jl = j_left(), jr = j_right();
  return nl >= 0 && nr >= 0 && jl >= 0 && jr >= 0 && jl <= nl && jr <= nr;
}

UnperturbedBasis::UnperturbedBasis(const ModelParams& params, const FockBasis& basis)
    : N_(basis.N()), basis_(&basis) {
  if (params.N() != basis.N()) throw std::invalid_argument("parameters and basis have different N");
  dimers_.resize(N_ + 1);
  for (int n = 0; n <= N_; ++n) {
    const auto es = dense_solve(build_dimer_hamiltonian(n, params.Omega(), params.U()), "dimer Hamiltonian");
    dimers_[n].energies = es.eigenvalues();
    dimers_[n].vectors = es.eigenvectors();
    for (int k = 0; k <= n; ++k) fix_sign(dimers_[n].vectors.col(k));
  }

  labels_.reserve(basis.size());
  energies_.resize(static_cast<Eigen::Index>(basis.size()));
  for (int nl = 0; nl <= N_; ++nl) {
    const int nr = N_ - nl;
    const BlockRange& b = basis.block(nl);
    for (int jl = 0; jl <= nl; ++jl) {
      for (int jr = 0; jr <= nr; ++jr) {
        const std::size_t i = b.offset + static_cast<std::size_t>(jl) * b.d_right + jr;
        labels_.push_back({N_, jl + jr, nl - nr, jl - jr});
        energies_[static_cast<Eigen::Index>(i)] = dimers_[nl].energies[jl] + dimers_[nr].energies[jr];
      }
    }
  }
}

Eigen::VectorXd UnperturbedBasis::coefficients(const Eigen::VectorXd& fock_state) const {
  if (static_cast<std::size_t>(fock_state.size()) != size()) {
    throw std::invalid_argument("state dimension does not match the unperturbed basis");
  }
  Eigen::VectorXd out(fock_state.size());
  for (int nl = 0; nl <= N_; ++nl) {
    const BlockRange& b = basis_->block(nl);
    const Eigen::Map<const RowMatrix> C(fock_state.data() + b.offset, b.d_left, b.d_right);
    Eigen::Map<RowMatrix> T(out.data() + b.offset, b.d_left, b.d_right);
    T.noalias() = dimers_[nl].vectors.transpose() * C * dimers_[N_ - nl].vectors;
  }
  return out;
}

Eigen::VectorXd UnperturbedBasis::vector(std::size_t mu) const {
  const UnperturbedLabel& l = labels_.at(mu);
  const int nl = l.n_left(), nr = l.n_right();
  const BlockRange& b = basis_->block(nl);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  Eigen::Map<RowMatrix> T(out.data() + b.offset, b.d_left, b.d_right);
  T.noalias() = dimers_[nl].vectors.col(l.j_left()) * dimers_[nr].vectors.col(l.j_right()).transpose();
  return out;
}

UnperturbedBasis build_unperturbed_basis(const ModelParams& params, const FockBasis& basis) {
  return UnperturbedBasis(params, basis);
}

RowMatrix overlap_probabilities(const EigenDecomposition& exact, const UnperturbedBasis& unperturbed) {
  if (static_cast<std::size_t>(exact.vectors.rows()) != unperturbed.size()) {
    throw std::invalid_argument("exact eigenvectors and unperturbed basis have different dimensions");
  }
  const auto D = static_cast<Eigen::Index>(exact.size());
  RowMatrix p(D, unperturbed.size());
  parallel_for(static_cast<std::size_t>(D), [&](std::size_t nu) {
    const Eigen::VectorXd c = unperturbed.coefficients(exact.vectors.col(static_cast<Eigen::Index>(nu)));
    p.row(static_cast<Eigen::Index>(nu)) = c.array().square().matrix().transpose();
  });
  return p;
}

double participation_number(std::span<const double> probabilities) {
  double sum = 0.0, sum2 = 0.0;
  for (double x : probabilities) {
    sum += x;
    sum2 += x * x;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("probabilities not normalized (sum " + std::to_string(sum) + ")");
  }
  return 1.0 / sum2;
}

double shannon_entropy(std::span<const double> state) {
  double norm2 = 0.0, h = 0.0;
  for (double c : state) {
    const double p = c * c;
    norm2 += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(norm2 - 1.0) > 1e-6) {
    throw std::invalid_argument("state not normalized (norm^2 " + std::to_string(norm2) + ")");
  }
  return h;
}

double goe_shannon_reference(std::size_t D) { return std::log(0.48 * static_cast<double>(D)); }

ImbalanceObservables imbalance_observables(const Eigen::VectorXd& state, std::span<const double> overlaps,
                                           const FockBasis& basis, const UnperturbedBasis& unperturbed) {
  if (static_cast<std::size_t>(state.size()) != basis.size() || overlaps.size() != unperturbed.size()) {
    throw std::invalid_argument("state or overlaps do not match the basis dimension");
  }
  ImbalanceObservables o;
  double n2 = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double p = state[static_cast<Eigen::Index>(i)] * state[static_cast<Eigen::Index>(i)];
    const double n = basis[i].imbalance();
    o.mean_n += p * n;
    n2 += p * n * n;
  }
  o.sigma_n = std::sqrt(n2);
  double j2 = 0.0;
  for (std::size_t mu = 0; mu < overlaps.size(); ++mu) {
    const UnperturbedLabel& l = unperturbed.labels()[mu];
    o.mean_J += overlaps[mu] * l.J;
    j2 += overlaps[mu] * l.j * l.j;
  }
  o.sigma_j = std::sqrt(j2);
  o.shell = static_cast<int>(std::lround(o.mean_J));
  o.ambiguous = std::abs(o.mean_J - o.shell) > 0.25;
  return o;
}

JointDistribution joint_distribution(std::span<const double> overlaps, const UnperturbedBasis& unperturbed, int J) {
  if (overlaps.size() != unperturbed.size()) throw std::invalid_argument("overlap row has wrong length");
  if (J < 0 || J > unperturbed.N()) throw std::invalid_argument("shell J outside [0, N]");
  JointDistribution d;
  d.J = J;
  double total = 0.0;
  for (std::size_t mu = 0; mu < overlaps.size(); ++mu) {
    total += overlaps[mu];
    const UnperturbedLabel& l = unperturbed.labels()[mu];
    if (l.J != J) continue;
    d.entries.push_back({l.n, l.j, overlaps[mu]});
    d.in_shell += overlaps[mu];
  }
  d.leakage = std::max(0.0, total - d.in_shell);
  d.leaky = d.leakage > 1e-3;
  return d;
}

std::vector<EigenstateRow> eigenstate_table(const EigenDecomposition& exact, const RowMatrix& overlaps,
                                            const FockBasis& basis, const UnperturbedBasis& unperturbed) {
  std::vector<EigenstateRow> rows(exact.size());
  parallel_for(rows.size(), [&](std::size_t nu) {
    const auto k = static_cast<Eigen::Index>(nu);
    const Eigen::VectorXd v = exact.vectors.col(k);
    const std::span<const double> p(overlaps.row(k).data(), static_cast<std::size_t>(overlaps.cols()));
    EigenstateRow& r = rows[nu];
    r.index = nu;
    r.sector = exact.sectors[nu];
    r.energy = exact.energies[k];
    r.pn = participation_number(p);
    r.shannon = shannon_entropy(v);
    r.imbalance = imbalance_observables(v, p, basis, unperturbed);
  });
  return rows;
}

std::vector<UnperturbedRow> unperturbed_table(const UnperturbedBasis& unperturbed, const RowMatrix& overlaps) {
  std::vector<UnperturbedRow> rows(unperturbed.size());
  parallel_for(rows.size(), [&](std::size_t mu) {
    const Eigen::VectorXd column = overlaps.col(static_cast<Eigen::Index>(mu));
    UnperturbedRow& r = rows[mu];
    r.index = mu;
    r.label = unperturbed.labels()[mu];
    r.energy = unperturbed.energies()[static_cast<Eigen::Index>(mu)];
    r.pn = participation_number(std::span<const double>(column.data(), static_cast<std::size_t>(column.size())));
    r.shannon = shannon_entropy(unperturbed.vector(mu));
  });
  return rows;
}

void write_eigenstate_csv(std::ostream& os, const std::vector<EigenstateRow>& rows) {
  CsvWriter w(os, "eigenstates", 1,
              {"index", "sector", "energy", "pn", "shannon", "mean_n", "sigma_n", "sigma_j", "mean_J", "shell",
               "ambiguous"});
  for (const auto& r : rows) {
    w << r.index << r.sector.str() << r.energy << r.pn << r.shannon << r.imbalance.mean_n << r.imbalance.sigma_n
      << r.imbalance.sigma_j << r.imbalance.mean_J << r.imbalance.shell << r.imbalance.ambiguous;
    w.end_row();
  }
}

void write_unperturbed_csv(std::ostream& os, const std::vector<UnperturbedRow>& rows) {
  CsvWriter w(os, "unperturbed", 1, {"index", "N", "J", "n", "j", "energy", "pn", "shannon"});
  for (const auto& r : rows) {
    w << r.index << r.label.N << r.label.J << r.label.n << r.label.j << r.energy << r.pn << r.shannon;
    w.end_row();
  }
}

void write_joint_csv(std::ostream& os, const JointDistribution& dist, std::size_t state_index) {
  CsvWriter w(os, "joint_nj", 1, {"state", "J", "n", "j", "p"});
  for (const auto& e : dist.entries) {
    w << state_index << dist.J << e.n << e.j << e.p;
    w.end_row();
  }
  os << "# in_shell " << format_double(dist.in_shell) << " leakage " << format_double(dist.leakage)
     << (dist.leaky ? " WARNING leakage above 1e-3" : "") << '\n';
}

}  // namespace dimers
