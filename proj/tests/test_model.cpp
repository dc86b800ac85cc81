#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "dimers/model.hpp"
#include "dimers/model_io.hpp"

using namespace dimers;

namespace {

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("model params validate and derive scaled quantities") {
  const auto p = ModelParams::from_scaled(21, 0.5, 0.082);
  CHECK(p.N() == 21);
  CHECK(p.U() == doctest::Approx(0.5 / 21).epsilon(1e-15));
  CHECK(p.omega() == doctest::Approx(0.082));
  CHECK(p.consistent());
  CHECK(ModelParams::from_physical(10, 2.0, 0.3, 0.1).u() == doctest::Approx(1.5));

  CHECK_THROWS_AS(ModelParams::from_physical(0, 1.0, 0.1, 0.1), std::domain_error);
  CHECK_THROWS_AS(ModelParams::from_physical(3, 0.0, 0.1, 0.1), std::domain_error);
  CHECK_THROWS_AS(ModelParams::from_physical(3, 1.0, -0.1, 0.1), std::domain_error);
  CHECK_THROWS_AS(ModelParams::from_physical(3, 1.0, 0.1, -0.1), std::domain_error);
}

TEST_CASE("basis enumeration counts") {
  CHECK(enumerate_basis(1).size() == 4);
  CHECK(enumerate_basis(21).size() == 2024);
  CHECK(enumerate_basis(29).size() == 4960);
  CHECK_THROWS_AS(enumerate_basis(0), std::domain_error);

  for (int N = 1; N <= 40; ++N) {
    const FockBasis b(N);
    CHECK(b.size() == hilbert_dimension(N));
    std::size_t sum = 0;
    for (int nl = 0; nl <= N; ++nl) {
      const BlockRange& r = b.block(nl);
      CHECK(r.offset == sum);
      CHECK(r.size == static_cast<std::size_t>((nl + 1) * (N - nl + 1)));
      sum += r.size;
    }
    CHECK(sum == b.size());
  }
}

TEST_CASE("basis ordering and index maps") {
  const FockBasis b(7);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const FockState& s = b[i];
    CHECK(s.total() == 7);
    CHECK(b.index_of(s) == i);
    const BlockRange& r = b.block(s.left());
    CHECK(i >= r.offset);
    CHECK(i < r.offset + r.size);
    if (i > 0) {
      const FockState& prev = b[i - 1];
      const auto key = [](const FockState& x) {
        return std::array<int, 3>{x.left(), x.n[kLeftMinus], x.n[kRightMinus]};
      };
      CHECK(key(prev) < key(s));
    }
    // Swaps are involutions.
    CHECK(b.swap_lr(b.swap_lr(i)) == i);
    CHECK(b.swap_pm(b.swap_pm(i)) == i);
    CHECK(b[b.swap_lr(i)].left() == s.right());
  }
  CHECK_THROWS_AS(b.index_of(FockState{{1, 1, 1, 1}}), std::out_of_range);
  CHECK_THROWS_AS(b.block(8), std::out_of_range);
}

TEST_CASE("shell dimensions") {
  CHECK(shell_dimension(21, 11) == 132);
  CHECK(shell_block_dimension(21, 11, 5) == 6);
  CHECK(schmidt_capacity(21) == 132);
  for (int N : {5, 8, 21}) {
    for (int J = 0; J <= N; ++J) {
      std::size_t sum = 0;
      for (int nl = 0; nl <= N; ++nl) sum += shell_block_dimension(N, J, nl);
      CHECK(sum == shell_dimension(N, J));
    }
  }
}

TEST_CASE("single particle Hamiltonian matches the hopping graph") {
  const double w = 0.37;
  const auto p = ModelParams::from_scaled(1, 2.5, w);
  const FockBasis b(1);
  const HamiltonianMatrix H = build_hamiltonian(p, b);

  // Oracle: one particle on the four-site ring L+ - L- - R- - R+ - L+.
  Eigen::Matrix4d graph = Eigen::Matrix4d::Zero();
  auto link = [&](int a, int c, double t) { graph(a, c) = graph(c, a) = t; };
  link(kLeftPlus, kLeftMinus, -0.5);
  link(kRightPlus, kRightMinus, -0.5);
  link(kLeftPlus, kRightPlus, -0.5 * w);
  link(kLeftMinus, kRightMinus, -0.5 * w);

  const auto got = sorted_eigenvalues(Eigen::MatrixXd(H.matrix));
  const auto ref = sorted_eigenvalues(graph);
  const std::vector<double> analytic{-(1 + w) / 2, -(1 - w) / 2, (1 - w) / 2, (1 + w) / 2};
  for (int k = 0; k < 4; ++k) {
    CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-14));
    CHECK(got[k] == doctest::Approx(analytic[k]).epsilon(1e-14));
  }
}

TEST_CASE("Hamiltonian is exactly symmetric and respects n_L blocks at omega=0") {
  const FockBasis b(9);
  const auto H = build_hamiltonian(ModelParams::from_scaled(9, 0.5, 0.082), b);
  const SparseMatrix diff = H.matrix - SparseMatrix(H.matrix.transpose());
  double max_asym = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) max_asym = std::max(max_asym, std::abs(it.value()));
  CHECK(max_asym == 0.0);

  const auto H0 = build_hamiltonian(ModelParams::from_scaled(9, 0.5, 0.0), b);
  for (Eigen::Index k = 0; k < H0.matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(H0.matrix, k); it; ++it)
      CHECK(b[it.row()].left() == b[it.col()].left());

  CHECK_THROWS_AS(build_hamiltonian(ModelParams::from_scaled(8, 0.5, 0.1), b), std::invalid_argument);
}

TEST_CASE("Hamiltonian at N=21 has dimension 2024") {
  const FockBasis b(21);
  const auto H = build_hamiltonian(ModelParams::from_scaled(21, 0.5, 0.082), b);
  CHECK(H.size() == 2024);
  CHECK(H.matrix.rows() == H.matrix.cols());
}

TEST_CASE("dimer Hamiltonian") {
  CHECK(build_dimer_hamiltonian(0, 1.0, 0.3).size() == 1);
  CHECK(build_dimer_hamiltonian(0, 1.0, 0.3)(0, 0) == 0.0);
  const auto e1 = sorted_eigenvalues(build_dimer_hamiltonian(1, 1.7, 0.9));
  CHECK(e1[0] == doctest::Approx(-0.85));
  CHECK(e1[1] == doctest::Approx(0.85));

  // Pure hopping is a spin-n/2 in a field: equally spaced levels Omega (k - n/2).
  for (int n : {2, 5, 12}) {
    const double Omega = 1.3;
    const auto e = sorted_eigenvalues(build_dimer_hamiltonian(n, Omega, 0.0));
    for (int k = 0; k <= n; ++k) CHECK(e[k] == doctest::Approx(Omega * (k - 0.5 * n)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(build_dimer_hamiltonian(-1, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("symmetry sectors") {
  {
    const auto s = symmetry_sectors(FockBasis(1));
    for (const auto& sec : s) CHECK(sec.dimension() == 1);
  }
  for (int N = 1; N <= 10; ++N) {
    const FockBasis b(N);
    const auto sectors = symmetry_sectors(b);
    std::size_t total = 0;
    for (const auto& sec : sectors) {
      total += sec.dimension();
      const Eigen::MatrixXd V(sec.vectors);
      CHECK((V.transpose() * V - Eigen::MatrixXd::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff() < 1e-14);
      for (Eigen::Index c = 0; c < V.cols(); ++c) {
        Eigen::VectorXd lr(V.rows()), pm(V.rows());
        for (std::size_t i = 0; i < b.size(); ++i) {
          lr[i] = V(b.swap_lr(i), c);
          pm[i] = V(b.swap_pm(i), c);
        }
        CHECK((lr - sec.parity.lr * V.col(c)).norm() < 1e-14);
        CHECK((pm - sec.parity.pm * V.col(c)).norm() < 1e-14);
      }
    }
    CHECK(total == b.size());
  }
}

TEST_CASE("sector blocks decouple and reproduce the full spectrum") {
  const int N = 8;
  const FockBasis b(N);
  const auto H = build_hamiltonian(ModelParams::from_scaled(N, 0.7, 0.2), b);
  const auto sectors = symmetry_sectors(b);
  std::vector<double> merged;
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t y = 0; y < 4; ++y) {
      if (x == y) continue;
      const Eigen::MatrixXd cross(SparseMatrix(sectors[x].vectors.transpose() * H.matrix * sectors[y].vectors));
      if (cross.size() > 0) CHECK(cross.cwiseAbs().maxCoeff() <= 1e-12);
    }
    const auto e = sorted_eigenvalues(sector_hamiltonian(H, sectors[x]));
    merged.insert(merged.end(), e.begin(), e.end());
  }
  std::sort(merged.begin(), merged.end());
  const auto full = sorted_eigenvalues(Eigen::MatrixXd(H.matrix));
  const double span = full.back() - full.front();
  REQUIRE(merged.size() == full.size());
  for (std::size_t k = 0; k < full.size(); ++k) CHECK(std::abs(merged[k] - full[k]) <= 1e-10 * span);
}

TEST_CASE("sector projection is idempotent") {
  const FockBasis b(6);
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(b.size(), -1.0, 2.0).array().sin();
  for (Parity p : kSectorParities) {
    const auto once = project_onto_sector(b, v, p);
    const auto twice = project_onto_sector(b, once, p);
    CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("effective joson parameters") {
  auto j = effective_joson_params(0.082, 0.0, 0.3);
  CHECK(j.w_J == doctest::Approx(0.082));
  CHECK(j.U_J == doctest::Approx(0.3));
  j = effective_joson_params(0.082, 0.5, 1.0);
  CHECK(j.w_J == doctest::Approx(0.082 * 1.125 / std::sqrt(1.25)).epsilon(1e-14));
  CHECK(j.w_J == doctest::Approx(0.08251).epsilon(1e-4));
  CHECK(effective_joson_params(0.1, 8.0, 2.0).U_J == doctest::Approx(2.0 * 2.0 / 5.0));
  CHECK_THROWS_AS(effective_joson_params(0.1, -1.0, 1.0), std::domain_error);
}

TEST_CASE("JSON dumps") {
  const FockBasis b(2);
  const auto jb = basis_to_json(b);
  CHECK(jb["dimension"] == 10);
  CHECK(jb["states"][0] == nlohmann::json({0, 0, 2, 0}));
  const auto H = build_hamiltonian(ModelParams::from_scaled(2, 1.0, 0.1), b);
  const auto jh = hamiltonian_to_json(H);
  CHECK(jh["nnz"] == H.matrix.nonZeros());
  CHECK(jh["triplets"].size() == static_cast<std::size_t>(H.matrix.nonZeros()));
}
