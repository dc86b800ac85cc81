#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dimers/entanglement.hpp"
#include "dimers/errors.hpp"
#include "dimers/spectral.hpp"

using namespace dimers;

namespace {

Eigen::VectorXd random_state(std::size_t D, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(D);
  for (auto& x : v) x = g(rng);
  return v.normalized();
}

Eigen::VectorXd fock_vector(const FockBasis& b, std::array<int, 4> n) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
  v[b.index_of(FockState{n})] = 1.0;
  return v;
}

std::vector<double> all_lambda(const EntanglementSpectrum& s) {
  std::vector<double> out;
  for (const auto& b : s.blocks) out.insert(out.end(), b.lambda.begin(), b.lambda.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("Fock product states are unentangled") {
  const FockBasis b(6);
  const auto s = total_entropy(state_entanglement(b, fock_vector(b, {2, 1, 0, 3})));
  CHECK(s.S == 0.0);
  CHECK(s.p[3] == 1.0);
}

TEST_CASE("two-term superpositions give log 2") {
  const FockBasis b(6);
  SUBCASE("same n_L block") {
    const Eigen::VectorXd v = (fock_vector(b, {2, 1, 0, 3}) + fock_vector(b, {1, 2, 3, 0})) / std::sqrt(2.0);
    const auto s = total_entropy(state_entanglement(b, v));
    CHECK(s.S == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(s.S_tilde[3] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("different n_L blocks") {
    const Eigen::VectorXd v = (fock_vector(b, {2, 1, 0, 3}) + fock_vector(b, {5, 0, 1, 0})) / std::sqrt(2.0);
    const auto s = total_entropy(state_entanglement(b, v));
    CHECK(s.S == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(s.S_tilde[3] == 0.0);
    CHECK(s.S_tilde[5] == 0.0);
  }
}

TEST_CASE("block decomposition identities on a random state") {
  const int N = 11;
  const FockBasis b(N);
  const Eigen::VectorXd v = random_state(b.size(), 7);
  const auto spec = state_entanglement(b, v);
  double ptot = 0.0;
  for (const auto& blk : spec.blocks) {
    ptot += blk.p;
    CHECK(blk.S == doctest::Approx(blk.p * blk.S_tilde - blk.p * std::log(blk.p)).epsilon(1e-12));
    for (std::size_t i = 0; i < blk.lambda.size(); ++i) {
      CHECK(blk.xi_tilde[i] == doctest::Approx(blk.xi[i] + std::log(blk.p)).epsilon(1e-12));
      if (i > 0) CHECK(blk.lambda[i] <= blk.lambda[i - 1]);
    }
  }
  CHECK(ptot == doctest::Approx(1.0).epsilon(1e-12));
  const auto s = total_entropy(spec);
  CHECK(s.S <= s.S_max + 1e-12);
  CHECK(purity(spec) <= 1.0);
}

TEST_CASE("eigenvalue and SVD routes agree; left and right spectra coincide") {
  const FockBasis b(10);
  const Eigen::VectorXd v = random_state(b.size(), 99);
  const auto eig = all_lambda(state_entanglement(b, v));
  const auto svd = all_lambda(entanglement_spectrum_svd(b, v));
  const auto right = all_lambda(entanglement_spectrum(reduced_density_blocks_right(b, v)));
  REQUIRE(eig.size() == svd.size());
  REQUIRE(eig.size() == right.size());
  for (std::size_t i = 0; i < eig.size(); ++i) {
    CHECK(std::abs(eig[i] - svd[i]) <= 1e-10);
    CHECK(std::abs(eig[i] - right[i]) <= 1e-10);
  }
}

TEST_CASE("spectrum is invariant under the local change to dimer eigenstates") {
  const int N = 9;
  const FockBasis b(N);
  const UnperturbedBasis ub(ModelParams::from_scaled(N, 0.7, 0.0), b);
  const Eigen::VectorXd v = random_state(b.size(), 3);
  const auto fock = total_entropy(state_entanglement(b, v));
  const auto dimer = total_entropy(state_entanglement(b, ub.coefficients(v)));
  CHECK(fock.S == doctest::Approx(dimer.S).epsilon(1e-11));
  for (int nl = 0; nl <= N; ++nl) CHECK(fock.S_tilde[nl] == doctest::Approx(dimer.S_tilde[nl]).epsilon(1e-10));

  // a dimer-eigenstate product is unentangled in either representation
  CHECK(total_entropy(state_entanglement(b, ub.vector(17))).S <= 1e-12);
}

TEST_CASE("maximal entropy at N=21 is log 132") {
  const FockBasis b(21);
  CHECK(total_entropy(state_entanglement(b, random_state(b.size(), 1))).S_max ==
        doctest::Approx(std::log(132.0)).epsilon(1e-15));
}

TEST_CASE("invalid inputs") {
  const FockBasis b(4);
  CHECK_THROWS_AS(state_entanglement(b, Eigen::VectorXd::Ones(b.size())), std::invalid_argument);
  CHECK_THROWS_AS(state_entanglement(b, Eigen::VectorXd::Ones(3)), std::invalid_argument);

  ReducedDensityBlocks bad;
  bad.N = 1;
  bad.blocks = {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(2, 2)};
  bad.blocks[1](1, 1) = -1e-6;
  bad.weights = {1.0, 1.0 - 1e-6};
  CHECK_THROWS_AS(entanglement_spectrum(bad), NumericError);
}

TEST_CASE("entanglement CSV layout") {
  const FockBasis b(2);
  const Eigen::VectorXd v = random_state(b.size(), 5);
  const auto spec = state_entanglement(b, v);
  std::ostringstream a, c;
  write_spectrum_csv(a, {{4, spec}});
  write_entropy_blocks_csv(c, {{4, total_entropy(spec)}});
  CHECK(a.str().rfind("# schema: entanglement_spectrum v1\nstate,n_L,i,lambda,xi,xi_tilde\n4,0,0,", 0) == 0);
  CHECK(c.str().rfind("# schema: entropy_blocks v1\nstate,n_L,p,S_nL,S_tilde_nL\n4,0,", 0) == 0);
}
