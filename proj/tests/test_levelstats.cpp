#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dimers/levelstats.hpp"
#include "dimers/parallel.hpp"

using namespace dimers;

namespace {

std::vector<double> poisson_levels(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> e{0.0};
  for (std::size_t k = 1; k < n; ++k) e.push_back(e.back() + ex(rng));
  return e;
}

}  // namespace

TEST_CASE("equally spaced ladder") {
  std::vector<double> e;
  for (int k = 0; k < 200; ++k) e.push_back(-3.0 + 0.25 * k);
  const auto u = unfold(e);
  CHECK(u.spacings.size() == 200 - 2 * 4 - 1);
  for (double s : u.spacings) CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  const auto g = gap_ratio(e);
  CHECK(g.values.size() == 198);
  CHECK(g.skipped == 0);
  for (double r : g.values) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unfolding is scale invariant") {
  auto e = poisson_levels(500, 11);
  const auto a = unfold(e);
  for (auto& x : e) x *= 7.3;
  const auto b = unfold(e);
  REQUIRE(a.spacings.size() == b.spacings.size());
  for (std::size_t k = 0; k < a.spacings.size(); ++k) CHECK(std::abs(a.spacings[k] - b.spacings[k]) <= 1e-10);
}

TEST_CASE("Poisson levels: unfolded mean, histogram, Brody and gap ratio") {
  const auto e = poisson_levels(10000, 5);
  const auto u = unfold(e);
  CHECK(u.mean_spacing() >= 0.98);
  CHECK(u.mean_spacing() <= 1.02);
  for (double s : u.spacings) CHECK(s >= 0.0);

  const auto h = spacing_histogram(u.spacings, 20, 4.0);
  double integral = 0.0;
  for (std::size_t b = 0; b < h.density.size(); ++b) integral += h.density[b] * (h.edges[b + 1] - h.edges[b]);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t b = 0; b < 8; ++b) {
    const double mid = 0.5 * (h.edges[b] + h.edges[b + 1]);
    CHECK(std::abs(h.density[b] - std::exp(-mid)) <= 0.08);
  }

  const auto fit = brody_fit(u.spacings, 0);
  CHECK(std::abs(fit.beta) < 0.05);

  const auto g = gap_ratio(poisson_levels(100000, 6));
  CHECK(std::abs(g.mean() - kPoissonGapRatio) <= 0.01);
}

TEST_CASE("Wigner samples fit beta near 1") {
  const auto s = sample_brody(1.0, 10000, 3);
  CHECK(brody_fit(s, 0).beta > 0.9);
}

TEST_CASE("Brody bootstrap intervals cover the generating parameter") {
  // a 95% interval misses about one draw in twenty; more than 4 misses out of
  // 20 has probability below 0.3%
  set_thread_count(4);
  int misses = 0;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto fit = brody_fit(sample_brody(0.3, 10000, seed), 100, seed);
    CHECK(fit.ci_low <= fit.beta);
    CHECK(fit.beta <= fit.ci_high);
    if (fit.ci_low > 0.3 || fit.ci_high < 0.3) ++misses;
  }
  set_thread_count(1);
  CHECK(misses <= 4);
  CHECK(brody_fit(sample_brody(0.3, 100, 1)).resamples == 200);
  CHECK_THROWS_AS(brody_fit({1.0, 0.0, 2.0}), std::invalid_argument);
}

TEST_CASE("3x3 GOE matrices give the GOE gap ratio") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  double sum = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) = g(rng);
    const Eigen::Matrix3d h = a + a.transpose();
    const Eigen::Vector3d e = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(h, Eigen::EigenvaluesOnly).eigenvalues();
    sum += gap_ratio({e[0], e[1], e[2]}).values.at(0);
  }
  CHECK(std::abs(sum / n - kGoeGapRatio) <= 0.01);
}

TEST_CASE("reference curves") {
  CHECK(poisson_density(0.0) == 1.0);
  CHECK(wigner_density(0.0) == 0.0);
  const double mode = std::sqrt(2.0 / std::numbers::pi);
  CHECK(wigner_density(mode) > wigner_density(mode - 1e-3));
  CHECK(wigner_density(mode) > wigner_density(mode + 1e-3));
  std::vector<double> grid;
  for (int k = 0; k <= 20000; ++k) grid.push_back(k * 1e-3);
  const auto r = reference_curves(grid);
  double ip = 0.0, iw = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    ip += 0.5e-3 * (r.poisson[k] + r.poisson[k - 1]);
    iw += 0.5e-3 * (r.wigner[k] + r.wigner[k - 1]);
  }
  CHECK(ip == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(iw == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(brody_density(0.7, 0.0) == doctest::Approx(poisson_density(0.7)).epsilon(1e-14));
  CHECK(brody_density(0.7, 1.0) == doctest::Approx(wigner_density(0.7)).epsilon(1e-14));
}

TEST_CASE("degeneracies and input checks") {
  const auto g = gap_ratio({0.0, 1.0, 1.0, 2.5, 3.0, 4.2});
  CHECK(g.skipped == 2);
  CHECK(g.values.size() == 2);
  CHECK_THROWS_AS(gap_ratio({0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(unfold(std::vector<double>(19, 1.0)), std::invalid_argument);
}

TEST_CASE("sector pipeline on a small coupled system") {
  const int N = 14;
  const FockBasis b(N);
  const auto exact = solve_exact(ModelParams::from_scaled(N, 0.5, 0.082), b);
  LevelOptions opt;
  opt.bootstrap = 20;
  const auto st = analyze_levels(exact, opt);
  REQUIRE(st.sectors.size() == 4);
  CHECK(st.sectors[0].sector.str() == "++");
  std::size_t levels = 0;
  for (const auto& s : st.sectors) {
    levels += s.unfolded.energies.size();
    CHECK(s.unfolded.mean_spacing() >= 0.98);
    CHECK(s.unfolded.mean_spacing() <= 1.02);
  }
  CHECK(levels == b.size());
  CHECK(st.pooled_ratio.mean() > 0.3);
  CHECK(st.pooled_ratio.mean() < 0.6);

  EigenDecomposition mixed = exact;
  mixed.sectors.assign(exact.size(), SectorTag{});
  CHECK_THROWS_AS(analyze_levels(mixed, opt), std::invalid_argument);

  std::ostringstream os;
  write_histogram_csv(os, st.histogram);
  CHECK(os.str().rfind("# schema: spacing_histogram v1\ns_lo,s_hi,density,poisson,wigner\n0,0.1,", 0) == 0);
}
