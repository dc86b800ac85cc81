// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "dimers/app/commands.hpp"
#include "dimers/classical.hpp"
#include "dimers/ensembles.hpp"
#include "dimers/entanglement.hpp"
#include "dimers/levelstats.hpp"
#include "dimers/spectral.hpp"

using namespace dimers;

namespace {

constexpr int kN = 21;
constexpr double kU = 0.5;
constexpr double kW = 0.082;
constexpr std::uint64_t kSeed = 12345;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string timing = std::to_string(secs) + " s";
  if (limit_s > 0) {
    timing += " (limit " + std::to_string(static_cast<int>(limit_s)) + " s)";
    if (secs >= limit_s) o.pass = false;
  }
  if (!o.pass) ++failures;
  std::printf("CRITERION %d %s | %s | %s | %s\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str(),
              timing.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, x);
  return buf;
}

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = 0.5 * static_cast<double>(i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / ra.size();
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / rb.size();
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// all eigenvalues of the blocks, sorted, no cutoff
std::vector<double> block_eigenvalues(const ReducedDensityBlocks& b) {
  const auto s = entanglement_spectrum(b, -1.0);
  std::vector<double> out;
  for (const auto& blk : s.blocks) out.insert(out.end(), blk.lambda.begin(), blk.lambda.end());
  std::sort(out.begin(), out.end());
  return out;
}

// worst violation of the entanglement identities for one state
double identity_error(const FockBasis& basis, const Eigen::VectorXd& v) {
  const auto left = reduced_density_blocks(basis, v);
  const auto spec = entanglement_spectrum(left);
  const auto tot = total_entropy(spec);
  double err = std::abs(std::accumulate(tot.p.begin(), tot.p.end(), 0.0) - 1.0);
  err = std::max(err, std::abs(std::accumulate(tot.S_block.begin(), tot.S_block.end(), 0.0) - tot.S));
  for (const auto& b : spec.blocks) {
    const double rhs = b.p > 0 ? b.p * b.S_tilde - b.p * std::log(b.p) : 0.0;
    err = std::max(err, std::abs(b.S - rhs));
  }
  auto l = block_eigenvalues(left);
  auto r = block_eigenvalues(reduced_density_blocks_right(basis, v));
  // blocks of different size differ only by zeros
  while (l.size() < r.size()) l.insert(l.begin(), 0.0);
  while (r.size() < l.size()) r.insert(r.begin(), 0.0);
  for (std::size_t i = 0; i < l.size(); ++i) err = std::max(err, std::abs(l[i] - r[i]));
  return err;
}

}  // namespace

int main() {
  std::printf("acceptance: N=%d u=%g w=%g seed=%llu\n", kN, kU, kW, static_cast<unsigned long long>(kSeed));

  criterion(1, "dimension identities", 1.0, [] {
    const FockBasis b(kN);
    bool ok = b.size() == 2024 && hilbert_dimension(kN) == 2024;
    std::size_t sum = 0;
    for (int nl = 0; nl <= kN; ++nl) sum += static_cast<std::size_t>((nl + 1) * (kN - nl + 1));
    ok = ok && sum == b.size();

    const UnperturbedBasis ub(ModelParams::from_scaled(kN, kU, 0.0), b);
    std::vector<std::vector<std::size_t>> count(kN + 1, std::vector<std::size_t>(kN + 1, 0));
    for (const auto& l : ub.labels()) ++count[l.J][l.n_left()];
    std::size_t checked = 0, literal = 0;
    for (int J = 0; J <= kN; ++J) {
      std::size_t shell = 0;
      for (int nl = 0; nl <= kN; ++nl) {
        shell += count[J][nl];
        ok = ok && count[J][nl] == shell_block_dimension(kN, J, nl);
        ++checked;
        if (2 * J <= kN) {
          const std::size_t eq = nl <= J ? nl + 1 : (nl < kN - J ? J + 1 : kN - nl + 1);
          ok = ok && count[J][nl] == eq;
          ++literal;
        }
      }
      ok = ok && shell == static_cast<std::size_t>((J + 1) * (kN + 1 - J)) && shell == shell_dimension(kN, J);
    }
    return Outcome{ok, "D=" + std::to_string(b.size()) + ", block sum=" + std::to_string(sum) + ", " +
                           std::to_string(checked) + " (J,n_L) counts vs enumeration, " + std::to_string(literal) +
                           " vs the piecewise formula (J<=N/2)"};
  });

  criterion(2, "unperturbed-limit equivalence at w=0", 30.0, [] {
    const FockBasis b(kN);
    const auto p = ModelParams::from_scaled(kN, kU, 0.0);
    const auto exact = solve_exact(p, b);
    const UnperturbedBasis ub(p, b);
    std::vector<double> e0(ub.energies().data(), ub.energies().data() + ub.size());
    std::sort(e0.begin(), e0.end());
    double de = 0.0;
    for (std::size_t k = 0; k < e0.size(); ++k) de = std::max(de, std::abs(exact.energies[k] - e0[k]));
    const RowMatrix P = overlap_probabilities(exact, ub);
    double dpn = 0.0;
    for (Eigen::Index k = 0; k < P.rows(); ++k)
      dpn = std::max(dpn, std::abs(participation_number({P.row(k).data(), static_cast<std::size_t>(P.cols())}) - 1));
    return Outcome{de <= 1e-10 && dpn <= 1e-9,
                   "max |E_exact - E_product|=" + fmt("%.2e", de) + " (<=1e-10), max |PN-1|=" + fmt("%.2e", dpn)};
  });

  // shared N=21, w=0.082 data for criteria 3, 7, 8, 9
  const auto t0 = std::chrono::steady_clock::now();
  const auto params = ModelParams::from_scaled(kN, kU, kW);
  const app::SpectralData data(params, solve_exact(params, FockBasis(kN)));
  std::vector<EntropySummary> entropies(data.exact.size());
  for (std::size_t k = 0; k < data.exact.size(); ++k)
    entropies[k] = total_entropy(state_entanglement(data.basis, data.exact.vectors.col(k)));
  std::printf("shared spectrum at w=%g: %.2f s\n", kW,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  criterion(3, "entanglement identities", 0.0, [&] {
    double worst_random = 0.0, worst_eigen = 0.0, worst_product = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
      const auto r = sample_canonical_random_state(data.basis, kSeed, i, false);
      worst_random = std::max(worst_random, identity_error(data.basis, r.state));
    }
    for (std::size_t k = 0; k < data.exact.size(); ++k)
      worst_eigen = std::max(worst_eigen, identity_error(data.basis, data.exact.vectors.col(k)));
    for (std::size_t mu = 0; mu < data.basis.size(); ++mu) {
      Eigen::VectorXd fock = Eigen::VectorXd::Zero(data.basis.size());
      fock[mu] = 1.0;
      worst_product = std::max(worst_product, total_entropy(state_entanglement(data.basis, fock)).S);
      worst_product =
          std::max(worst_product, total_entropy(state_entanglement(data.basis, data.unperturbed.vector(mu))).S);
    }
    const bool ok = worst_random <= 1e-9 && worst_eigen <= 1e-9 && worst_product <= 1e-9;
    return Outcome{ok, "200 random states err=" + fmt("%.2e", worst_random) + ", 2024 eigenstates err=" +
                           fmt("%.2e", worst_eigen) + ", product states max S=" + fmt("%.2e", worst_product) +
                           " (all <=1e-9)"};
  });

  criterion(4, "Page/GOE law, N=29, 1000 symmetrized states", 600.0, [] {
    const int N = 29;
    const FockBasis b(N);
    EnsembleOptions opt;
    opt.samples = 1000;
    opt.seed = kSeed;
    opt.symmetrize = true;
    const auto st = ensemble_statistics(random_state_ensemble(b, opt).entropies);
    const auto goe = goe_prediction(N);
    double worst_p = 0.0, worst_S = 0.0;
    int worst_nl = -1;
    for (int nl = 0; nl <= N; ++nl) {
      worst_p = std::max(worst_p, std::abs(st.mean_p[nl] - goe.p[nl]) / st.standard_error_p(nl));
      const double zS = std::abs(st.mean_S[nl] - goe.S[nl]) / st.standard_error_S(nl);
      if (zS > worst_S) {
        worst_S = zS;
        worst_nl = nl;
      }
    }
    const double signed_S = (st.mean_S[worst_nl] - goe.S[worst_nl]) / st.standard_error_S(worst_nl);
    return Outcome{worst_p <= 3.0 && worst_S <= 3.0,
                   "max |mean p - p_erg|/SE=" + fmt("%.2f", worst_p) + ", max |mean S - S_GOE|/SE=" +
                       fmt("%.2f", worst_S) + " at n_L=" + std::to_string(worst_nl) + " (signed " +
                       fmt("%+.2f", signed_S) + ", limit 3)"};
  });

  criterion(5, "elliptic action vs phase-space area", 60.0, [] {
    const double pi = std::numbers::pi;
    double worst = 0.0, worst_limit = 0.0;
    for (double u : {0.1, 0.3, 0.5, 0.8, 1.0})
      for (double k : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        const double n = 10.0, E = 0.5 * n * std::sin(k * pi / 2);
        worst = std::max(worst, std::abs(semiclassical_action(n, E, u) - action_oracle(n, E, u)));
      }
    for (double k : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
      const double n = 10.0, eta = k * pi / 2;
      worst_limit =
          std::max(worst_limit, std::abs(semiclassical_action(n, 0.5 * n * std::sin(eta), 1e-8) -
                                         0.5 * n * (1 + std::sin(eta))));
    }
    return Outcome{worst <= 1e-6 && worst_limit <= 1e-6,
                   "25-point grid max diff=" + fmt("%.2e", worst) + ", u=1e-8 limit max diff=" +
                       fmt("%.2e", worst_limit) + " (<=1e-6)"};
  });

  criterion(6, "classical conservation over t=1e4", 0.0, [] {
    IntegratorOptions opt;
    opt.t_max = 1e4;
    opt.dt_out = 1.0;
    opt.tolerance = 1e-8;
    const auto p = ModelParams::from_scaled(kN, kU, kW);
    LaunchSpec symmetric{11, 0, 0, 0};
    LaunchSpec trapped{11, 18.2, 9.3, 0};
    trapped.phi_right = std::numbers::pi;
    double drift = 0.0;
    for (const auto& l : {symmetric, trapped}) {
      const auto t = integrate(init_from_actions(p, l), p, opt);
      drift = std::max({drift, t.energy_drift, t.norm_drift});
    }
    const auto p0 = ModelParams::from_scaled(kN, kU, 0.0);
    const auto control = trajectory_observables(integrate(init_from_actions(p0, trapped), p0, opt), p0);
    double dJ0 = 0.0;
    for (const auto& o : control) dJ0 = std::max(dJ0, std::abs(o.J - control.front().J) / control.front().J);
    const auto band = trajectory_observables(integrate(init_from_actions(p, symmetric), p, opt), p);
    double lo = band.front().J, hi = band.front().J;
    for (const auto& o : band) {
      lo = std::min(lo, o.J);
      hi = std::max(hi, o.J);
    }
    const double dev = std::max(std::abs(lo - 11), std::abs(hi - 11));
    return Outcome{drift <= 1e-8 && dJ0 <= 1e-8 && dev < 1.0,
                   "max relative E/norm drift=" + fmt("%.2e", drift) + " (<=1e-8), w=0 max |dJ|/J=" +
                       fmt("%.2e", dJ0) + " (<=1e-8), w=0.082 J band [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) +
                       "] (|J-11|<1)"};
  });

  criterion(7, "chaos diagnostics across w", 300.0, [&] {
    LevelOptions opt;
    opt.seed = kSeed;
    const FockBasis b(kN);
    double r[3], beta[3];
    const double ws[3] = {0.01, kW, 0.5};
    for (int i = 0; i < 3; ++i) {
      const auto st = i == 1 ? analyze_levels(data.exact, opt)
                             : analyze_levels(solve_exact(ModelParams::from_scaled(kN, kU, ws[i]), b), opt);
      r[i] = st.pooled_ratio.mean();
      beta[i] = st.brody.beta;
    }
    const bool ok = std::abs(r[0] - kPoissonGapRatio) <= 0.03 && r[1] > 0.47 && beta[1] > beta[0] && beta[1] > beta[2];
    return Outcome{ok, "<r>=" + fmt("%.4f", r[0]) + "/" + fmt("%.4f", r[1]) + "/" + fmt("%.4f", r[2]) +
                           " at w=0.01/0.082/0.5 (|r(0.01)-0.3863|<=0.03, r(0.082)>0.47), beta=" +
                           fmt("%.3f", beta[0]) + "/" + fmt("%.3f", beta[1]) + "/" + fmt("%.3f", beta[2])};
  });

  criterion(8, "GGE structure, K=100, J=11", 300.0, [&] {
    const auto region = chaotic_region(11, ChaosMethod::top_k_shannon, 100, data.rows, data.overlaps, data.unperturbed);
    const auto gge = gge_prediction(kN, 11, region.counts);
    std::vector<EntropySummary> chosen;
    for (std::size_t k : region.exact_states) chosen.push_back(entropies[k]);
    const auto st = ensemble_statistics(chosen);
    double mean_dev = 0.0, max_dev = 0.0;
    for (int nl = 0; nl <= kN; ++nl) {
      const double d = st.mean_S[nl] - gge.S[nl];
      mean_dev += d / (kN + 1);
      max_dev = std::max(max_dev, std::abs(d));
    }
    const bool exact_total = gge.S_total == std::log(100.0) - 0.5;
    const bool ok = region.D_ch == 100 && exact_total && mean_dev < 0 && max_dev < 0.15 * gge.S_total;
    return Outcome{ok, "D_ch=" + std::to_string(region.D_ch) + ", S_GGE=" + fmt("%.6f", gge.S_total) +
                           (exact_total ? " (=log100-1/2)" : " (!=log100-1/2)") + ", mean signed dev=" +
                           fmt("%+.4f", mean_dev) + " (<0), max |dev|=" + fmt("%.4f", max_dev) + " = " +
                           fmt("%.1f", 100 * max_dev / gge.S_total) + "% of S_GGE (<15%)"};
  });

  criterion(9, "chaos-entanglement correlation", 0.0, [&] {
    std::vector<double> H, S;
    for (std::size_t k = 0; k < data.rows.size(); ++k) {
      H.push_back(data.rows[k].shannon);
      S.push_back(entropies[k].S);
    }
    const double rho = spearman(H, S);
    // island doublet: the two states of the J=11 shell with the largest sigma_n
    std::vector<std::size_t> shell;
    for (std::size_t k = 0; k < data.rows.size(); ++k)
      if (data.rows[k].imbalance.shell == 11) shell.push_back(k);
    std::partial_sort(shell.begin(), shell.begin() + 2, shell.end(), [&](std::size_t a, std::size_t b) {
      return data.rows[a].imbalance.sigma_n > data.rows[b].imbalance.sigma_n;
    });
    const double half = 0.5 * ergodic_prediction(kN).S_total;
    const double s1 = entropies[shell[0]].S, s2 = entropies[shell[1]].S;
    const bool ok = rho > 0.8 && s1 < half && s2 < half;
    return Outcome{ok, "Spearman(H,S)=" + fmt("%.3f", rho) + " (>0.8), cat doublet S=" + fmt("%.3f", s1) + ", " +
                           fmt("%.3f", s2) + " (<S_erg/2=" + fmt("%.3f", half) + ")"};
  });

  criterion(10, "Brody fit self-test", 60.0, [] {
    const double betas[4] = {0.0, 0.3, 0.7, 1.0};
    bool ok = true;
    std::string detail;
    for (int k = 0; k < 4; ++k) {
      const auto fit = brody_fit(sample_brody(betas[k], 10000, kSeed + k), 200, kSeed);
      const bool in = fit.ci_low <= betas[k] && betas[k] <= fit.ci_high;
      ok = ok && in;
      detail += (k ? ", " : "") + fmt("%.1f", betas[k]) + "->" + fmt("%.3f", fit.beta) + " [" +
                fmt("%.3f", fit.ci_low) + "," + fmt("%.3f", fit.ci_high) + "]" + (in ? "" : " MISS");
    }
    return Outcome{ok, detail};
  });

  std::printf("acceptance: %d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
