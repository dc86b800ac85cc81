#include "dimers/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "dimers/csv.hpp"
#include "dimers/parallel.hpp"
#include "dimers/random.hpp"

namespace dimers {

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::ergodic: return "ergodic";
    case EnsembleKind::goe: return "goe";
    case EnsembleKind::gge: return "gge";
  }
  return "?";
}

std::string to_string(ChaosMethod method) {
  return method == ChaosMethod::top_k_shannon ? "topK_shannon" : "pn_threshold";
}

ChaosMethod parse_chaos_method(const std::string& name) {
  if (name == "topK_shannon" || name == "topk") return ChaosMethod::top_k_shannon;
  if (name == "pn_threshold" || name == "pn") return ChaosMethod::pn_threshold;
  throw std::invalid_argument("unknown chaotic-region method '" + name + "'");
}

EnsemblePrediction ergodic_prediction(int N) {
  if (N < 1) throw std::invalid_argument("ergodic_prediction needs N >= 1");
  EnsemblePrediction e;
  e.kind = EnsembleKind::ergodic;
  e.N = N;
  const double D = static_cast<double>(hilbert_dimension(N));
  for (int nl = 0; nl <= N; ++nl) {
    const double p = static_cast<double>(block_dimension(N, nl)) / D;
    const double d = std::min(nl, N - nl) + 1;
    e.p.push_back(p);
    e.S.push_back(-p * std::log(p / d));
    e.S_tilde.push_back(std::log(d));
    e.S_total += e.S.back();
  }
  e.S_max = std::log(static_cast<double>(schmidt_capacity(N)));
  return e;
}

EnsemblePrediction goe_prediction(int N) {
  EnsemblePrediction e = ergodic_prediction(N);
  e.kind = EnsembleKind::goe;
  e.S_total = 0.0;
  for (int nl = 0; nl <= N; ++nl) {
    const double dl = nl + 1, dr = N - nl + 1;
    const double ratio = std::min(dl, dr) / std::max(dl, dr);  // d^2 / D^{(n_L)}
    e.S_tilde[nl] -= 0.5 * ratio;
    e.S[nl] -= 0.5 * e.p[nl] * ratio;
    e.S_total += e.S[nl];
  }
  return e;
}

EnsemblePrediction gge_prediction(int N, int J, const std::vector<std::size_t>& counts) {
  if (counts.size() != static_cast<std::size_t>(N + 1)) throw std::invalid_argument("need one count per n_L");
  const std::size_t D_ch = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (D_ch == 0) throw std::invalid_argument("empty chaotic region");
  EnsemblePrediction e;
  e.kind = EnsembleKind::gge;
  e.N = N;
  e.J = J;
  e.D_ch = D_ch;
  e.counts = counts;
  const double s = std::log(static_cast<double>(D_ch)) - 0.5;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(D_ch);
    e.p.push_back(p);
    e.S.push_back(p * s);
  }
  // summing p * s would round; the total is exact by construction
  e.S_total = s;
  e.S_max = std::log(static_cast<double>(schmidt_capacity(N)));
  return e;
}

Eigen::VectorXd project_trivial_irrep(const FockBasis& basis, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::size_t a = basis.swap_lr(i), b = basis.swap_pm(i), c = basis.swap_pm(a);
    out[i] = 0.25 * (v[i] + v[a] + v[b] + v[c]);
  }
  return out;
}

RandomState sample_canonical_random_state(const FockBasis& basis, std::uint64_t seed, std::uint64_t stream,
                                          bool symmetrize) {
  auto rng = make_stream(seed, stream);
  std::normal_distribution<double> gauss;
  const double scale = 1.0 / std::sqrt(static_cast<double>(basis.size()));
  RandomState r;
  r.state.resize(basis.size());
  for (;;) {
    for (auto& x : r.state) x = gauss(rng) * scale;
    if (symmetrize) r.state = project_trivial_irrep(basis, r.state);
    r.norm_squared = r.state.squaredNorm();
    if (r.norm_squared > 0.0) break;  // otherwise draw again from the same stream
  }
  r.state /= std::sqrt(r.norm_squared);
  return r;
}

RandomStateEnsemble random_state_ensemble(const FockBasis& basis, const EnsembleOptions& options) {
  RandomStateEnsemble e;
  e.N = basis.N();
  e.seed = options.seed;
  e.symmetrize = options.symmetrize;
  e.norms_squared.resize(options.samples);
  e.entropies.resize(options.samples);
  if (options.keep_states) e.states.resize(options.samples);
  parallel_for(options.samples, [&](std::size_t i) {
    RandomState r = sample_canonical_random_state(basis, options.seed, i, options.symmetrize);
    e.norms_squared[i] = r.norm_squared;
    e.entropies[i] = total_entropy(state_entanglement(basis, r.state));
    if (options.keep_states) e.states[i] = std::move(r.state);
  });
  return e;
}

namespace {

void mean_std(const std::vector<double>& x, double& mean, double& sd) {
  mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace

double EnsembleStatistics::standard_error_p(std::size_t nl) const {
  return std_p[nl] / std::sqrt(static_cast<double>(count));
}

double EnsembleStatistics::standard_error_S(std::size_t nl) const {
  return std_S[nl] / std::sqrt(static_cast<double>(count));
}

EnsembleStatistics ensemble_statistics(const std::vector<EntropySummary>& samples) {
  if (samples.size() < 2) throw std::invalid_argument("ensemble statistics need at least two samples");
  const std::size_t blocks = samples.front().p.size();
  EnsembleStatistics st;
  st.count = samples.size();
  for (auto* v : {&st.mean_p, &st.std_p, &st.mean_S, &st.std_S, &st.mean_S_tilde, &st.std_S_tilde}) v->resize(blocks);
  std::vector<double> col(samples.size());
  for (std::size_t nl = 0; nl < blocks; ++nl) {
    for (std::size_t i = 0; i < samples.size(); ++i) col[i] = samples[i].p.at(nl);
    mean_std(col, st.mean_p[nl], st.std_p[nl]);
    for (std::size_t i = 0; i < samples.size(); ++i) col[i] = samples[i].S_block.at(nl);
    mean_std(col, st.mean_S[nl], st.std_S[nl]);
    for (std::size_t i = 0; i < samples.size(); ++i) col[i] = samples[i].S_tilde.at(nl);
    mean_std(col, st.mean_S_tilde[nl], st.std_S_tilde[nl]);
  }
  for (std::size_t i = 0; i < samples.size(); ++i) col[i] = samples[i].S;
  mean_std(col, st.mean_S_total, st.std_S_total);
  return st;
}

namespace {

// Indices of the `count` largest entries of score (ties by index).
std::vector<std::size_t> top_indices(const std::vector<std::size_t>& candidates, const std::vector<double>& score,
                                     std::size_t count) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(candidates[order[k]]);
  std::sort(out.begin(), out.end());
  return out;
}

// Summed weight of each candidate over the given set, using overlaps P(exact, unperturbed).
std::vector<double> weights_on(const RowMatrix& P, const std::vector<std::size_t>& set,
                               const std::vector<std::size_t>& candidates, bool candidates_are_exact) {
  std::vector<double> w(candidates.size(), 0.0);
  for (std::size_t c = 0; c < candidates.size(); ++c)
    for (std::size_t s : set)
      w[c] += candidates_are_exact ? P(candidates[c], s) : P(s, candidates[c]);
  return w;
}

}  // namespace

ChaoticRegion chaotic_region(int J, ChaosMethod method, double param, const std::vector<EigenstateRow>& rows,
                             const RowMatrix& overlaps, const UnperturbedBasis& unperturbed) {
  const int N = unperturbed.N();
  if (J < 0 || J > N) throw std::invalid_argument("shell J out of range");
  if (static_cast<std::size_t>(overlaps.rows()) != rows.size() ||
      static_cast<std::size_t>(overlaps.cols()) != unperturbed.size()) {
    throw std::invalid_argument("overlap matrix does not match the eigenstate table");
  }
  std::vector<std::size_t> exact_shell, shell;
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (rows[k].imbalance.shell == J) exact_shell.push_back(k);
  for (std::size_t mu = 0; mu < unperturbed.size(); ++mu)
    if (unperturbed.labels()[mu].J == J) shell.push_back(mu);

  ChaoticRegion r;
  r.J = J;
  r.method = method;
  r.param = param;
  if (method == ChaosMethod::top_k_shannon) {
    if (param < 1 || param != std::floor(param)) throw std::invalid_argument("K must be a positive integer");
    const auto K = static_cast<std::size_t>(param);
    if (K > shell.size()) {
      throw std::invalid_argument("K=" + std::to_string(K) + " exceeds the shell dimension " +
                                  std::to_string(shell.size()));
    }
    if (K > exact_shell.size()) throw std::invalid_argument("fewer than K exact states are assigned to the shell");
    std::vector<double> H;
    for (std::size_t k : exact_shell) H.push_back(rows[k].shannon);
    r.exact_states = top_indices(exact_shell, H, K);
    r.unperturbed_states = top_indices(shell, weights_on(overlaps, r.exact_states, shell, false), K);
  } else {
    if (!(param >= 0.0 && param <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
    std::vector<double> pn(shell.size());
    for (std::size_t c = 0; c < shell.size(); ++c) pn[c] = 1.0 / overlaps.col(shell[c]).squaredNorm();
    const double cut = param * *std::max_element(pn.begin(), pn.end());
    for (std::size_t c = 0; c < shell.size(); ++c)
      if (pn[c] >= cut) r.unperturbed_states.push_back(shell[c]);
    const std::size_t n = std::min(r.unperturbed_states.size(), exact_shell.size());
    r.exact_states = top_indices(exact_shell, weights_on(overlaps, r.unperturbed_states, exact_shell, true), n);
  }
  if (r.unperturbed_states.empty() || r.exact_states.empty()) throw std::invalid_argument("empty chaotic region");
  r.D_ch = r.unperturbed_states.size();
  r.counts.assign(N + 1, 0);
  for (std::size_t mu : r.unperturbed_states) ++r.counts[unperturbed.labels()[mu].n_left()];
  return r;
}

void write_prediction_csv(std::ostream& os, const std::vector<EnsemblePrediction>& predictions) {
  CsvWriter w(os, "ensemble_prediction", 1, {"kind", "N", "J", "n_L", "p", "S", "S_tilde"});
  for (const auto& e : predictions)
    for (std::size_t nl = 0; nl < e.p.size(); ++nl) {
      w << to_string(e.kind) << e.N << e.J << nl << e.p[nl] << e.S[nl]
        << (e.S_tilde.empty() ? std::nan("") : e.S_tilde[nl]);
      w.end_row();
    }
}

void write_statistics_csv(std::ostream& os, const EnsembleStatistics& st) {
  CsvWriter w(os, "ensemble_statistics", 1,
              {"n_L", "count", "mean_p", "std_p", "mean_S", "std_S", "mean_S_tilde", "std_S_tilde"});
  for (std::size_t nl = 0; nl < st.mean_p.size(); ++nl) {
    w << nl << st.count << st.mean_p[nl] << st.std_p[nl] << st.mean_S[nl] << st.std_S[nl] << st.mean_S_tilde[nl]
      << st.std_S_tilde[nl];
    w.end_row();
  }
}

}  // namespace dimers
