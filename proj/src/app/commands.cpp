#include "dimers/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>

#include <boost/version.hpp>
#include <Eigen/Core>

#include "dimers/app/cache.hpp"
#include "dimers/classical.hpp"
#include "dimers/csv.hpp"
#include "dimers/ensembles.hpp"
#include "dimers/entanglement.hpp"
#include "dimers/errors.hpp"
#include "dimers/levelstats.hpp"
#include "dimers/model_io.hpp"
#include "dimers/parallel.hpp"
#include "dimers/version.hpp"

namespace dimers::app {

namespace fs = std::filesystem;

SpectralData::SpectralData(const ModelParams& p, EigenDecomposition e)
    : params(p),
      basis(p.N()),
      exact(std::move(e)),
      unperturbed(p, basis),
      overlaps(overlap_probabilities(exact, unperturbed)),
      rows(eigenstate_table(exact, overlaps, basis, unperturbed)) {}

std::size_t select_state(const std::vector<EigenstateRow>& rows, int J, const std::string& selector) {
  if (!selector.empty() && std::all_of(selector.begin(), selector.end(), ::isdigit)) {
    const std::size_t k = std::stoul(selector);
    if (k >= rows.size()) throw ConfigError("state index " + selector + " out of range");
    return k;
  }
  std::function<double(const EigenstateRow&)> score;
  if (selector == "min_sigma_n") {
    score = [](const EigenstateRow& r) { return -r.imbalance.sigma_n; };
  } else if (selector == "max_sigma_n") {
    score = [](const EigenstateRow& r) { return r.imbalance.sigma_n; };
  } else if (selector == "max_H") {
    score = [](const EigenstateRow& r) { return r.shannon; };
  } else {
    throw ConfigError("unknown state selector '" + selector + "'");
  }
  std::size_t best = rows.size();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].imbalance.shell != J) continue;
    if (best == rows.size() || score(rows[k]) > score(rows[best])) best = k;
  }
  if (best == rows.size()) throw ConfigError("no exact state is assigned to shell " + std::to_string(J));
  return best;
}

namespace {

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    std::ofstream f(dir_ / name, std::ios::trunc);
    if (!f) throw ConfigError("cannot write " + (dir_ / name).string());
    files_.push_back(name);
    return f;
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

struct Context {
  const RunConfig& config;
  Output& out;
  DecompositionCache& cache;
  nlohmann::json metadata = nlohmann::json::object();
};

std::unique_ptr<SpectralData> spectral_data(Context& ctx, const ModelParams& params) {
  const FockBasis basis(params.N());
  return std::make_unique<SpectralData>(params, ctx.cache.get(params, basis));
}

std::vector<double> overlap_row(const SpectralData& d, std::size_t k) {
  return {d.overlaps.row(k).data(), d.overlaps.row(k).data() + d.overlaps.cols()};
}

void cmd_spectrum(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto data = spectral_data(ctx, c.model.params());
  const int shell = resolve_shell(c.spectrum.shell, c.model.N);
  {
    auto f = ctx.out.open("eigenstates.csv");
    write_eigenstate_csv(f, data->rows);
  }
  {
    auto f = ctx.out.open("unperturbed.csv");
    write_unperturbed_csv(f, unperturbed_table(data->unperturbed, data->overlaps));
  }
  nlohmann::json marked = nlohmann::json::object();
  for (const std::string sel : {"min_sigma_n", "max_sigma_n", "max_H"}) {
    const std::size_t k = select_state(data->rows, shell, sel);
    const auto joint = joint_distribution(overlap_row(*data, k), data->unperturbed, shell);
    auto f = ctx.out.open("joint_nj_" + sel + ".csv");
    write_joint_csv(f, joint, k);
    marked[sel] = {{"index", k}, {"leakage", joint.leakage}, {"leaky", joint.leaky}};
  }
  if (c.spectrum.dump_json) {
    ctx.out.open("basis.json") << basis_to_json(data->basis).dump() << '\n';
    ctx.out.open("hamiltonian.json") << hamiltonian_to_json(build_hamiltonian(data->params, data->basis)).dump()
                                     << '\n';
  }
  std::size_t ambiguous = 0;
  for (const auto& r : data->rows) ambiguous += r.imbalance.ambiguous;
  ctx.metadata = {{"params", params_to_json(data->params)},
                  {"dimension", data->basis.size()},
                  {"shell", shell},
                  {"marked_states", marked},
                  {"ambiguous_shell_assignments", ambiguous},
                  {"H_GOE", goe_shannon_reference(data->basis.size())}};
}

void cmd_entanglement(Context& ctx) {
  const RunConfig& c = ctx.config;
  const EntanglementConfig& ec = c.entanglement;
  const auto data = spectral_data(ctx, c.model.params());
  const int N = data->basis.N();
  const std::size_t D = data->basis.size();
  const int shell = resolve_shell(ec.shell, N);

  std::vector<EntanglementSpectrum> spectra(D);
  parallel_for(D, [&](std::size_t k) {
    const Eigen::VectorXd v = data->exact.vectors.col(static_cast<Eigen::Index>(k));
    spectra[k] = state_entanglement(data->basis, v, ec.cutoff);
  });
  std::vector<EntropySummary> summaries(D);
  for (std::size_t k = 0; k < D; ++k) summaries[k] = total_entropy(spectra[k]);

  {
    auto f = ctx.out.open("entanglement_scatter.csv");
    CsvWriter w(f, "entanglement_scatter", 1, {"index", "sector", "energy", "shell", "sigma_n", "shannon", "S"});
    for (std::size_t k = 0; k < D; ++k) {
      const auto& r = data->rows[k];
      w << k << r.sector.str() << r.energy << r.imbalance.shell << r.imbalance.sigma_n << r.shannon
        << summaries[k].S;
      w.end_row();
    }
  }

  std::vector<std::pair<std::size_t, EntanglementSpectrum>> chosen_spectra;
  std::vector<std::pair<std::size_t, EntropySummary>> chosen_blocks;
  nlohmann::json selected = nlohmann::json::object();
  for (const auto& sel : ec.states) {
    const std::size_t k = select_state(data->rows, shell, sel);
    chosen_spectra.emplace_back(k, spectra[k]);
    chosen_blocks.emplace_back(k, summaries[k]);
    selected[sel] = {{"index", k}, {"S", summaries[k].S}, {"shannon", data->rows[k].shannon}};
  }
  {
    auto f = ctx.out.open("entanglement_spectrum.csv");
    write_spectrum_csv(f, chosen_spectra);
  }
  {
    auto f = ctx.out.open("entropy_blocks.csv");
    write_entropy_blocks_csv(f, chosen_blocks);
  }

  const ChaosMethod method = parse_chaos_method(ec.chaos_method);
  const double param = method == ChaosMethod::top_k_shannon ? ec.K : ec.theta;
  ChaoticRegion region;
  try {
    region = chaotic_region(shell, method, param, data->rows, data->overlaps, data->unperturbed);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("chaotic region: ") + e.what());
  }
  const auto gge = gge_prediction(N, shell, region.counts);

  // largest shell GGE entropy over all shells where the same rule applies
  double S_gge_max = -std::numeric_limits<double>::infinity();
  int J_gge_max = -1;
  for (int J = 0; J <= N; ++J) {
    try {
      const auto r = chaotic_region(J, method, param, data->rows, data->overlaps, data->unperturbed);
      const double s = gge_prediction(N, J, r.counts).S_total;
      if (s > S_gge_max) {
        S_gge_max = s;
        J_gge_max = J;
      }
    } catch (const std::invalid_argument&) {
    }
  }

  std::vector<EntropySummary> chaotic;
  for (std::size_t k : region.exact_states) chaotic.push_back(summaries[k]);
  {
    auto f = ctx.out.open("gge_comparison.csv");
    CsvWriter w(f, "gge_comparison", 1,
                {"n_L", "count", "p_gge", "S_gge", "mean_p", "std_p", "mean_S", "std_S"});
    if (chaotic.size() >= 2) {
      const auto st = ensemble_statistics(chaotic);
      for (int nl = 0; nl <= N; ++nl) {
        w << nl << region.counts[nl] << gge.p[nl] << gge.S[nl] << st.mean_p[nl] << st.std_p[nl] << st.mean_S[nl]
          << st.std_S[nl];
        w.end_row();
      }
    }
  }
  {
    auto f = ctx.out.open("chaotic_region.csv");
    CsvWriter w(f, "chaotic_region", 1, {"kind", "index", "J", "n", "j"});
    for (std::size_t k : region.exact_states) {
      w << "exact" << k << data->rows[k].imbalance.shell << std::nan("") << std::nan("");
      w.end_row();
    }
    for (std::size_t mu : region.unperturbed_states) {
      const auto& l = data->unperturbed.labels()[mu];
      w << "unperturbed" << mu << l.J << l.n << l.j;
      w.end_row();
    }
  }
  const auto erg = ergodic_prediction(N);
  const auto goe = goe_prediction(N);
  {
    auto f = ctx.out.open("predictions.csv");
    write_prediction_csv(f, {erg, goe, gge});
  }
  {
    auto f = ctx.out.open("references.csv");
    CsvWriter w(f, "entropy_references", 1, {"name", "value"});
    for (const auto& [name, value] : std::vector<std::pair<const char*, double>>{
             {"S_max", erg.S_max},
             {"S_erg", erg.S_total},
             {"S_GOE", goe.S_total},
             {"S_GGE_max", S_gge_max},
             {"S_GGE_shell", gge.S_total},
             {"H_GOE", goe_shannon_reference(D)}}) {
      w << name << value;
      w.end_row();
    }
  }
  ctx.metadata = {{"params", params_to_json(data->params)},
                  {"shell", shell},
                  {"cutoff", ec.cutoff},
                  {"chaos_method", to_string(method)},
                  {"chaos_param", param},
                  {"D_ch", region.D_ch},
                  {"counts", region.counts},
                  {"S_GGE_max_shell", J_gge_max},
                  {"selected_states", selected}};
}

void cmd_ensemble(Context& ctx) {
  const RunConfig& c = ctx.config;
  const FockBasis basis(c.ensemble.N);
  EnsembleOptions opt;
  opt.samples = c.ensemble.samples;
  opt.seed = c.seed;
  opt.symmetrize = c.ensemble.symmetrize;
  const auto ens = random_state_ensemble(basis, opt);
  const auto st = ensemble_statistics(ens.entropies);
  {
    auto f = ctx.out.open("ensemble_statistics.csv");
    write_statistics_csv(f, st);
  }
  {
    auto f = ctx.out.open("ensemble_samples.csv");
    CsvWriter w(f, "ensemble_samples", 1, {"sample", "norm_squared", "S"});
    for (std::size_t i = 0; i < ens.entropies.size(); ++i) {
      w << i << ens.norms_squared[i] << ens.entropies[i].S;
      w.end_row();
    }
  }
  {
    auto f = ctx.out.open("predictions.csv");
    write_prediction_csv(f, {ergodic_prediction(basis.N()), goe_prediction(basis.N())});
  }
  ctx.metadata = {{"N", basis.N()},
                  {"dimension", basis.size()},
                  {"samples", opt.samples},
                  {"seed", opt.seed},
                  {"symmetrize", opt.symmetrize},
                  {"mean_S", st.mean_S_total},
                  {"std_S", st.std_S_total}};
}

LevelOptions level_options(const RunConfig& c) {
  LevelOptions o;
  o.unfold.bandwidth = c.levelstats.bandwidth;
  o.unfold.trim_fraction = c.levelstats.trim;
  o.bins = c.levelstats.bins;
  o.s_max = c.levelstats.s_max;
  o.bootstrap = c.levelstats.bootstrap;
  o.seed = c.seed;
  return o;
}

void cmd_levelstats(Context& ctx) {
  const RunConfig& c = ctx.config;
  const FockBasis basis(c.model.N);
  const LevelOptions opt = level_options(c);
  auto sf = ctx.out.open("levelstats_summary.csv");
  CsvWriter summary(sf, "levelstats_summary", 1,
                    {"w", "levels", "beta", "ci_low", "ci_high", "r_mean", "r_se", "pairs", "skipped",
                     "zero_spacings", "r_poisson", "r_goe"});
  auto pf = ctx.out.open("levelstats_sectors.csv");
  CsvWriter sectors(pf, "levelstats_sectors", 1, {"w", "sector", "levels", "mean_spacing", "r_mean", "pairs"});
  nlohmann::json runs = nlohmann::json::array();
  for (double w : c.levelstats.omegas) {
    const ModelParams p = c.model.params_with_w(w);
    if (p.omega() == 0.0) throw ConfigError("level statistics need w > 0 (sector-resolved spectrum)");
    const auto st = analyze_levels(ctx.cache.get(p, basis), opt);
    {
      auto f = ctx.out.open("histogram_w" + format_double(w) + ".csv");
      write_histogram_csv(f, st.histogram);
    }
    summary << w << basis.size() << st.brody.beta << st.brody.ci_low << st.brody.ci_high << st.pooled_ratio.mean()
            << st.pooled_ratio.standard_error() << st.pooled_ratio.values.size() << st.pooled_ratio.skipped
            << st.zero_spacings << kPoissonGapRatio << kGoeGapRatio;
    summary.end_row();
    for (const auto& s : st.sectors) {
      sectors << w << s.sector.str() << s.unfolded.energies.size() << s.unfolded.mean_spacing() << s.ratio.mean()
              << s.ratio.values.size();
      sectors.end_row();
    }
    runs.push_back({{"w", w}, {"beta", st.brody.beta}, {"r_mean", st.pooled_ratio.mean()}});
  }
  ctx.metadata = {{"N", c.model.N},
                  {"u", c.model.params().u()},
                  {"bandwidth", opt.unfold.bandwidth},
                  {"trim", opt.unfold.trim_fraction},
                  {"bootstrap", opt.bootstrap},
                  {"runs", runs}};
}

void cmd_classical(Context& ctx) {
  const RunConfig& c = ctx.config;
  IntegratorOptions opt;
  opt.t_max = c.classical.t_max;
  opt.dt_out = c.classical.dt_out;
  opt.tolerance = c.classical.tolerance;
  opt.initial_step = c.classical.initial_step;
  opt.min_step = c.classical.min_step;

  auto sf = ctx.out.open("classical_summary.csv");
  CsvWriter summary(sf, "classical_summary", 1,
                    {"label", "w", "E0", "step", "energy_drift", "norm_drift", "J_min", "J_max", "clamped"});
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& launch : c.classical.launches) {
    const ModelParams p = launch.w ? c.model.params_with_w(*launch.w) : c.model.params();
    const ClassicalState s0 = init_from_actions(p, launch.spec);
    const Trajectory traj = integrate(s0, p, opt);
    const auto series = trajectory_observables(traj, p);
    {
      auto f = ctx.out.open("trajectory_" + launch.label + ".csv");
      write_trajectory_csv(f, series);
    }
    double Jmin = series.front().J, Jmax = series.front().J;
    std::size_t clamped = 0;
    for (const auto& o : series) {
      Jmin = std::min(Jmin, o.J);
      Jmax = std::max(Jmax, o.J);
      clamped += o.clamped;
    }
    summary << launch.label << p.w() << series.front().E << traj.step << traj.energy_drift << traj.norm_drift << Jmin
            << Jmax << clamped;
    summary.end_row();
    runs.push_back({{"label", launch.label},
                    {"w", p.w()},
                    {"J", launch.spec.J},
                    {"n", launch.spec.n},
                    {"j", launch.spec.j},
                    {"phi_lr", launch.spec.phi_lr},
                    {"phi_left", launch.spec.phi_left},
                    {"phi_right", launch.spec.phi_right},
                    {"z_sign_left", launch.spec.z_sign_left},
                    {"z_sign_right", launch.spec.z_sign_right},
                    {"E0", series.front().E},
                    {"step", traj.step},
                    {"energy_drift", traj.energy_drift},
                    {"norm_drift", traj.norm_drift},
                    {"J_band", {Jmin, Jmax}}});
  }
  ctx.metadata = {{"N", c.model.N},
                  {"u", c.model.params().u()},
                  {"integrator", "split-step, 8th-order symplectic composition, long double"},
                  {"t_max", opt.t_max},
                  {"dt_out", opt.dt_out},
                  {"tolerance", opt.tolerance},
                  {"runs", runs}};
}

void cmd_scan(Context& ctx) {
  const RunConfig& c = ctx.config;
  const FockBasis basis(c.model.N);
  LevelOptions opt = level_options(c);
  auto f = ctx.out.open("scan.csv");
  CsvWriter w(f, "scan", 1, {"u", "w", "r_mean", "r_se", "pairs", "beta", "ci_low", "ci_high"});
  for (double u : c.scan.u)
    for (double wv : c.scan.w) {
      if (!(wv > 0.0)) throw ConfigError("scan.w values must be > 0");
      const auto p = ModelParams::from_scaled(c.model.N, u, wv, c.model.Omega);
      const auto exact = solve_exact(p, basis);  // not cached: scans are wide and one-off
      GapRatio pooled;
      std::map<std::pair<int, int>, std::vector<double>> groups;
      for (std::size_t k = 0; k < exact.size(); ++k)
        groups[{exact.sectors[k].lr, exact.sectors[k].pm}].push_back(exact.energies[k]);
      for (auto& [key, e] : groups) {
        const auto g = gap_ratio(e, opt.unfold.trim_fraction);
        pooled.values.insert(pooled.values.end(), g.values.begin(), g.values.end());
      }
      double beta = std::nan(""), lo = std::nan(""), hi = std::nan("");
      if (c.scan.brody) {
        const auto st = analyze_levels(exact, opt);
        beta = st.brody.beta;
        lo = st.brody.ci_low;
        hi = st.brody.ci_high;
      }
      w << u << wv << pooled.mean() << pooled.standard_error() << pooled.values.size() << beta << lo << hi;
      w.end_row();
    }
  ctx.metadata = {{"N", c.model.N}, {"points", c.scan.u.size() * c.scan.w.size()}, {"brody", c.scan.brody}};
}

const std::map<std::string, void (*)(Context&)>& registry() {
  static const std::map<std::string, void (*)(Context&)> r{{"spectrum", cmd_spectrum},
                                                          {"entanglement", cmd_entanglement},
                                                          {"ensemble", cmd_ensemble},
                                                          {"levelstats", cmd_levelstats},
                                                          {"classical", cmd_classical},
                                                          {"scan", cmd_scan}};
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum", "entanglement", "ensemble", "levelstats", "classical",
                                              "scan"};
  return names;
}

nlohmann::json run_command(const std::string& name, const RunConfig& config, const fs::path& out) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("unknown command '" + name + "'");
  validate(config);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ConfigError("cannot create output directory " + out.string());

  set_thread_count(config.threads);
  const auto start = std::chrono::steady_clock::now();
  Output output(out);
  {
    auto f = output.open("config.json");
    f << config_to_json(config).dump(2) << '\n';
  }
  DecompositionCache cache(config.cache.dir.empty() ? out / "cache" : fs::path(config.cache.dir),
                           config.cache.enabled);
  Context ctx{config, output, cache};
  it->second(ctx);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json manifest = {
      {"command", name},
      {"version", kVersion},
      {"libraries",
       {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION}}},
      {"seed", config.seed},
      {"threads", config.threads},
      {"wall_time_s", seconds},
      {"cache", {{"hits", cache.hits()}, {"misses", cache.misses()}}},
      {"config", config_to_json(config)},
      {"outputs", output.files()},
      {"metadata", ctx.metadata},
  };
  std::ofstream m(out / "manifest.json", std::ios::trunc);
  if (!m) throw ConfigError("cannot write " + (out / "manifest.json").string());
  m << manifest.dump(2) << '\n';
  return manifest;
}

}  // namespace dimers::app
