#include "dimers/levelstats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "dimers/csv.hpp"
#include "dimers/parallel.hpp"
#include "dimers/random.hpp"

namespace dimers {

double UnfoldedSpectrum::mean_spacing() const {
  if (spacings.empty()) return 0.0;
  return std::accumulate(spacings.begin(), spacings.end(), 0.0) / static_cast<double>(spacings.size());
}

UnfoldedSpectrum unfold(std::vector<double> energies, const UnfoldOptions& options, SectorTag sector) {
  const std::size_t n = energies.size();
  if (n < 20) throw std::invalid_argument("unfolding needs at least 20 levels, got " + std::to_string(n));
  if (!(options.bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (!(options.trim_fraction >= 0.0 && options.trim_fraction < 0.5)) throw std::invalid_argument("bad trim fraction");
  std::sort(energies.begin(), energies.end());
  const double width = energies.back() - energies.front();
  if (!(width > 0.0)) throw std::invalid_argument("spectrum has zero width");

  const double sigma = options.bandwidth * width / static_cast<double>(n - 1);
  const double reach = 6.0 * sigma;
  const std::size_t cut = static_cast<std::size_t>(options.trim_fraction * static_cast<double>(n));

  UnfoldedSpectrum u;
  u.sector = sector;
  u.energies = energies;
  std::size_t lo = 0, hi = 0;
  for (std::size_t k = cut; k < n - cut; ++k) {
    const double e = energies[k];
    while (energies[lo] < e - reach) ++lo;
    while (hi < n && energies[hi] <= e + reach) ++hi;
    // weighted least squares of the staircase (i + 1/2) against x = E_i - e
    double sw = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double x = (energies[i] - e) / sigma;
      const double w = std::exp(-0.5 * x * x);
      const double y = static_cast<double>(i) + 0.5;
      sw += w;
      sx += w * x;
      sxx += w * x * x;
      sy += w * y;
      sxy += w * x * y;
    }
    const double det = sw * sxx - sx * sx;
    u.levels.push_back(det > 1e-12 * sw * sw ? (sxx * sy - sx * sxy) / det : sy / sw);
  }
  for (std::size_t k = 1; k < u.levels.size(); ++k) u.spacings.push_back(u.levels[k] - u.levels[k - 1]);
  return u;
}

double poisson_density(double s) { return std::exp(-s); }

double wigner_density(double s) {
  return 0.5 * std::numbers::pi * s * std::exp(-0.25 * std::numbers::pi * s * s);
}

ReferenceCurves reference_curves(const std::vector<double>& grid) {
  ReferenceCurves r;
  r.s = grid;
  for (double s : grid) {
    r.poisson.push_back(poisson_density(s));
    r.wigner.push_back(wigner_density(s));
  }
  return r;
}

Histogram spacing_histogram(const std::vector<double>& spacings, std::size_t bins, double s_max) {
  if (bins == 0 || !(s_max > 0.0)) throw std::invalid_argument("histogram needs bins > 0 and s_max > 0");
  Histogram h;
  const double width = s_max / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(width * static_cast<double>(b));
  std::vector<std::size_t> counts(bins, 0);
  std::size_t inside = 0;
  for (double s : spacings) {
    if (s < 0.0) throw std::invalid_argument("negative spacing");
    if (s >= s_max) {
      ++h.overflow;
      continue;
    }
    ++counts[std::min(bins - 1, static_cast<std::size_t>(s / width))];
    ++inside;
  }
  for (std::size_t c : counts)
    h.density.push_back(inside ? static_cast<double>(c) / (static_cast<double>(inside) * width) : 0.0);
  return h;
}

namespace {

double brody_c(double beta) { return std::pow(std::tgamma((beta + 2.0) / (beta + 1.0)), beta + 1.0); }

double neg_log_likelihood(double beta, const std::vector<double>& s, double sum_log) {
  const double c = brody_c(beta);
  double tail = 0.0;
  for (double x : s) tail += std::pow(x, beta + 1.0);
  return -(static_cast<double>(s.size()) * std::log(c * (beta + 1.0)) + beta * sum_log - c * tail);
}

double mle(const std::vector<double>& s) {
  double sum_log = 0.0;
  for (double x : s) sum_log += std::log(x);
  const auto r = boost::math::tools::brent_find_minima(
      [&](double b) { return neg_log_likelihood(b, s, sum_log); }, 0.0, 1.0, 40);
  // the minimizer can sit on either end of the bracket
  double best = r.first, value = r.second;
  for (double edge : {0.0, 1.0}) {
    const double v = neg_log_likelihood(edge, s, sum_log);
    if (v < value) {
      value = v;
      best = edge;
    }
  }
  return best;
}

double quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  const double f = pos - static_cast<double>(i);
  return i + 1 < x.size() ? x[i] * (1 - f) + x[i + 1] * f : x[i];
}

}  // namespace

double brody_density(double s, double beta) {
  const double c = brody_c(beta);
  return c * (beta + 1.0) * std::pow(s, beta) * std::exp(-c * std::pow(s, beta + 1.0));
}

std::vector<double> sample_brody(double beta, std::size_t count, std::uint64_t seed) {
  auto rng = make_stream(seed, 0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double c = brody_c(beta);
  std::vector<double> s(count);
  for (auto& x : s) x = std::pow(-std::log1p(-uni(rng)) / c, 1.0 / (beta + 1.0));
  return s;
}

BrodyFit brody_fit(const std::vector<double>& spacings, std::size_t resamples, std::uint64_t seed,
                   double confidence) {
  if (spacings.empty()) throw std::invalid_argument("no spacings to fit");
  for (double s : spacings)
    if (!(s > 0.0)) throw std::invalid_argument("Brody fit needs positive spacings");
  BrodyFit f;
  f.samples = spacings.size();
  f.resamples = resamples;
  f.confidence = confidence;
  f.beta = mle(spacings);
  f.ci_low = f.ci_high = f.beta;
  if (resamples > 0) {
    std::vector<double> betas(resamples);
    parallel_for(resamples, [&](std::size_t b) {
      auto rng = make_stream(seed, b);
      std::uniform_int_distribution<std::size_t> pick(0, spacings.size() - 1);
      std::vector<double> draw(spacings.size());
      for (auto& x : draw) x = spacings[pick(rng)];
      betas[b] = mle(draw);
    });
    f.ci_low = quantile(betas, 0.5 * (1.0 - confidence));
    f.ci_high = quantile(betas, 0.5 * (1.0 + confidence));
  }
  return f;
}

double GapRatio::mean() const {
  if (values.empty()) return std::nan("");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double GapRatio::standard_error() const {
  if (values.size() < 2) return std::nan("");
  const double m = mean();
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
}

GapRatio gap_ratio(std::vector<double> energies, double trim_fraction) {
  std::sort(energies.begin(), energies.end());
  const auto cut = static_cast<std::size_t>(trim_fraction * static_cast<double>(energies.size()));
  if (energies.size() < 2 * cut + 3) throw std::invalid_argument("gap ratio needs at least 3 levels");
  double scale = 1.0;
  for (double e : energies) scale = std::max(scale, std::abs(e));
  const double tol = kDegeneracyTolerance * scale;
  GapRatio g;
  for (std::size_t k = cut + 1; k + 1 < energies.size() - cut; ++k) {
    const double a = energies[k] - energies[k - 1];
    const double b = energies[k + 1] - energies[k];
    if (a <= tol || b <= tol) {
      ++g.skipped;
      continue;
    }
    g.values.push_back(std::min(a, b) / std::max(a, b));
  }
  return g;
}

LevelStatistics analyze_levels(const EigenDecomposition& exact, const LevelOptions& options) {
  if (exact.sectors.size() != exact.size()) throw std::invalid_argument("level statistics need sector tags");
  std::map<std::pair<int, int>, std::vector<double>> groups;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const SectorTag& t = exact.sectors[k];
    if (!t.resolved()) throw std::invalid_argument("level statistics need a sector-resolved spectrum");
    groups[{-t.lr, -t.pm}].push_back(exact.energies[k]);  // ++ first
  }
  LevelStatistics out;
  for (auto& [key, e] : groups) {
    SectorLevels s;
    s.sector = SectorTag{-key.first, -key.second};
    s.ratio = gap_ratio(e, options.unfold.trim_fraction);
    s.unfolded = unfold(std::move(e), options.unfold, s.sector);
    out.pooled_ratio.values.insert(out.pooled_ratio.values.end(), s.ratio.values.begin(), s.ratio.values.end());
    out.pooled_ratio.skipped += s.ratio.skipped;
    for (double x : s.unfolded.spacings) {
      if (x > kDegeneracyTolerance)
        out.pooled_spacings.push_back(x);
      else
        ++out.zero_spacings;
    }
    out.sectors.push_back(std::move(s));
  }
  out.histogram = spacing_histogram(out.pooled_spacings, options.bins, options.s_max);
  out.brody = brody_fit(out.pooled_spacings, options.bootstrap, options.seed);
  return out;
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
  CsvWriter w(os, "spacing_histogram", 1, {"s_lo", "s_hi", "density", "poisson", "wigner"});
  for (std::size_t b = 0; b < h.density.size(); ++b) {
    const double mid = 0.5 * (h.edges[b] + h.edges[b + 1]);
    w << h.edges[b] << h.edges[b + 1] << h.density[b] << poisson_density(mid) << wigner_density(mid);
    w.end_row();
  }
}

}  // namespace dimers
