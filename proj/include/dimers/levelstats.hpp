#pragma once

// Level-spacing statistics per D2 sector: staircase unfolding, spacing
// histograms, Brody fit and adjacent gap ratios.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dimers/spectral.hpp"

namespace dimers {

inline constexpr double kPoissonGapRatio = 0.38629436111989061;  // 2 ln 2 - 1
inline constexpr double kGoeGapRatio = 0.5307;
inline constexpr double kDegeneracyTolerance = 1e-12;

struct UnfoldOptions {
  double bandwidth = 8.0;        // kernel width in mean spacings
  double trim_fraction = 0.02;   // dropped at each spectral edge after unfolding
};

struct UnfoldedSpectrum {
  SectorTag sector;
  std::vector<double> energies;  // sorted raw energies, untrimmed
  std::vector<double> levels;    // smoothed staircase at the retained energies
  std::vector<double> spacings;

  double mean_spacing() const;
};

/// Local-linear Gaussian-kernel fit of the staircase N(E), evaluated at each
/// level. Needs at least 20 levels.
UnfoldedSpectrum unfold(std::vector<double> energies, const UnfoldOptions& options = {}, SectorTag sector = {});

double poisson_density(double s);
double wigner_density(double s);

struct ReferenceCurves {
  std::vector<double> s, poisson, wigner;
};
ReferenceCurves reference_curves(const std::vector<double>& grid);

struct Histogram {
  std::vector<double> edges;
  std::vector<double> density;  // integrates to 1 over the binned samples
  std::size_t overflow = 0;     // samples beyond the last edge
};
Histogram spacing_histogram(const std::vector<double>& spacings, std::size_t bins = 40, double s_max = 4.0);

/// Brody density c (b+1) s^b exp(-c s^{b+1}), c = Gamma((b+2)/(b+1))^{b+1}.
double brody_density(double s, double beta);
std::vector<double> sample_brody(double beta, std::size_t count, std::uint64_t seed);

struct BrodyFit {
  double beta = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double confidence = 0.95;
  std::size_t samples = 0;
  std::size_t resamples = 0;
};

/// Maximum likelihood over beta in [0, 1] with a percentile bootstrap interval.
BrodyFit brody_fit(const std::vector<double>& spacings, std::size_t resamples = 200, std::uint64_t seed = 12345,
                   double confidence = 0.95);

struct GapRatio {
  std::vector<double> values;  // min(r, 1/r) per adjacent pair
  std::size_t skipped = 0;     // pairs touching a spacing below the degeneracy tolerance
  double mean() const;
  double standard_error() const;
};

/// Unfolding-free ratio of consecutive spacings; trim_fraction levels are
/// dropped at each edge first.
GapRatio gap_ratio(std::vector<double> energies, double trim_fraction = 0.0);

struct LevelOptions {
  UnfoldOptions unfold;
  std::size_t bins = 40;
  double s_max = 4.0;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 12345;
};

struct SectorLevels {
  SectorTag sector;
  UnfoldedSpectrum unfolded;
  GapRatio ratio;
};

struct LevelStatistics {
  std::vector<SectorLevels> sectors;
  std::vector<double> pooled_spacings;  // zero spacings removed
  std::size_t zero_spacings = 0;
  GapRatio pooled_ratio;
  Histogram histogram;
  BrodyFit brody;
};

/// Each sector is unfolded on its own and only then pooled. Requires a
/// sector-resolved decomposition.
LevelStatistics analyze_levels(const EigenDecomposition& exact, const LevelOptions& options = {});

/// Rows (s_lo, s_hi, density, poisson, wigner) with reference densities at bin centres.
void write_histogram_csv(std::ostream& os, const Histogram& h);

}  // namespace dimers
