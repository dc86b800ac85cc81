#pragma once

// Mean-field (c-number) dynamics of the two dimers, the semiclassical action of
// a single dimer, and the map from trajectories to (n, j, J) series.

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dimers/model.hpp"

namespace dimers {

/// Amplitudes a_{sigma,alpha} in Mode order (L+, L-, R+, R-); sum |a|^2 = N.
/// Time is in units of 1/Omega.
struct ClassicalState {
  std::array<std::complex<double>, 4> a{};
  double t = 0.0;

  double norm() const;
  double dimer_population(int alpha) const;  // alpha = 0 (L) or 1 (R)
};

using Amplitudes = std::array<std::complex<double>, 4>;

/// da/dt for i da/dt = -(1/2) a_{-sigma,alpha} + (u/N)|a|^2 a - (w/2) a_{sigma,other}.
Amplitudes mean_field_rhs(const ClassicalState& s, const ModelParams& params);

/// Conserved mean-field energy, units of Omega.
double mean_field_energy(const ClassicalState& s, const ModelParams& params);

/// Energy of one dimer measured from its interaction offset U n^2 / 4:
/// -(n/2) sqrt(1 - z^2) cos(phi) + (U n^2 / 4) z^2.
double dimer_energy(const ClassicalState& s, const ModelParams& params, int alpha);

struct IntegratorOptions {
  double t_max = 1000.0;
  double dt_out = 1.0;
  double tolerance = 1e-8;  // on relative energy and norm drift
  double initial_step = 0.05;
  double min_step = 1e-4;
};

struct Trajectory {
  std::vector<ClassicalState> samples;  // uniform grid, samples[0] is the initial state
  double step = 0.0;                    // step size that met the tolerance
  double energy_drift = 0.0;            // max |E(t) - E(0)| / |E(0)|
  double norm_drift = 0.0;              // max |N(t) - N(0)| / N(0)
};

/// Eighth-order symplectic composition of an exact split step. The step is
/// halved until both drifts are within tolerance; NumericError if min_step fails.
Trajectory integrate(const ClassicalState& initial, const ModelParams& params, const IntegratorOptions& options);

/// Same scheme at a fixed step, no tolerance control (used for convergence checks).
ClassicalState propagate(const ClassicalState& initial, const ModelParams& params, double t, double step);

/// Semiclassical action j of one dimer with n particles, energy E (units of
/// Omega, offset removed as in dimer_energy) and u_alpha = U n / Omega <= 1,
/// from the closed form in complete elliptic integrals.
double semiclassical_action(double n, double E, double u_alpha);

/// Same quantity as the enclosed phase-space area of the energy contour in
/// units of 4 pi / n, by direct quadrature. Valid for any u_alpha >= 0.
double action_oracle(double n, double E, double u_alpha);

/// Classical energy range of one dimer, [-n/2, n/2] for u_alpha <= 1.
std::pair<double, double> dimer_energy_range(double n, double u_alpha);

/// Energy E with j(E) = j_target; closed form for u_alpha <= 1, oracle otherwise.
double invert_action(double j_target, double n, double u_alpha);

struct LaunchSpec {
  double J = 0.0;
  double n = 0.0;
  double j = 0.0;
  double phi_lr = 0.0;
  /// Intradimer angles phi_alpha = arg(a_-) - arg(a_+) at which each dimer is
  /// placed on its energy contour.
  double phi_left = 0.0;
  double phi_right = 0.0;
  /// Sign of z = (|a_+|^2 - |a_-|^2) / n_alpha on the contour.
  int z_sign_left = 1;
  int z_sign_right = 1;
};

ClassicalState init_from_actions(const ModelParams& params, const LaunchSpec& launch);

struct ObservablePoint {
  double t = 0.0;
  double n = 0.0;  // n_L - n_R
  double j = 0.0;  // j_L - j_R
  double J = 0.0;  // j_L + j_R
  double E = 0.0;  // total mean-field energy
  bool clamped = false;
};

/// Per-dimer actions of a state; oracle when u_alpha > 1, clamped when the
/// dimer energy drifts outside its classical range.
ObservablePoint observe(const ClassicalState& s, const ModelParams& params);
std::vector<ObservablePoint> trajectory_observables(const Trajectory& traj, const ModelParams& params);

void write_trajectory_csv(std::ostream& os, const std::vector<ObservablePoint>& series);

}  // namespace dimers
