#include "dimers/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>

#include "dimers/csv.hpp"
#include "dimers/elliptic.hpp"
#include "dimers/errors.hpp"

namespace dimers {

namespace {

using std::numbers::pi;

constexpr std::array<int, 2> kPlus{kLeftPlus, kRightPlus};
constexpr std::array<int, 2> kMinus{kLeftMinus, kRightMinus};

// Yoshida's eighth-order symmetric composition, solution A.
constexpr std::array<double, 7> kYoshida{-1.61582374150097,  -2.44699182370524, -0.00716989419708120,
                                         2.44002732616735,   0.157739928123617, 1.82020630970714,
                                         1.04242620869991};

std::array<double, 15> composition_weights() {
  double sum = 0.0;
  for (double w : kYoshida) sum += w;
  std::array<double, 15> out{};
  for (int k = 0; k < 7; ++k) {
    out[k] = kYoshida[6 - k];
    out[14 - k] = kYoshida[6 - k];
  }
  out[7] = 1.0 - 2.0 * sum;
  return out;
}

Eigen::Matrix4d hopping_matrix(const ModelParams& p) {
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(kLeftPlus, kLeftMinus) = M(kLeftMinus, kLeftPlus) = -0.5 * p.Omega();
  M(kRightPlus, kRightMinus) = M(kRightMinus, kRightPlus) = -0.5 * p.Omega();
  M(kLeftPlus, kRightPlus) = M(kRightPlus, kLeftPlus) = -0.5 * p.omega();
  M(kLeftMinus, kRightMinus) = M(kRightMinus, kLeftMinus) = -0.5 * p.omega();
  return M / p.Omega();  // time in units of 1/Omega
}

// Exact split flows: linear hopping exp(-i M tau), and the on-site phase
// rotation a -> a exp(-i U |a|^2 tau), which conserves every |a_k|. Carried in
// extended precision so that the fixed rounding of the propagators does not
// accumulate into a visible secular drift over ~10^6 stages.
using Real = long double;
using Cplx = std::complex<Real>;
using WideAmplitudes = std::array<Cplx, 4>;

WideAmplitudes widen(const Amplitudes& a) {
  WideAmplitudes w;
  for (int k = 0; k < 4; ++k) w[k] = Cplx(a[k].real(), a[k].imag());
  return w;
}

Amplitudes narrow(const WideAmplitudes& w) {
  Amplitudes a;
  for (int k = 0; k < 4; ++k) a[k] = std::complex<double>(static_cast<double>(w[k].real()), static_cast<double>(w[k].imag()));
  return a;
}

class SplitStepper {
 public:
  SplitStepper(const ModelParams& p, double h) : U_(static_cast<Real>(p.U()) / p.Omega()) {
    using Matrix4r = Eigen::Matrix<Real, 4, 4>;
    Eigen::SelfAdjointEigenSolver<Matrix4r> es(hopping_matrix(p).cast<Real>());
    const auto weights = composition_weights();
    for (std::size_t k = 0; k < weights.size(); ++k) {
      const Real tau = static_cast<Real>(weights[k]) * h;
      Eigen::Matrix<Cplx, 4, 1> phases;
      for (int i = 0; i < 4; ++i) phases[i] = std::exp(Cplx(0.0L, -es.eigenvalues()[i] * tau));
      linear_[k] = es.eigenvectors().template cast<Cplx>() * phases.asDiagonal() *
                   es.eigenvectors().transpose().template cast<Cplx>();
      half_[k] = tau / 2;
    }
  }

  void step(WideAmplitudes& a) const {
    for (std::size_t k = 0; k < linear_.size(); ++k) {
      kick(a, half_[k]);
      const WideAmplitudes in = a;
      for (int r = 0; r < 4; ++r) {
        Cplx acc = 0;
        for (int c = 0; c < 4; ++c) acc += linear_[k](r, c) * in[c];
        a[r] = acc;
      }
      kick(a, half_[k]);
    }
  }

 private:
  void kick(WideAmplitudes& a, Real tau) const {
    for (auto& x : a) x *= std::exp(Cplx(0.0L, -U_ * std::norm(x) * tau));
  }

  Real U_;
  std::array<Eigen::Matrix<Cplx, 4, 4>, 15> linear_;
  std::array<Real, 15> half_;
};

double relative_drift(double value, double reference) {
  const double scale = std::abs(reference);
  return scale > 0.0 ? std::abs(value - reference) / scale : std::abs(value - reference);
}

// Contour H(z, phi) = -(n/2) sqrt(1 - z^2) cos(phi) + (u n / 4) z^2 of one dimer.
double contour_energy(double n, double u, double z, double phi) {
  return -0.5 * n * std::sqrt(std::max(0.0, 1.0 - z * z)) * std::cos(phi) + 0.25 * u * n * z * z;
}

// Root of f on [a, b] where f(a), f(b) have opposite signs.
template <class F>
double bracket_root(F f, double a, double b) {
  boost::uintmax_t iterations = 200;
  const auto r = boost::math::tools::toms748_solve(f, a, b, boost::math::tools::eps_tolerance<double>(52), iterations);
  return 0.5 * (r.first + r.second);
}

// Solutions z in [0, 1] of g(z) = 0 found by a sign-change scan and refinement.
template <class F>
std::vector<double> scan_roots(F g, int grid = 2000) {
  std::vector<double> roots;
  double z0 = 0.0, g0 = g(0.0);
  for (int k = 1; k <= grid; ++k) {
    const double z1 = static_cast<double>(k) / grid;
    const double g1 = g(z1);
    if (g0 == 0.0) {
      roots.push_back(z0);
    } else if ((g0 < 0.0) != (g1 < 0.0) && g1 != 0.0) {
      roots.push_back(bracket_root(g, z0, z1));
    }
    z0 = z1;
    g0 = g1;
  }
  if (g0 == 0.0) roots.push_back(z0);
  return roots;
}

// j / n from the closed form. The 2i/u term cancels against the others as
// u -> 0, so the evaluation runs in extended precision.
double eq_fraction(double u_in, double eta_in) {
  using T = long double;
  using C = std::complex<T>;
  const T u = u_in, eta = eta_in;
  const C I(0, 1);
  const C e = std::exp(I * eta), em = std::exp(-I * eta);
  const C a = T(1) + I * e * u;
  const C b = T(1) - I * em * u;
  const C m = b / a;
  const C sa = std::sqrt(a);
  const C t1 = T(2) * std::cos(eta) * ellint_k(m) / sa;
  const C t2 = (T(2) * I / u) * sa * ellint_e(m);
  const C t3 = I * e * b * ellint_pi(I * em * u, T(2) * I * u * std::cos(eta) / a) / sa;
  return static_cast<double>(T(0.5) - (t1 + t2 + t3).real() / std::numbers::pi_v<T>);
}

void check_dimer_args(double n, double u_alpha) {
  if (!(n > 0.0)) throw std::invalid_argument("dimer particle number must be positive");
  if (!(u_alpha >= 0.0)) throw std::domain_error("u_alpha must be non-negative");
}

}  // namespace

double ClassicalState::norm() const {
  double s = 0.0;
  for (const auto& x : a) s += std::norm(x);
  return s;
}

double ClassicalState::dimer_population(int alpha) const {
  return std::norm(a[kPlus.at(alpha)]) + std::norm(a[kMinus.at(alpha)]);
}

Amplitudes mean_field_rhs(const ClassicalState& s, const ModelParams& params) {
  const Eigen::Matrix4d M = hopping_matrix(params);
  const double U = params.U() / params.Omega();
  Amplitudes d{};
  for (int k = 0; k < 4; ++k) {
    std::complex<double> h = U * std::norm(s.a[k]) * s.a[k];
    for (int l = 0; l < 4; ++l) h += M(k, l) * s.a[l];
    d[k] = std::complex<double>(0.0, -1.0) * h;
  }
  return d;
}

double mean_field_energy(const ClassicalState& s, const ModelParams& params) {
  const Eigen::Matrix4d M = hopping_matrix(params);
  const double U = params.U() / params.Omega();
  double e = 0.0;
  for (int k = 0; k < 4; ++k) {
    e += 0.5 * U * std::norm(s.a[k]) * std::norm(s.a[k]);
    for (int l = 0; l < 4; ++l) e += M(k, l) * (std::conj(s.a[k]) * s.a[l]).real();
  }
  return e;
}

double dimer_energy(const ClassicalState& s, const ModelParams& params, int alpha) {
  const auto& ap = s.a[kPlus.at(alpha)];
  const auto& am = s.a[kMinus.at(alpha)];
  const double U = params.U() / params.Omega();
  const double n = std::norm(ap) + std::norm(am);
  return -(std::conj(ap) * am).real() + 0.5 * U * (std::norm(ap) * std::norm(ap) + std::norm(am) * std::norm(am)) -
         0.25 * U * n * n;
}

ClassicalState propagate(const ClassicalState& initial, const ModelParams& params, double t, double step) {
  if (!(step > 0.0) || t < 0.0) throw std::invalid_argument("propagate needs step > 0 and t >= 0");
  const auto steps = static_cast<long>(std::ceil(t / step - 1e-12));
  ClassicalState s = initial;
  if (steps == 0) return s;
  const SplitStepper stepper(params, t / static_cast<double>(steps));
  WideAmplitudes a = widen(s.a);
  for (long k = 0; k < steps; ++k) stepper.step(a);
  s.a = narrow(a);
  s.t = initial.t + t;
  return s;
}

Trajectory integrate(const ClassicalState& initial, const ModelParams& params, const IntegratorOptions& options) {
  if (!(options.dt_out > 0.0) || !(options.t_max >= 0.0)) throw std::invalid_argument("invalid time grid");
  const double ratio = options.t_max / options.dt_out;
  const auto samples = static_cast<long>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(samples)) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("t_max must be a multiple of dt_out");
  }
  const double E0 = mean_field_energy(initial, params);
  const double N0 = initial.norm();

  double h = options.initial_step;
  double best_energy = INFINITY, best_norm = INFINITY;
  while (h >= options.min_step) {
    const long substeps = std::max(1L, static_cast<long>(std::ceil(options.dt_out / h - 1e-12)));
    const double step = options.dt_out / static_cast<double>(substeps);
    const SplitStepper stepper(params, step);

    Trajectory traj;
    traj.step = step;
    traj.samples.reserve(static_cast<std::size_t>(samples) + 1);
    traj.samples.push_back(initial);
    ClassicalState s = initial;
    WideAmplitudes a = widen(s.a);
    bool ok = true;
    for (long k = 1; k <= samples && ok; ++k) {
      for (long m = 0; m < substeps; ++m) stepper.step(a);
      s.a = narrow(a);
      s.t = initial.t + static_cast<double>(k) * options.dt_out;
      traj.energy_drift = std::max(traj.energy_drift, relative_drift(mean_field_energy(s, params), E0));
      traj.norm_drift = std::max(traj.norm_drift, relative_drift(s.norm(), N0));
      ok = traj.energy_drift <= options.tolerance && traj.norm_drift <= options.tolerance;
      traj.samples.push_back(s);
    }
    if (ok) return traj;
    best_energy = std::min(best_energy, traj.energy_drift);
    best_norm = std::min(best_norm, traj.norm_drift);
    h *= 0.5;
  }
  std::ostringstream msg;
  msg << "integration tolerance " << options.tolerance << " not reached down to step " << options.min_step
      << " (best energy drift " << best_energy << ", norm drift " << best_norm << ")";
  throw NumericError(msg.str());
}

std::pair<double, double> dimer_energy_range(double n, double u_alpha) {
  check_dimer_args(n, u_alpha);
  const double hi = u_alpha <= 1.0 ? 0.5 * n : 0.25 * n * (u_alpha + 1.0 / u_alpha);
  return {-0.5 * n, hi};
}

double semiclassical_action(double n, double E, double u_alpha) {
  check_dimer_args(n, u_alpha);
  if (u_alpha > 1.0) {
    throw std::domain_error("closed-form action needs u_alpha <= 1; use action_oracle for self-trapped contours");
  }
  const double x = 2.0 * E / n;
  if (std::abs(x) > 1.0 + 1e-12) throw std::domain_error("dimer energy outside [-n/2, n/2]");
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return n;
  if (u_alpha == 0.0) return 0.5 * n * (1.0 + x);
  return n * eq_fraction(u_alpha, std::asin(x));
}

double action_oracle(double n, double E, double u_alpha) {
  const auto [lo, hi] = dimer_energy_range(n, u_alpha);
  const double slack = 1e-12 * std::max(1.0, n);
  if (E < lo - slack || E > hi + slack) throw std::domain_error("energy outside the classical range of the dimer");
  if (E <= lo) return 0.0;
  if (E >= hi) return n;

  // For fixed z the allowed angles satisfy cos(phi) > c(z); integrate the
  // measure 2 arccos(c) over z in [0, 1] and double by z -> -z symmetry.
  const double q = 0.25 * u_alpha * n;
  auto c_of = [&](double z) { return (q * z * z - E) / (0.5 * n * std::sqrt(std::max(0.0, 1.0 - z * z))); };
  auto measure = [&](double z) {
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    if (s == 0.0) return q * z * z < E ? 2.0 * pi : 0.0;
    return 2.0 * std::acos(std::clamp(c_of(z), -1.0, 1.0));
  };
  std::vector<double> cuts{0.0, 1.0};
  for (double sign : {1.0, -1.0}) {
    auto g = [&](double z) { return q * z * z - E - sign * 0.5 * n * std::sqrt(std::max(0.0, 1.0 - z * z)); };
    for (double r : scan_roots(g)) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-15; }), cuts.end());

  boost::math::quadrature::tanh_sinh<double> integrator;
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    area += integrator.integrate(measure, cuts[k], cuts[k + 1], 1e-14);
  }
  return n * 2.0 * area / (4.0 * pi);
}

double invert_action(double j_target, double n, double u_alpha) {
  check_dimer_args(n, u_alpha);
  if (!(j_target >= 0.0 && j_target <= n)) throw std::domain_error("action target outside [0, n]");
  const auto [lo, hi] = dimer_energy_range(n, u_alpha);
  if (j_target == 0.0) return lo;
  if (j_target == n) return hi;
  const bool closed = u_alpha <= 1.0;
  auto f = [&](double E) {
    return (closed ? semiclassical_action(n, E, u_alpha) : action_oracle(n, E, u_alpha)) - j_target;
  };
  const double E = bracket_root(f, lo, hi);
  const double residual = std::abs(f(E));
  if (residual > 1e-8) {
    throw NumericError("action inversion residual " + std::to_string(residual) + " above 1e-8");
  }
  return E;
}

namespace {

// z >= 0 on the contour H(z, phi) = E, closest to the equator.
double contour_z(double n, double u, double E, double phi, const char* which) {
  const auto roots = scan_roots([&](double z) { return contour_energy(n, u, z, phi) - E; }, 4000);
  if (!roots.empty()) return roots.front();

  // Report the set of angles at which the contour is reachable.
  std::ostringstream msg;
  msg << which << " dimer: energy " << E << " not reached at intradimer angle " << phi << "; feasible angles:";
  bool inside = false, any = false;
  double start = 0.0;
  const int grid = 720;
  for (int k = 0; k <= grid; ++k) {
    const double ang = -pi + 2.0 * pi * k / grid;
    double mn = INFINITY, mx = -INFINITY;
    for (int m = 0; m <= 400; ++m) {
      const double h = contour_energy(n, u, m / 400.0, ang);
      mn = std::min(mn, h);
      mx = std::max(mx, h);
    }
    const bool ok = mn <= E && E <= mx;
    if (ok && !inside) start = ang;
    if (!ok && inside) {
      msg << " [" << start << ", " << -pi + 2.0 * pi * (k - 1) / grid << "]";
      any = true;
    }
    inside = ok;
  }
  if (inside) {
    msg << " [" << start << ", " << pi << "]";
    any = true;
  }
  if (!any) msg << " none";
  throw std::domain_error(msg.str());
}

}  // namespace

ClassicalState init_from_actions(const ModelParams& params, const LaunchSpec& launch) {
  const double N = params.N();
  const double U = params.U() / params.Omega();
  const std::array<double, 2> n{0.5 * (N + launch.n), 0.5 * (N - launch.n)};
  const std::array<double, 2> j{0.5 * (launch.J + launch.j), 0.5 * (launch.J - launch.j)};
  const std::array<double, 2> phi{launch.phi_left, launch.phi_right};
  const std::array<int, 2> zsign{launch.z_sign_left, launch.z_sign_right};
  const std::array<double, 2> theta{launch.phi_lr, 0.0};
  const std::array<const char*, 2> names{"left", "right"};

  ClassicalState s;
  for (int alpha = 0; alpha < 2; ++alpha) {
    if (!(n[alpha] > 0.0)) throw std::invalid_argument(std::string(names[alpha]) + " dimer would be empty");
    if (!(j[alpha] >= 0.0 && j[alpha] <= n[alpha])) {
      throw std::invalid_argument(std::string(names[alpha]) + " dimer action outside [0, n_alpha]");
    }
    if (zsign[alpha] != 1 && zsign[alpha] != -1) throw std::invalid_argument("z sign must be +1 or -1");
    const double u = U * n[alpha];
    const double E = invert_action(j[alpha], n[alpha], u);
    const double z = zsign[alpha] * contour_z(n[alpha], u, E, phi[alpha], names[alpha]);
    const double amp_p = std::sqrt(0.5 * n[alpha] * (1.0 + z));
    const double amp_m = std::sqrt(std::max(0.0, 0.5 * n[alpha] * (1.0 - z)));
    s.a[kPlus[alpha]] = std::polar(amp_p, theta[alpha] - 0.5 * phi[alpha]);
    s.a[kMinus[alpha]] = std::polar(amp_m, theta[alpha] + 0.5 * phi[alpha]);
  }

  const ObservablePoint o = observe(s, params);
  const double jl = 0.5 * (o.J + o.j), jr = 0.5 * (o.J - o.j);
  if (std::abs(jl - j[0]) > 1e-6 || std::abs(jr - j[1]) > 1e-6) {
    throw NumericError("launch state misses the requested actions (" + std::to_string(jl) + ", " +
                       std::to_string(jr) + ")");
  }
  return s;
}

ObservablePoint observe(const ClassicalState& s, const ModelParams& params) {
  const double U = params.U() / params.Omega();
  ObservablePoint o;
  o.t = s.t;
  std::array<double, 2> jj{};
  for (int alpha = 0; alpha < 2; ++alpha) {
    const double n = s.dimer_population(alpha);
    if (n < 1e-12) continue;
    const double u = U * n;
    const auto [lo, hi] = dimer_energy_range(n, u);
    double E = dimer_energy(s, params, alpha);
    if (E < lo || E > hi) {
      if (E < lo - 1e-12 * n || E > hi + 1e-12 * n) o.clamped = true;
      E = std::clamp(E, lo, hi);
    }
    jj[alpha] = u <= 1.0 ? semiclassical_action(n, E, u) : action_oracle(n, E, u);
  }
  o.n = s.dimer_population(0) - s.dimer_population(1);
  o.j = jj[0] - jj[1];
  o.J = jj[0] + jj[1];
  o.E = mean_field_energy(s, params);
  return o;
}

std::vector<ObservablePoint> trajectory_observables(const Trajectory& traj, const ModelParams& params) {
  std::vector<ObservablePoint> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.push_back(observe(s, params));
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<ObservablePoint>& series) {
  CsvWriter w(os, "trajectory", 1, {"t", "n", "j", "J", "E", "clamped"});
  for (const auto& p : series) {
    w << p.t << p.n << p.j << p.J << p.E << p.clamped;
    w.end_row();
  }
}

}  // namespace dimers
