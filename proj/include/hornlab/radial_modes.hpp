#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "hornlab/horn_geometry.hpp"
#include "hornlab/numerics/fit.hpp"
#include "hornlab/numerics/ode.hpp"

namespace hornlab {

// Tip-side radial modes. With s = r^{-eps} and f_i(r) = k(s) s^a, a = (c-1-eps)/(2 eps),
// the mode ODE f'' + (c/r) f' - 4 mu_i r^{-2-2eps} f + mu f = 0 becomes
//   k''(s) = q(s) k(s),   q(s) = A s^{-2} + beta^2 - (mu/eps^2) s^{-2/eps-2},
// with A = a(a+1) and beta = sqrt(4 mu_i)/eps.

/// beta = sqrt(4 mu_i) / eps, the leading decay rate in s.
double k_rate(const HornParams& p, int i);

/// A s^{-2} - (mu/eps^2) s^{-2/eps-2}: the part of q that r_mu confines to [0, 1].
double k_bracket(const HornParams& p, double mu, double s);

/// q(s) of the k-equation.
double k_potential(const HornParams& p, int i, double mu, double s);

/// Threshold r_mu = max(sqrt(A), (mu / (eps^2 A))^{eps/2}); for s >= r_mu,
/// 0 <= k_bracket <= 1. mu = 0 keeps only the first branch.
double r_mu(const HornParams& p, double mu);

/// s_max = r_mu + 10/beta + 5.
double default_s_max(const HornParams& p, int i, double mu);

/// Growing branch on [r_mu, s_max] with k(r_mu) = k'(r_mu) = 1. State (k, k').
num::DenseSolution solve_k1(const HornParams& p, int i, double mu, double s_max,
                            double tol = 1e-12);

struct K2Solution {
  num::DenseSolution sol;  ///< state (k, k') on [r_mu, s_max], integrated from s_max down
  double tail_integral;    ///< int_{s_max}^inf k1^{-2} used as starting data
  double tail_bound;       ///< certified majorant of that integral from the k1 lower bound
  double tail_relative;    ///< tail_bound / int_{r_mu}^inf k1^{-2}
};

/// Decaying branch k2 = k1 int_s^inf k1^{-2}: the linear ODE integrated backwards from
/// s_max with data fixed by the tail integral. Wronskian W(k1, k2) = -1. Throws
/// ConsistencyError if the certified tail is not below 1e-12 relative.
K2Solution solve_k2(const HornParams& p, int i, double mu, double s_max, double tol = 1e-12);

/// Decaying solution of k'' = q k in the scaled form k = e^{sigma} z0, k' = e^{sigma} z1,
/// integrated backwards from far in the tip so that nothing under- or overflows.
/// Works for any spectral parameter, including where q < 0 (oscillatory region).
class ScaledBranch {
 public:
  ScaledBranch(const HornParams& p, int i, double mu, double s_lo, double s_hi, double tol);

  double s_lo() const { return sol_.lo(); }
  double s_far() const { return sol_.hi(); }
  /// (log scale, z0, z1) with k = e^{ls} z0, k' = e^{ls} z1, before any normalisation.
  void eval(double s, double& log_scale, double& z0, double& z1) const;
  /// Sign changes of k strictly inside (s_lo, s_far) along accepted steps.
  int zero_count() const;
  const num::DenseSolution& solution() const { return sol_; }

 private:
  num::DenseSolution sol_;
};

/// f = e^{log_scale} value, f' = e^{log_scale} deriv.
struct ScaledValue {
  double log_scale = 0.0;
  double value = 0.0;
  double deriv = 0.0;
};

/// Underflow-safe radial mode on a grid uniform in s = r^{-eps} (increasing s means
/// decreasing r), with a continuous evaluator for off-grid radii.
class RadialProfile {
 public:
  using Evaluator = std::function<ScaledValue(double r)>;

  RadialProfile(const HornParams& p, int i, double mu, double r_lo, double r_hi, int n_grid,
                Evaluator eval);

  const HornParams& params() const { return params_; }
  int mode_index() const { return i_; }
  double mu() const { return mu_; }
  double r_lo() const { return r_lo_; }
  double r_hi() const { return r_hi_; }

  const std::vector<double>& s_grid() const { return s_; }
  const std::vector<double>& log_mag() const { return log_mag_; }
  const std::vector<int>& sign() const { return sign_; }
  const std::vector<double>& log_deriv() const { return log_deriv_; }
  std::vector<double> r_grid() const;

  /// Throws DomainError outside [r_lo, r_hi].
  ScaledValue eval(double r) const;
  /// log|f(r)|, -inf at a zero.
  double log_abs(double r) const;

  /// Columns r, s, sign, log_mag, log_deriv.
  void write_csv(std::ostream& out) const;

 private:
  HornParams params_;
  int i_;
  double mu_;
  double r_lo_, r_hi_;
  std::vector<double> s_, log_mag_, log_deriv_;
  std::vector<int> sign_;
  Evaluator eval_;
};

/// f_i = k2(r^{-eps}) r^{-(c-1-eps)/2} on [r_min, r_mu^{-1/eps}], k2 normalised by
/// W(k1, k2) = -1 at r_mu. Requires i >= 1.
RadialProfile profile_from_k2(const HornParams& p, int i, double mu, double r_min, int n_grid,
                              double tol = 1e-12);

/// f = 1 (i = 0, mu = 0).
RadialProfile constant_profile(const HornParams& p, double r_lo, double r_hi, int n_grid);

/// Regular radial part r^{(1-c)/2} J_{(c-1)/2}(r sqrt(mu)), unit coefficient.
double radial_mode_zero(const HornParams& p, double mu, double r);
RadialProfile bessel_profile(const HornParams& p, double mu, double r_lo, double r_hi, int n_grid);

/// Fit of log|f| against r^{-eps} over the profile grid (zeros skipped).
num::LineFit decay_exponent_fit(const RadialProfile& profile);

struct NormalizationBound {
  double computed;   ///< 1 / ||f_i||_{L^2(w dr)} over (0, r_mu^{-1/eps}]
  double bound;      ///< e^{(beta+2) r_mu} r_mu^{(1+eps)/eps}, constant taken as 1
  double log_ratio;  ///< log(computed / bound)
};
NormalizationBound normalization_bound(const HornParams& p, int i, double mu);

struct SandwichReport {
  int points = 0;
  bool k1_holds = true;
  bool k2_holds = true;
  double k1_margin = 0.0;  ///< min over points of the smaller log-gap to either k1 bound
  double k2_margin = 0.0;
  double wronskian_defect = 0.0;  ///< max |W(k1,k2) + 1|
  double k2_energy = 0.0;         ///< k2^2 + k2'^2 at r_mu
};

/// Pointwise two-sided exponential bounds on k1 and k2 at n_points uniform points of
/// [r_mu, r_mu + span], plus Abel's identity for the pair.
SandwichReport check_sandwich(const HornParams& p, int i, double mu, double span, int n_points);

}  // namespace hornlab
