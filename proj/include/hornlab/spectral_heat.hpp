#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hornlab/frequency_parabolic.hpp"
#include "hornlab/horn_geometry.hpp"
#include "hornlab/numerics/fit.hpp"
#include "hornlab/radial_modes.hpp"

namespace hornlab {

/// Dirichlet eigenpair of the radial operator on the truncated horn (0, r_out] with the
/// tip-decaying branch selected. g > 0 near the tip, ||g||_{L^2(w dr)} = 1.
struct EigenPair {
  double nu = 0.0;
  int i = 1;
  double r_out = 0.0;
  std::shared_ptr<const RadialProfile> g;
  int zeros = 0;                ///< sign changes of g inside (0, r_out)
  double norm_defect = 0.0;     ///< |int g^2 w dr - 1| by an independent quadrature in r
  double dirichlet_defect = 0.0;  ///< |g(r_out)| / max |g| on the profile grid
  double sup_abs = 0.0;         ///< max |g| on the profile grid
};

struct EigenOptions {
  double r_min = 1e-3;     ///< smallest radius represented in each g
  double ode_tol = 1e-11;
  double rel_width = 1e-10;  ///< bracket width relative to nu at which refinement stops
  int n_grid = 400;
  int sweep_points = 96;     ///< log-uniform seeds per decade of nu
  int max_doublings = 40;
};

/// Shooting data at spectral parameter nu: k(s_out)/|(k, k')| and the Sturm count of
/// zeros of the decaying solution inside the truncated horn.
struct ShotResult {
  double boundary;
  int zeros;
};
ShotResult shoot_dirichlet(const HornParams& p, int i, double nu, double r_out, double ode_tol);

/// First `count` eigenpairs (i >= 1). Seeds by a log-uniform sweep of the Sturm count,
/// splits brackets by bisection on the count, then refines each root of the boundary
/// value to relative width opts.rel_width. Throws NumericalError when the search budget
/// is exhausted.
std::vector<EigenPair> dirichlet_eigenvalues(const HornParams& p, int i, double r_out, int count,
                                             const EigenOptions& opts = {});

struct WeylFit {
  double C1;        ///< largest C1 with C1 j^{2/N} <= nu_j on the list
  double C2;        ///< smallest C2 with nu_j <= C2 j^2 on the list
  double exponent;  ///< least-squares slope of log nu_j against log j
};
/// Needs at least 8 eigenvalues.
WeylFit weyl_check(std::span<const EigenPair> eigs, const HornParams& p);

/// Majorant of sum_{j>k} |c_j| nu_j e^{-nu_j t} with |c_j| <= coeff_bound: the computed
/// nu_j up to the list length, the fitted Weyl floor nu_j >= C1 j^{2/N} beyond it, and an
/// incomplete-gamma bound for the remainder. k may equal the list length.
double tail_bound(std::span<const EigenPair> eigs, int k, double t, const HornParams& p,
                  double coeff_bound = 1.0);

struct SignedLog {
  int sign = 0;  ///< -1, 0, +1
  double log_mag = 0.0;
};

/// Truncated series f(r, t) = sum_j c_j e^{-nu_j t} g_j(r) for one spherical index,
/// evaluated by signed log-sum-exp. As a CaloricField it is u = f(r, t) phi_i, with
/// u = 0 beyond r_out; any real t is admissible there (finite sums are entire in t).
class CaloricSeries final : public CaloricField {
 public:
  /// Explicit coefficients; the coefficient bound is max |c_j|.
  CaloricSeries(std::vector<EigenPair> pairs, std::vector<double> coeffs);
  /// Coefficients c_j = int u0 g_j w dr; the coefficient bound is ||u0||_{L^2(w dr)}.
  static CaloricSeries from_initial_profile(std::vector<EigenPair> pairs,
                                            const std::function<double(double)>& u0);

  const std::vector<EigenPair>& pairs() const { return pairs_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  int truncation() const { return static_cast<int>(pairs_.size()); }
  double coeff_bound() const { return coeff_bound_; }
  /// Bound on the dropped tail sum_{j>K} |c_j g_j(r)| e^{-nu_j t}: tail_bound times
  /// C_g = max_j sup|g_j| / nu_j over the retained pairs.
  double tail_certificate(double t) const;

  /// sum_j c_j (-nu_j)^k e^{-nu_j t} g_j(r), and its r-derivative.
  SignedLog term_sum(int k, double r, double t) const;

  const HornParams& params() const override { return pairs_.front().g->params(); }
  int mode_index() const override { return pairs_.front().i; }
  double sphere_mass() const override { return 1.0; }
  double r_support() const override { return pairs_.front().r_out; }
  double r_floor() const override { return pairs_.front().g->r_lo(); }
  double sup_abs(double t) const override;
  ScaledValue sample(double r, double t) const override;

 private:
  std::vector<EigenPair> pairs_;
  std::vector<double> coeffs_;
  double coeff_bound_ = 0.0;
};

/// t > 0 required.
SignedLog evaluate_caloric(const CaloricSeries& s, double r, double t);
SignedLog time_derivative(const CaloricSeries& s, int k, double r, double t);

struct AnalyticityReport {
  double radius;                  ///< exp(-slope) of log|a_k| over k in [kmax/2, kmax]; +inf for u = 0
  std::vector<double> log_coeffs; ///< log|a_k|, a_k = d_t^k u(r0, t0) / k!, k = 0..kmax
};
AnalyticityReport analyticity_probe(const CaloricSeries& s, double r0, double t0, int kmax);

/// Fit of log|f(r, t)| against r^{-eps} on r_grid (points where f = 0 are an error).
/// Every pair must have i >= 1.
num::LineFit caloric_decay_check(const CaloricSeries& s, std::span<const double> r_grid, double t);

}  // namespace hornlab
