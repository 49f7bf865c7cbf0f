#pragma once

#include <span>

#include "hornlab/frequency_elliptic.hpp"
#include "hornlab/horn_geometry.hpp"
#include "hornlab/numerics/fit.hpp"
#include "hornlab/radial_modes.hpp"

namespace hornlab {

/// Tip-centred backward weight log G = -((c+1)/2) log(-t) + r^2/(4t).
struct BackwardKernel {
  HornParams params;
  double exponent = 2.375;  ///< (c+1)/2
};

BackwardKernel make_backward_kernel(const HornParams& p);

/// t >= 0 throws DomainError.
double kernel_log(const BackwardKernel& g, double r, double t);

/// A caloric function u(r, theta, t) = U(r, t) phi(theta) sampled for the parabolic
/// quantities. phi is a spherical harmonic of index mode_index() whose squared
/// integral over the unit sphere is sphere_mass().
class CaloricField {
 public:
  virtual ~CaloricField() = default;

  virtual const HornParams& params() const = 0;
  virtual int mode_index() const = 0;
  virtual double sphere_mass() const = 0;
  /// u vanishes for r > r_support (Dirichlet cap); +inf for fields on the whole horn.
  virtual double r_support() const = 0;
  /// Smallest sampled radius; the slice below it is covered by a tail bound.
  virtual double r_floor() const = 0;
  /// Bound on sup_r |U(r, t)|, only needed when r_support is infinite.
  virtual double sup_abs(double t) const = 0;
  /// U = e^{log_scale} value, U_r = e^{log_scale} deriv at (r, t).
  virtual ScaledValue sample(double r, double t) const = 0;
};

/// u = 1 on the whole horn (phi = 1, so the sphere mass is the sphere area).
class UnitCaloric final : public CaloricField {
 public:
  explicit UnitCaloric(const HornParams& p) : p_(p) {}
  const HornParams& params() const override { return p_; }
  int mode_index() const override { return 0; }
  double sphere_mass() const override { return sphere_area(p_.n); }
  double r_support() const override;
  double r_floor() const override { return 0.0; }
  double sup_abs(double) const override { return 1.0; }
  ScaledValue sample(double, double) const override { return {0.0, 1.0, 0.0}; }

 private:
  HornParams p_;
};

struct ParabolicIDN {
  double I;
  double D;
  double N;      ///< I / D, formed from the same scaled integrals
  double log_D;  ///< log D, kept for when D underflows
  double tail_bound;  ///< relative majorant of the omitted Gaussian and tip slices
};

/// I(R) = R^2 int |grad u|^2 G dm and D(R) = int u^2 G dm on t = -R^2, in y = r/(2R).
/// rel_tol is the quadrature target. D = 0 throws NumericalError.
ParabolicIDN parabolic_IDN(const CaloricField& u, double R, double rel_tol = 1e-13);

/// Rows (R, I, D, N).
FrequencyScan parabolic_scan(const CaloricField& u, std::span<const double> R_grid);

struct IDRelation {
  double defect;           ///< |I(R) - (R/4)(D(R+h) - D(R-h))/(2h)|
  double relative_defect;  ///< defect / |I(R)|, or the raw defect when I = 0
};
IDRelation check_ID_relation(const CaloricField& u, double R, double h);

struct NBound {
  double defect;  ///< max shortfall of log N_{k+1} - log N_k below -2eps log(R_{k+1}/R_k)
  double C;       ///< max N R^{2eps}
  bool trivial;   ///< N = 0 on the whole grid
};
/// Mixed zero / non-zero N on the grid throws NumericalError.
NBound check_N_bound(const CaloricField& u, std::span<const double> R_grid);
NBound check_N_bound(const HornParams& p, const FrequencyScan& scan);

/// Fit of log D against 1 - (R / R_top)^{-2eps}.
num::LineFit check_D_lower(const CaloricField& u, std::span<const double> R_grid);
num::LineFit check_D_lower(const HornParams& p, const FrequencyScan& scan);

}  // namespace hornlab
