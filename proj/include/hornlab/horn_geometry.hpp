#pragma once

#include <utility>

namespace hornlab {

/// Dimensional and shape data of the metric horn
///   dr^2 + (r^{1+eps}/2)^2 g_{S^{n-1}},  measure weight r^{(N-n)(1-eta)}.
/// `c` is the drift exponent (n-1)(1+eps) + (N-n)(1-eta); it is always derived,
/// never supplied.
struct HornParams {
  int n = 3;
  double bigN = 4.0;
  double eps = 0.5;
  double eta = 0.25;
  double c = 3.75;

  /// (c - 1 - eps) / (2 eps): exponent linking g_i and k_i.
  double k_shift() const { return (c - 1.0 - eps) / (2.0 * eps); }
  /// k_shift * (k_shift + 1): coefficient of s^{-2} in the k-equation.
  double k_potential() const {
    const double a = k_shift();
    return a * (a + 1.0);
  }
};

double drift_exponent(int n, double bigN, double eps, double eta);

/// Validates ranges and computes c. Throws DomainError naming the violated constraint.
HornParams make_horn_params(int n, double bigN, double eps, double eta);

/// Radial density w(r) = 2^{1-n} r^c of the weighted measure against the round
/// unit-sphere measure.
double measure_weight(const HornParams& p, double r);
double log_measure_weight(const HornParams& p, double r);

/// Coefficient alpha (alpha + c - 1) with Delta r^alpha = coeff * r^{alpha-2}.
double laplacian_radial_power(const HornParams& p, double alpha);

/// (radial, spherical) multipliers of Hess(r^2) = 2 dr^2 + 2(1+eps) f^2 g_sphere.
std::pair<double, double> hess_r2_multipliers(const HornParams& p);

/// 4 r^{-2-2eps}: the factor in front of the sphere Laplacian.
double angular_coupling(const HornParams& p, double r);

/// mu_i = i (n + i - 2).
double sphere_eigenvalue(int n, int i);

/// Area of the round unit sphere S^{n-1}.
double sphere_area(int n);

}  // namespace hornlab
