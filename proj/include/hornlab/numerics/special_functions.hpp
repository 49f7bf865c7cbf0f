#pragma once

namespace hornlab::num {

/// Gamma function for real argument (Lanczos, g = 7, with reflection below 1/2).
/// Relative accuracy about 1e-15 on (0, 30); poles at non-positive integers throw.
double gamma(double x);

/// log|Gamma(x)| for x > 0.
double log_gamma(double x);

/// Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a), a > 0, x >= 0.
double gamma_q(double a, double x);

/// log Gamma(a, x) (unregularized upper incomplete gamma), safe for large x.
double log_upper_gamma(double a, double x);

struct BesselJY {
  double j;
  double y;
  double jp;  ///< dJ/dx
  double yp;  ///< dY/dx
};

/// J_nu, Y_nu and derivatives for nu >= 0, x > 0 (Temme series for small x,
/// Steed's continued fractions otherwise).
BesselJY bessel_jy(double nu, double x);

/// J_nu(x), nu >= 0, x >= 0. Relative accuracy about 1e-13 away from zeros for nu <= 20, x <= 100.
double bessel_j(double nu, double x);

/// Y_nu(x), nu >= 0, x > 0 (x = 0 is a pole and throws).
double bessel_y(double nu, double x);

/// x^{-nu} J_nu(x), finite at x = 0 where it equals 1 / (2^nu Gamma(nu + 1)).
double bessel_j_scaled(double nu, double x);

}  // namespace hornlab::num
