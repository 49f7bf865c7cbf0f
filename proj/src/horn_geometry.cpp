#include "hornlab/horn_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hornlab/errors.hpp"
#include "hornlab/numerics/special_functions.hpp"

namespace hornlab {

double drift_exponent(int n, double bigN, double eps, double eta) {
  return (n - 1) * (1.0 + eps) + (bigN - n) * (1.0 - eta);
}

HornParams make_horn_params(int n, double bigN, double eps, double eta) {
  if (n < 2) throw DomainError("horn params: n >= 2 required, got n = " + std::to_string(n));
  if (!(bigN >= n))
    throw DomainError("horn params: N >= n required, got N = " + std::to_string(bigN));
  if (!(eps > 0.0)) throw DomainError("horn params: eps > 0 required");
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("horn params: 0 < eta < 1 required");

  HornParams p{n, bigN, eps, eta, drift_exponent(n, bigN, eps, eta)};
  // c - 1 - eps is a difference of O(1) numbers; anything at rounding level is zero.
  const double gap = p.c - 1.0 - eps;
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, p.c);
  if (!(gap > slack)) {
    throw DomainError("horn params: c - 1 - eps > 0 required, got c = " + std::to_string(p.c) +
                      ", c - 1 - eps = " + std::to_string(gap <= slack ? 0.0 : gap));
  }
  return p;
}

double measure_weight(const HornParams& p, double r) { return std::exp(log_measure_weight(p, r)); }

double log_measure_weight(const HornParams& p, double r) {
  if (!(r > 0.0)) throw DomainError("measure_weight: r > 0 required");
  return (1 - p.n) * std::numbers::ln2 + p.c * std::log(r);
}

double laplacian_radial_power(const HornParams& p, double alpha) {
  return alpha * (alpha + p.c - 1.0);
}

std::pair<double, double> hess_r2_multipliers(const HornParams& p) {
  return {2.0, 2.0 * (1.0 + p.eps)};
}

double angular_coupling(const HornParams& p, double r) {
  if (!(r > 0.0)) throw DomainError("angular_coupling: r > 0 required");
  return 4.0 * std::pow(r, -2.0 - 2.0 * p.eps);
}

double sphere_eigenvalue(int n, int i) { return static_cast<double>(i) * (n + i - 2); }

double sphere_area(int n) {
  const double half = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half) / num::gamma(half);
}

}  // namespace hornlab
