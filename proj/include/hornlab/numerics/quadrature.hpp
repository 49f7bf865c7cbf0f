#pragma once

#include <cstddef>
#include <functional>

namespace hornlab::num {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  ///< estimated absolute error (QUADPACK-style, conservative)
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod quadrature on [a, b].
/// Converged when error <= max(abs_tol, rel_tol * |value|). Integrable endpoint
/// singularities are handled by repeated bisection (nodes never touch the ends).
/// Exhausting the interval budget throws QuadratureError with the best estimate.
QuadResult quad_adaptive(const std::function<double(double)>& f, double a, double b,
                         const QuadOptions& opts);

/// abs_tol = rel_tol = tol.
QuadResult quad_adaptive(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace hornlab::num
