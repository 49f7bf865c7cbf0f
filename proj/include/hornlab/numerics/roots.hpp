#pragma once

#include <functional>

namespace hornlab::num {

/// Brent's method on a sign-changing bracket [a, b]; falls back to bisection when
/// interpolation stalls. Stops once the bracket is narrower than tol or f hits 0.
/// Throws NumericalError when f(a) and f(b) share a sign.
double find_root_bracketed(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace hornlab::num
