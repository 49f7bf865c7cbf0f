#include "hornlab/numerics/fit.hpp"

#include <algorithm>
#include <cmath>

#include "hornlab/errors.hpp"

namespace hornlab::num {

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("fit_line: xs and ys differ in length");
  if (xs.size() < 2) throw DomainError("fit_line: at least two points required");
  const double m = static_cast<double>(xs.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xbar += xs[k];
    ybar += ys[k];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0, xscale = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - xbar;
    sxx += dx * dx;
    sxy += dx * (ys[k] - ybar);
    xscale = std::max(xscale, std::abs(xs[k]));
  }
  if (!(sxx > 1e-28 * m * xscale * xscale) || !(sxx > 0.0))
    throw DomainError("fit_line: abscissae are degenerate (all equal)");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  for (std::size_t k = 0; k < xs.size(); ++k)
    fit.max_residual = std::max(fit.max_residual, std::abs(ys[k] - fit.slope * xs[k] - fit.intercept));
  return fit;
}

}  // namespace hornlab::num
