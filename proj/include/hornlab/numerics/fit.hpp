#pragma once

#include <span>

namespace hornlab::num {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  ///< sup |y - (slope x + intercept)|
};

/// Ordinary least squares y ~ slope x + intercept. Needs two distinct xs.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace hornlab::num
