#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace hornlab::num {

/// Right-hand side dy/dx = field(x, y), written into `dydx`.
using OdeField = std::function<void(double x, std::span<const double> y, std::span<double> dydx)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  ///< 0 selects a step from the field scale
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

/// Continuous solution of an initial value problem on [a, b] (b < a integrates
/// backwards). Immutable after construction; eval() is safe to call concurrently.
class DenseSolution {
 public:
  struct Sample {
    std::vector<double> y;
    std::vector<double> dy;
  };

  double start() const { return xs_.front(); }
  double end() const { return xs_.back(); }
  double lo() const { return std::min(start(), end()); }
  double hi() const { return std::max(start(), end()); }
  std::size_t dim() const { return dim_; }
  double tolerance() const { return rtol_; }
  std::size_t steps() const { return hs_.size(); }

  /// State and derivative at x; x outside the span throws DomainError.
  Sample eval(double x) const;
  void state_into(double x, std::span<double> out) const;

  /// Accepted step endpoints, in integration order, and the states there.
  const std::vector<double>& nodes() const { return xs_; }
  std::span<const double> node_state(std::size_t k) const {
    return {ynodes_.data() + k * dim_, dim_};
  }

 private:
  friend DenseSolution integrate_ode(OdeField field, double a, double b,
                                     std::span<const double> y0, const OdeOptions& opts);
  std::size_t locate(double x) const;

  OdeField field_;
  std::size_t dim_ = 0;
  double rtol_ = 0.0;
  std::vector<double> xs_;
  std::vector<double> hs_;
  std::vector<double> ynodes_;
  std::vector<double> rcont_;  // 5 * dim per step
};

/// Adaptive Dormand-Prince 5(4) with FSAL and the 4th-order continuous extension.
/// The embedded error of each step is kept below atol + rtol * |y|_inf.
/// Step-size underflow throws IntegrationError carrying the failure abscissa.
DenseSolution integrate_ode(OdeField field, double a, double b, std::span<const double> y0,
                            const OdeOptions& opts);

/// Convenience overload with rtol = atol = tol.
DenseSolution integrate_ode(OdeField field, double a, double b, std::span<const double> y0,
                            double tol);

}  // namespace hornlab::num
