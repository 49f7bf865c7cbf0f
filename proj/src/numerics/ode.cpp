#include "hornlab/numerics/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hornlab/errors.hpp"

namespace hornlab::num {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output (Hairer & Wanner, DOPRI5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::size_t DenseSolution::locate(double x) const {
  const bool forward = xs_.back() >= xs_.front();
  if (forward) {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t k = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    return std::min(k, hs_.size() - 1);
  }
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x, std::greater<>());
  std::size_t k = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  return std::min(k, hs_.size() - 1);
}

void DenseSolution::state_into(double x, std::span<double> out) const {
  if (!(x >= lo() && x <= hi())) {
    std::ostringstream msg;
    msg << "DenseSolution: x = " << x << " outside span [" << lo() << ", " << hi() << "]";
    throw DomainError(msg.str());
  }
  if (hs_.empty()) {
    std::copy_n(ynodes_.begin(), dim_, out.begin());
    return;
  }
  const std::size_t k = locate(x);
  const double theta = (x - xs_[k]) / hs_[k];
  const double theta1 = 1.0 - theta;
  const double* r = rcont_.data() + 5 * dim_ * k;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double r1 = r[i], r2 = r[dim_ + i], r3 = r[2 * dim_ + i], r4 = r[3 * dim_ + i],
                 r5 = r[4 * dim_ + i];
    out[i] = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
  }
}

DenseSolution::Sample DenseSolution::eval(double x) const {
  Sample s{std::vector<double>(dim_), std::vector<double>(dim_)};
  state_into(x, s.y);
  field_(x, s.y, s.dy);
  return s;
}

DenseSolution integrate_ode(OdeField field, double a, double b, std::span<const double> y0,
                            double tol) {
  OdeOptions opts;
  opts.rtol = tol;
  opts.atol = tol;
  return integrate_ode(std::move(field), a, b, y0, opts);
}

DenseSolution integrate_ode(OdeField field, double a, double b, std::span<const double> y0,
                            const OdeOptions& opts) {
  if (!(opts.rtol > 0.0) || opts.atol < 0.0) throw DomainError("integrate_ode: tol > 0 required");
  const std::size_t n = y0.size();
  DenseSolution sol;
  sol.field_ = field;
  sol.dim_ = n;
  sol.rtol_ = opts.rtol;
  sol.xs_.push_back(a);
  sol.ynodes_.assign(y0.begin(), y0.end());
  if (a == b) return sol;

  const double dir = b > a ? 1.0 : -1.0;
  std::vector<double> y(y0.begin(), y0.end()), ynew(n), ytmp(n), err(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

  field(a, y, k1);
  double h = opts.initial_step;
  if (!(h > 0.0)) {
    const double scale = opts.atol + opts.rtol * inf_norm(y);
    const double d0 = inf_norm(y) / scale;
    const double d1n = inf_norm(k1) / scale;
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min(h, std::abs(b - a));
  }
  h = std::min(h, opts.max_step);

  double x = a;
  std::size_t nstep = 0;
  bool last_rejected = false;
  while (dir * (b - x) > 0.0) {
    if (++nstep > opts.max_steps) {
      throw IntegrationError("integrate_ode: step budget exhausted", x);
    }
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      std::ostringstream msg;
      msg << "integrate_ode: step size underflow at x = " << x;
      throw IntegrationError(msg.str(), x);
    }
    bool final_step = false;
    if (h >= std::abs(b - x)) {
      h = std::abs(b - x);
      final_step = true;
    }
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
    field(x + c2 * hs, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    field(x + c3 * hs, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    field(x + c4 * hs, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    field(x + c5 * hs, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double xnew = final_step ? b : x + hs;
    field(xnew, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    field(xnew, ynew, k7);

    for (std::size_t i = 0; i < n; ++i)
      err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double scale = opts.atol + opts.rtol * std::max(inf_norm(y), inf_norm(ynew));
    double en = inf_norm(err) / scale;
    if (!std::isfinite(en)) en = 1e10;

    if (en <= 1.0) {
      const std::size_t base = sol.rcont_.size();
      sol.rcont_.resize(base + 5 * n);
      double* r = sol.rcont_.data() + base;
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = ynew[i] - y[i];
        const double bspl = hs * k1[i] - ydiff;
        r[i] = y[i];
        r[n + i] = ydiff;
        r[2 * n + i] = bspl;
        r[3 * n + i] = ydiff - hs * k7[i] - bspl;
        r[4 * n + i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                             d7 * k7[i]);
      }
      sol.hs_.push_back(hs);
      sol.xs_.push_back(xnew);
      sol.ynodes_.insert(sol.ynodes_.end(), ynew.begin(), ynew.end());
      x = xnew;
      y.swap(ynew);
      k1.swap(k7);
      double fac = en == 0.0 ? 5.0 : 0.9 * std::pow(en, -0.2);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h = std::min(h * fac, opts.max_step);
      last_rejected = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
    }
  }
  return sol;
}

}  // namespace hornlab::num
