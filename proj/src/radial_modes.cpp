#include "hornlab/radial_modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "hornlab/errors.hpp"
#include "hornlab/io.hpp"
#include "hornlab/numerics/quadrature.hpp"
#include "hornlab/numerics/special_functions.hpp"

namespace hornlab {

namespace {

void require_mode(const HornParams& p, int i, const char* who) {
  if (i < 1) throw DomainError(std::string(who) + ": spherical index i >= 1 required");
  (void)p;
}

double log_abs_or_ninf(double v) {
  return v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(v));
}

}  // namespace

double k_rate(const HornParams& p, int i) {
  return std::sqrt(4.0 * sphere_eigenvalue(p.n, i)) / p.eps;
}

double k_bracket(const HornParams& p, double mu, double s) {
  const double A = p.k_potential();
  return A / (s * s) - mu / (p.eps * p.eps) * std::pow(s, -2.0 / p.eps - 2.0);
}

double k_potential(const HornParams& p, int i, double mu, double s) {
  const double beta = k_rate(p, i);
  return beta * beta + k_bracket(p, mu, s);
}

double r_mu(const HornParams& p, double mu) {
  if (!(mu >= 0.0)) throw DomainError("r_mu: mu >= 0 required");
  const double A = p.k_potential();
  const double first = std::sqrt(A);
  if (mu == 0.0) return first;
  return std::max(first, std::pow(mu / (p.eps * p.eps * A), 0.5 * p.eps));
}

double default_s_max(const HornParams& p, int i, double mu) {
  return r_mu(p, mu) + 10.0 / k_rate(p, i) + 5.0;
}

num::DenseSolution solve_k1(const HornParams& p, int i, double mu, double s_max, double tol) {
  require_mode(p, i, "solve_k1");
  const double r0 = r_mu(p, mu);
  if (!(s_max > r0)) throw DomainError("solve_k1: s_max > r_mu required");
  const double beta = k_rate(p, i);
  if (!((beta + 1.0) * (s_max - r0) < 600.0))
    throw DomainError("solve_k1: span too long, k1 would overflow");
  const double y0[] = {1.0, 1.0};
  auto field = [p, i, mu](double s, std::span<const double> y, std::span<double> d) {
    d[0] = y[1];
    d[1] = k_potential(p, i, mu, s) * y[0];
  };
  num::OdeOptions opts;
  opts.rtol = tol;
  opts.atol = tol;
  return num::integrate_ode(field, r0, s_max, y0, opts);
}

K2Solution solve_k2(const HornParams& p, int i, double mu, double s_max, double tol) {
  auto k1 = solve_k1(p, i, mu, s_max, tol);
  const double r0 = r_mu(p, mu);
  const double beta = k_rate(p, i);
  const auto end = k1.eval(s_max);
  const double K = end.y[0], Kp = end.y[1];
  // Beyond s_max k1 ~ C e^{beta s}, so int_{s_max}^inf k1^{-2} ~ 1 / (2 k1 k1').
  const double T = 1.0 / (2.0 * K * Kp);
  const double bound = 0.5 * beta * std::exp(-2.0 * beta * (s_max - r0));
  // The whole integral is at least its piece on [r_mu, r_mu + 1/beta], where k1 <= e^{(beta+1)/beta}.
  const double whole_lower = (1.0 / beta) * std::exp(-2.0 * (beta + 1.0) / beta);
  K2Solution out{num::DenseSolution{}, T, bound, bound / whole_lower};
  if (!(out.tail_relative <= 1e-12)) {
    std::ostringstream msg;
    msg << "solve_k2: certified tail " << out.tail_relative << " exceeds 1e-12; raise s_max";
    throw ConsistencyError(msg.str());
  }
  const double y0[] = {K * T, Kp * T - 1.0 / K};
  auto field = [p, i, mu](double s, std::span<const double> y, std::span<double> d) {
    d[0] = y[1];
    d[1] = k_potential(p, i, mu, s) * y[0];
  };
  num::OdeOptions opts;
  opts.rtol = tol;
  opts.atol = 0.0;
  out.sol = num::integrate_ode(field, s_max, r0, y0, opts);
  return out;
}

ScaledBranch::ScaledBranch(const HornParams& p, int i, double mu, double s_lo, double s_hi,
                           double tol) {
  require_mode(p, i, "ScaledBranch");
  if (!(s_lo > 0.0 && s_hi >= s_lo)) throw DomainError("ScaledBranch: 0 < s_lo <= s_hi required");
  const double beta = k_rate(p, i);
  // Past s_turn the mu-term is below beta^2 / 2 and the solution is monotone.
  const double s_turn =
      std::pow(2.0 * std::max(mu, 0.0) / (p.eps * p.eps * beta * beta), 1.0 / (2.0 / p.eps + 2.0));
  const double s_far = std::max(s_hi, s_turn) + 30.0 / beta;
  auto field = [p, i, mu](double s, std::span<const double> y, std::span<double> d) {
    const double q = k_potential(p, i, mu, s);
    const double kappa = -std::sqrt(std::max(q, 0.0));
    d[0] = y[1] - kappa * y[0];
    d[1] = q * y[0] - kappa * y[1];
    d[2] = kappa;
  };
  const double y0[] = {1.0, -std::sqrt(k_potential(p, i, mu, s_far)), 0.0};
  num::OdeOptions opts;
  opts.rtol = tol;
  opts.atol = tol;
  sol_ = num::integrate_ode(field, s_far, s_lo, y0, opts);
}

void ScaledBranch::eval(double s, double& log_scale, double& z0, double& z1) const {
  double y[3];
  sol_.state_into(s, y);
  z0 = y[0];
  z1 = y[1];
  log_scale = y[2];
}

int ScaledBranch::zero_count() const {
  int count = 0;
  const std::size_t m = sol_.nodes().size();
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double a = sol_.node_state(k - 1)[0], b = sol_.node_state(k)[0];
    if ((a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0)) ++count;
  }
  // last interval, ending at s_lo: a sign change there is interior only if k(s_lo) != 0
  if (m >= 2) {
    const double a = sol_.node_state(m - 2)[0], b = sol_.node_state(m - 1)[0];
    if ((a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0)) ++count;
  }
  return count;
}

RadialProfile::RadialProfile(const HornParams& p, int i, double mu, double r_lo, double r_hi,
                             int n_grid, Evaluator eval)
    : params_(p), i_(i), mu_(mu), r_lo_(r_lo), r_hi_(r_hi), eval_(std::move(eval)) {
  if (!(r_lo > 0.0 && r_hi > r_lo)) throw DomainError("RadialProfile: 0 < r_lo < r_hi required");
  if (n_grid < 2) throw DomainError("RadialProfile: n_grid >= 2 required");
  const double s0 = std::pow(r_hi, -p.eps), s1 = std::pow(r_lo, -p.eps);
  s_.resize(n_grid);
  log_mag_.resize(n_grid);
  log_deriv_.resize(n_grid);
  sign_.resize(n_grid);
  for (int k = 0; k < n_grid; ++k) {
    s_[k] = k == n_grid - 1 ? s1 : s0 + (s1 - s0) * k / (n_grid - 1);
    const double r = k == 0 ? r_hi : (k == n_grid - 1 ? r_lo : std::pow(s_[k], -1.0 / p.eps));
    const ScaledValue v = eval_(r);
    log_mag_[k] = v.log_scale + log_abs_or_ninf(v.value);
    sign_[k] = v.value > 0.0 ? 1 : (v.value < 0.0 ? -1 : 0);
    log_deriv_[k] = v.deriv / v.value;
  }
}

std::vector<double> RadialProfile::r_grid() const {
  std::vector<double> r(s_.size());
  for (std::size_t k = 0; k < s_.size(); ++k) r[k] = std::pow(s_[k], -1.0 / params_.eps);
  r.front() = r_hi_;
  r.back() = r_lo_;
  return r;
}

ScaledValue RadialProfile::eval(double r) const {
  const double slack = 1e-12;
  if (!(r >= r_lo_ * (1.0 - slack) && r <= r_hi_ * (1.0 + slack))) {
    std::ostringstream msg;
    msg << "RadialProfile: r = " << r << " outside [" << r_lo_ << ", " << r_hi_ << "]";
    throw DomainError(msg.str());
  }
  return eval_(std::clamp(r, r_lo_, r_hi_));
}

double RadialProfile::log_abs(double r) const {
  const ScaledValue v = eval(r);
  return v.log_scale + log_abs_or_ninf(v.value);
}

void RadialProfile::write_csv(std::ostream& out) const {
  out << "r,s,sign,log_mag,log_deriv\n";
  const auto r = r_grid();
  for (std::size_t k = 0; k < s_.size(); ++k) {
    out << io::sci(r[k]) << ',' << io::sci(s_[k]) << ',' << sign_[k] << ',' << io::sci(log_mag_[k])
        << ',' << io::sci(log_deriv_[k]) << '\n';
  }
}

RadialProfile profile_from_k2(const HornParams& p, int i, double mu, double r_min, int n_grid,
                              double tol) {
  require_mode(p, i, "profile_from_k2");
  if (n_grid < 16) throw DomainError("profile_from_k2: n_grid >= 16 required");
  const double s0 = r_mu(p, mu);
  const double r_top = std::pow(s0, -1.0 / p.eps);
  if (!(r_min > 0.0 && r_min < r_top)) {
    std::ostringstream msg;
    msg << "profile_from_k2: r_min must lie in (0, r_mu^{-1/eps}) = (0, " << r_top << ")";
    throw DomainError(msg.str());
  }
  const double s_hi = std::pow(r_min, -p.eps);
  auto branch = std::make_shared<const ScaledBranch>(p, i, mu, s0, s_hi, tol);
  // Fix the scale so that W(k1, k2) = -1 with k1 = k1' = 1 at r_mu.
  double ls0, z0, z1;
  branch->eval(s0, ls0, z0, z1);
  const double log_norm = -ls0 - std::log(z0 - z1);
  const double a = p.k_shift(), eps = p.eps;
  auto eval = [branch, log_norm, a, eps](double r) {
    const double s = std::pow(r, -eps);
    double ls, w0, w1;
    branch->eval(s, ls, w0, w1);
    ScaledValue v;
    v.log_scale = log_norm + ls + a * std::log(s);
    v.value = w0;
    v.deriv = (w1 + a * w0 / s) * (-eps * s / r);
    return v;
  };
  return RadialProfile(p, i, mu, r_min, r_top, n_grid, eval);
}

RadialProfile constant_profile(const HornParams& p, double r_lo, double r_hi, int n_grid) {
  return RadialProfile(p, 0, 0.0, r_lo, r_hi, n_grid, [](double) { return ScaledValue{0.0, 1.0, 0.0}; });
}

double radial_mode_zero(const HornParams& p, double mu, double r) {
  if (!(mu > 0.0)) throw DomainError("radial_mode_zero: mu > 0 required");
  if (!(r > 0.0)) throw DomainError("radial_mode_zero: r > 0 required");
  const double nu = 0.5 * (p.c - 1.0);
  return std::pow(mu, 0.5 * nu) * num::bessel_j_scaled(nu, r * std::sqrt(mu));
}

RadialProfile bessel_profile(const HornParams& p, double mu, double r_lo, double r_hi, int n_grid) {
  if (!(mu > 0.0)) throw DomainError("bessel_profile: mu > 0 required");
  const double nu = 0.5 * (p.c - 1.0);
  const double amp = std::pow(mu, 0.5 * nu), root = std::sqrt(mu);
  auto eval = [nu, amp, root](double r) {
    const double x = r * root;
    ScaledValue v;
    v.value = amp * num::bessel_j_scaled(nu, x);
    v.deriv = -amp * root * x * num::bessel_j_scaled(nu + 1.0, x);
    return v;
  };
  return RadialProfile(p, 0, mu, r_lo, r_hi, n_grid, eval);
}

num::LineFit decay_exponent_fit(const RadialProfile& profile) {
  if (profile.s_grid().size() < 8) throw DomainError("decay_exponent_fit: >= 8 grid points required");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < profile.s_grid().size(); ++k) {
    if (!std::isfinite(profile.log_mag()[k])) continue;
    xs.push_back(profile.s_grid()[k]);
    ys.push_back(profile.log_mag()[k]);
  }
  return num::fit_line(xs, ys);
}

NormalizationBound normalization_bound(const HornParams& p, int i, double mu) {
  require_mode(p, i, "normalization_bound");
  const double s0 = r_mu(p, mu);
  const double beta = k_rate(p, i);
  // k2 ~ e^{-beta s}: 40/beta more e-folds leave e^{-80} of the mass.
  const double s_end = s0 + 40.0 / beta + 2.0;
  ScaledBranch branch(p, i, mu, s0, s_end, 1e-12);
  double ls0, z0, z1;
  branch.eval(s0, ls0, z0, z1);
  const double log_norm = -ls0 - std::log(z0 - z1);
  // ||f||^2 = (2^{1-n}/eps) int k^2 s^{-2/eps-2} ds, offset by the value at s0.
  const double expo = -2.0 / p.eps - 2.0;
  auto log_integrand = [&](double s) {
    double ls, w0, w1;
    branch.eval(s, ls, w0, w1);
    return 2.0 * (ls - ls0) + 2.0 * log_abs_or_ninf(w0) + expo * std::log(s / s0);
  };
  auto res = num::quad_adaptive([&](double s) { return std::exp(log_integrand(s)); }, s0, s_end,
                                num::QuadOptions{0.0, 1e-12, 4000});
  const double log_norm2 = std::log(res.value) + 2.0 * (log_norm + ls0) + expo * std::log(s0) +
                           (1 - p.n) * std::log(2.0) - std::log(p.eps);
  NormalizationBound out;
  const double log_computed = -0.5 * log_norm2;
  const double log_bound = (beta + 2.0) * s0 + (1.0 + p.eps) / p.eps * std::log(s0);
  out.computed = std::exp(log_computed);
  out.bound = std::exp(log_bound);
  out.log_ratio = log_computed - log_bound;
  return out;
}

SandwichReport check_sandwich(const HornParams& p, int i, double mu, double span, int n_points) {
  if (n_points < 2) throw DomainError("check_sandwich: n_points >= 2 required");
  const double s0 = r_mu(p, mu);
  const double s_max = std::max(default_s_max(p, i, mu), s0 + span);
  auto k1 = solve_k1(p, i, mu, s_max);
  auto k2 = solve_k2(p, i, mu, s_max);
  const double beta = k_rate(p, i);
  // Integrator accuracy; the bounds coincide with k1 at s = r_mu.
  const double slack = 1e-10;
  SandwichReport rep;
  rep.points = n_points;
  rep.k1_margin = rep.k2_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_points; ++k) {
    const double x = span * k / (n_points - 1);
    const double s = s0 + x;
    const auto a = k1.eval(s);
    const auto b = k2.sol.eval(s);
    const double l1 = std::log(a.y[0]);
    const double up1 = (beta + 1.0) * x, lo1 = beta * x - std::log(beta);
    const double m1 = std::min(up1 - l1, l1 - lo1);
    const double l2 = std::log(b.y[0]);
    const double up2 = std::log(0.5 * beta) + (1.0 - beta) * x;
    const double lo2 = -std::log(2.0 * (beta * beta + beta)) + (-beta - 2.0) * x;
    const double m2 = std::min(up2 - l2, l2 - lo2);
    rep.k1_margin = std::min(rep.k1_margin, m1);
    rep.k2_margin = std::min(rep.k2_margin, m2);
    if (!(m1 >= -slack)) rep.k1_holds = false;
    if (!(m2 >= -slack)) rep.k2_holds = false;
    const double w = a.y[0] * b.y[1] - a.y[1] * b.y[0];
    rep.wronskian_defect = std::max(rep.wronskian_defect, std::abs(w + 1.0));
    if (k == 0) rep.k2_energy = b.y[0] * b.y[0] + b.y[1] * b.y[1];
  }
  return rep;
}

}  // namespace hornlab
