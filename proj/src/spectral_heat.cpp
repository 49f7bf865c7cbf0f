#include "hornlab/spectral_heat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hornlab/errors.hpp"
#include "hornlab/numerics/quadrature.hpp"
#include "hornlab/numerics/roots.hpp"
#include "hornlab/numerics/special_functions.hpp"
#include "hornlab/parallel.hpp"

namespace hornlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

// Signed log-sum-exp accumulator.
struct LogSum {
  std::vector<double> logs;
  std::vector<int> signs;
  void add(int sign, double log_mag) {
    if (sign == 0 || log_mag == kNegInf) return;
    logs.push_back(log_mag);
    signs.push_back(sign);
  }
  double peak() const {
    double m = kNegInf;
    for (double l : logs) m = std::max(m, l);
    return m;
  }
  double scaled(double m) const {
    double s = 0.0;
    for (std::size_t k = 0; k < logs.size(); ++k) s += signs[k] * std::exp(logs[k] - m);
    return s;
  }
  SignedLog result() const {
    const double m = peak();
    if (m == kNegInf) return {0, 0.0};
    const double s = scaled(m);
    if (s == 0.0) return {0, 0.0};
    return {sgn(s), m + std::log(std::abs(s))};
  }
};

// Weyl floor fitted to whatever pairs are available: min nu_j j^{-2/N}.
double weyl_floor(std::span<const EigenPair> eigs, const HornParams& p) {
  double C1 = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < eigs.size(); ++j)
    C1 = std::min(C1, eigs[j].nu * std::pow(double(j + 1), -2.0 / p.bigN));
  return C1;
}

EigenPair build_pair(const HornParams& p, int i, double nu, double r_out, const EigenOptions& opts) {
  const double eps = p.eps, a = p.k_shift();
  const double s_out = std::pow(r_out, -eps), s_hi = std::pow(opts.r_min, -eps);
  auto branch = std::make_shared<const ScaledBranch>(p, i, nu, s_out, s_hi, opts.ode_tol);

  // ||g||^2 = int k^2 s^{2a} w(r(s)) (1/eps) s^{-1/eps-1} ds, accumulated relative to e^{2 ref}
  auto log_density = [&](double s, double& z0) {
    double ls, z1;
    branch->eval(s, ls, z0, z1);
    const double r = std::pow(s, -1.0 / eps);
    return 2.0 * (ls + a * std::log(s)) + log_measure_weight(p, r) - std::log(eps) +
           (-1.0 / eps - 1.0) * std::log(s);
  };
  const double s_far = branch->s_far();
  double ref = kNegInf;
  for (int k = 0; k <= 256; ++k) {
    double z0;
    const double s = s_out + (s_far - s_out) * k / 256.0;
    const double l = log_density(s, z0);
    if (z0 != 0.0) ref = std::max(ref, l + 2.0 * std::log(std::abs(z0)));
  }
  const double mass = num::quad_adaptive(
                          [&](double s) {
                            double z0;
                            const double l = log_density(s, z0);
                            return z0 * z0 * std::exp(l - ref);
                          },
                          s_out, s_far, num::QuadOptions{0.0, 1e-13, 8000})
                          .value;
  const double log_norm = 0.5 * (ref + std::log(mass));

  auto eval = [branch, log_norm, a, eps](double r) {
    const double s = std::pow(r, -eps);
    double ls, w0, w1;
    branch->eval(s, ls, w0, w1);
    ScaledValue v;
    v.log_scale = ls + a * std::log(s) - log_norm;
    v.value = w0;
    v.deriv = (w1 + a * w0 / s) * (-eps * s / r);
    return v;
  };

  EigenPair out;
  out.nu = nu;
  out.i = i;
  out.r_out = r_out;
  out.g = std::make_shared<const RadialProfile>(p, i, nu, opts.r_min, r_out, opts.n_grid, eval);

  // interior zeros: skip the final accepted step, which ends on the Dirichlet zero
  const auto& sol = branch->solution();
  const std::size_t m = sol.nodes().size();
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double u = sol.node_state(k - 1)[0], v = sol.node_state(k)[0];
    if ((u > 0.0 && v < 0.0) || (u < 0.0 && v > 0.0)) ++out.zeros;
  }

  const auto& lm = out.g->log_mag();
  out.sup_abs = std::exp(*std::max_element(lm.begin(), lm.end()));
  const ScaledValue edge = eval(r_out);
  out.dirichlet_defect = std::exp(edge.log_scale) * std::abs(edge.value) / out.sup_abs;
  const double norm2 = num::quad_adaptive(
                           [&](double r) {
                             const ScaledValue g = out.g->eval(r);
                             return std::exp(2.0 * g.log_scale + log_measure_weight(p, r)) * g.value * g.value;
                           },
                           opts.r_min, r_out, num::QuadOptions{0.0, 1e-12, 8000})
                           .value;
  out.norm_defect = std::abs(norm2 - 1.0);
  return out;
}

}  // namespace

ShotResult shoot_dirichlet(const HornParams& p, int i, double nu, double r_out, double ode_tol) {
  if (!(r_out > 0.0)) throw DomainError("shoot_dirichlet: r_out > 0 required");
  const double s_out = std::pow(r_out, -p.eps);
  const ScaledBranch branch(p, i, nu, s_out, s_out, ode_tol);
  double ls, z0, z1;
  branch.eval(s_out, ls, z0, z1);
  return {z0 / std::hypot(z0, z1), branch.zero_count()};
}

std::vector<EigenPair> dirichlet_eigenvalues(const HornParams& p, int i, double r_out, int count,
                                             const EigenOptions& opts) {
  if (i < 1) throw DomainError("dirichlet_eigenvalues: i >= 1 required");
  if (count < 1) throw DomainError("dirichlet_eigenvalues: count >= 1 required");
  if (!(r_out > opts.r_min && opts.r_min > 0.0))
    throw DomainError("dirichlet_eigenvalues: 0 < r_min < r_out required");
  auto zeros_at = [&](double nu) { return shoot_dirichlet(p, i, nu, r_out, opts.ode_tol).zeros; };

  double hi = 16.0;
  int doublings = 0;
  while (zeros_at(hi) < count) {
    if (++doublings > opts.max_doublings)
      throw NumericalError("dirichlet_eigenvalues: no upper bracket within the doubling budget");
    hi *= 2.0;
  }
  double lo = hi * 1e-3;
  while (zeros_at(lo) > 0) {
    if (++doublings > opts.max_doublings)
      throw NumericalError("dirichlet_eigenvalues: no lower bracket within the doubling budget");
    lo *= 0.1;
  }

  const int n_sweep = std::max(8, int(std::ceil(opts.sweep_points * std::log10(hi / lo)))) + 1;
  std::vector<double> nus(n_sweep);
  std::vector<int> counts(n_sweep);
  for (int k = 0; k < n_sweep; ++k) nus[k] = lo * std::pow(hi / lo, double(k) / (n_sweep - 1));
  nus.back() = hi;
  parallel_for(n_sweep, [&](std::size_t k) { counts[k] = zeros_at(nus[k]); });
  for (int k = 1; k < n_sweep; ++k)
    if (counts[k] < counts[k - 1]) throw NumericalError("dirichlet_eigenvalues: Sturm count not monotone");

  std::vector<double> roots(count);
  parallel_for(count, [&](std::size_t jj) {
    const int j = int(jj) + 1;
    int m = 1;
    while (counts[m] < j) ++m;
    double a = nus[m - 1], b = nus[m];
    int ca = counts[m - 1], cb = counts[m];
    for (int it = 0; ca != j - 1 || cb != j; ++it) {
      if (it > 200 || b - a <= opts.rel_width * b) {
        std::ostringstream msg;
        msg << "dirichlet_eigenvalues: cannot isolate eigenvalue " << j << " near " << a;
        throw NumericalError(msg.str());
      }
      const double mid = std::sqrt(a * b);
      const int cm = zeros_at(mid);
      if (cm >= j) {
        b = mid;
        cb = cm;
      } else {
        a = mid;
        ca = cm;
      }
    }
    auto F = [&](double nu) { return shoot_dirichlet(p, i, nu, r_out, opts.ode_tol).boundary; };
    roots[jj] = num::find_root_bracketed(F, a, b, opts.rel_width * a);
  });

  std::vector<EigenPair> out(count);
  parallel_for(count, [&](std::size_t j) { out[j] = build_pair(p, i, roots[j], r_out, opts); });
  return out;
}

WeylFit weyl_check(std::span<const EigenPair> eigs, const HornParams& p) {
  if (eigs.size() < 8) throw DomainError("weyl_check: at least 8 eigenvalues required");
  WeylFit out{weyl_floor(eigs, p), 0.0, 0.0};
  std::vector<double> xs, ys;
  for (std::size_t j = 0; j < eigs.size(); ++j) {
    const double jj = double(j + 1);
    out.C2 = std::max(out.C2, eigs[j].nu / (jj * jj));
    xs.push_back(std::log(jj));
    ys.push_back(std::log(eigs[j].nu));
  }
  out.exponent = num::fit_line(xs, ys).slope;
  return out;
}

double tail_bound(std::span<const EigenPair> eigs, int k, double t, const HornParams& p,
                  double coeff_bound) {
  if (!(t > 0.0)) throw DomainError("tail_bound: t > 0 required");
  const int K = int(eigs.size());
  if (K == 0 || k < 0 || k > K) throw DomainError("tail_bound: 0 <= k <= list length required");
  const double C1 = weyl_floor(eigs, p);
  const double pw = 2.0 / p.bigN;
  auto h = [t](double x) { return x * std::exp(-x * t); };

  double sum = 0.0;
  for (int j = k; j < K; ++j) sum += h(eigs[j].nu);
  // beyond the list nu_j >= max(nu_K, C1 j^{2/N}); h decreases past 1/t
  const double floor_nu = std::max(eigs[K - 1].nu, 1.0 / t);
  const double j_switch = std::pow(floor_nu / C1, 1.0 / pw);
  const double J = std::max(double(K), std::ceil(j_switch));
  if (J - K > 1e7) throw NumericalError("tail_bound: Weyl floor too low for the requested time");
  sum += (J - K) * h(floor_nu);
  // sum_{j>J} h(C1 j^pw) <= int_J^inf h(C1 x^pw) dx = (1/(pw t)) (t C1)^{-1/pw} Gamma(1/pw + 1, t C1 J^pw)
  const double yJ = t * C1 * std::pow(J, pw);
  sum += std::exp(-std::log(pw * t) - std::log(t * C1) / pw + num::log_upper_gamma(1.0 / pw + 1.0, yJ));
  return coeff_bound * sum;
}

CaloricSeries::CaloricSeries(std::vector<EigenPair> pairs, std::vector<double> coeffs)
    : pairs_(std::move(pairs)), coeffs_(std::move(coeffs)) {
  if (pairs_.empty()) throw DomainError("CaloricSeries: no eigenpairs");
  if (pairs_.size() != coeffs_.size()) throw DomainError("CaloricSeries: coefficient count mismatch");
  for (std::size_t j = 0; j < pairs_.size(); ++j) {
    if (!pairs_[j].g) throw DomainError("CaloricSeries: eigenpair without profile");
    if (pairs_[j].i != pairs_[0].i || pairs_[j].r_out != pairs_[0].r_out)
      throw DomainError("CaloricSeries: pairs must share the spherical index and r_out");
    if (j > 0 && !(pairs_[j].nu > pairs_[j - 1].nu))
      throw DomainError("CaloricSeries: eigenvalues must increase");
    coeff_bound_ = std::max(coeff_bound_, std::abs(coeffs_[j]));
  }
}

CaloricSeries CaloricSeries::from_initial_profile(std::vector<EigenPair> pairs,
                                                  const std::function<double(double)>& u0) {
  if (pairs.empty()) throw DomainError("CaloricSeries: no eigenpairs");
  const HornParams& p = pairs.front().g->params();
  const double lo = pairs.front().g->r_lo(), hi = pairs.front().r_out;
  const num::QuadOptions opts{1e-14, 1e-12, 8000};
  std::vector<double> c(pairs.size());
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const auto& g = *pairs[j].g;
    c[j] = num::quad_adaptive(
               [&](double r) {
                 const ScaledValue v = g.eval(r);
                 return u0(r) * v.value * std::exp(v.log_scale + log_measure_weight(p, r));
               },
               lo, hi, opts)
               .value;
  }
  const double mass =
      num::quad_adaptive([&](double r) { return u0(r) * u0(r) * measure_weight(p, r); }, lo, hi, opts).value;
  CaloricSeries out(std::move(pairs), std::move(c));
  out.coeff_bound_ = std::sqrt(mass);
  return out;
}

double CaloricSeries::tail_certificate(double t) const {
  double Cg = 0.0;
  for (const auto& e : pairs_) Cg = std::max(Cg, e.sup_abs / e.nu);
  return Cg * tail_bound(pairs_, truncation(), t, params(), coeff_bound_);
}

SignedLog CaloricSeries::term_sum(int k, double r, double t) const {
  if (k < 0) throw DomainError("CaloricSeries: derivative order >= 0 required");
  if (r > r_support()) return {0, 0.0};
  LogSum acc;
  for (std::size_t j = 0; j < pairs_.size(); ++j) {
    const ScaledValue g = pairs_[j].g->eval(r);
    const int sign = sgn(coeffs_[j]) * sgn(g.value) * ((k % 2) ? -1 : 1);
    if (sign == 0) continue;
    acc.add(sign, std::log(std::abs(coeffs_[j])) + k * std::log(pairs_[j].nu) - pairs_[j].nu * t +
                      g.log_scale + std::log(std::abs(g.value)));
  }
  return acc.result();
}

double CaloricSeries::sup_abs(double t) const {
  double s = 0.0;
  for (std::size_t j = 0; j < pairs_.size(); ++j)
    s += std::abs(coeffs_[j]) * std::exp(-pairs_[j].nu * t) * pairs_[j].sup_abs;
  return s;
}

ScaledValue CaloricSeries::sample(double r, double t) const {
  if (r > r_support()) return {0.0, 0.0, 0.0};
  std::vector<double> ls(pairs_.size());
  std::vector<ScaledValue> g(pairs_.size());
  double m = kNegInf;
  for (std::size_t j = 0; j < pairs_.size(); ++j) {
    g[j] = pairs_[j].g->eval(r);
    ls[j] = coeffs_[j] == 0.0 ? kNegInf : std::log(std::abs(coeffs_[j])) - pairs_[j].nu * t + g[j].log_scale;
    m = std::max(m, ls[j]);
  }
  if (m == kNegInf) return {0.0, 0.0, 0.0};
  ScaledValue out{m, 0.0, 0.0};
  for (std::size_t j = 0; j < pairs_.size(); ++j) {
    if (ls[j] == kNegInf) continue;
    const double w = sgn(coeffs_[j]) * std::exp(ls[j] - m);
    out.value += w * g[j].value;
    out.deriv += w * g[j].deriv;
  }
  return out;
}

SignedLog evaluate_caloric(const CaloricSeries& s, double r, double t) {
  if (!(t > 0.0)) throw DomainError("evaluate_caloric: t > 0 required");
  return s.term_sum(0, r, t);
}

SignedLog time_derivative(const CaloricSeries& s, int k, double r, double t) {
  if (!(t > 0.0)) throw DomainError("time_derivative: t > 0 required");
  return s.term_sum(k, r, t);
}

AnalyticityReport analyticity_probe(const CaloricSeries& s, double r0, double t0, int kmax) {
  if (kmax < 8) throw DomainError("analyticity_probe: kmax >= 8 required");
  AnalyticityReport out;
  std::vector<double> xs, ys;
  for (int k = 0; k <= kmax; ++k) {
    const SignedLog d = time_derivative(s, k, r0, t0);
    const double l = d.sign == 0 ? kNegInf : d.log_mag - num::log_gamma(k + 1.0);
    out.log_coeffs.push_back(l);
    if (2 * k >= kmax && l != kNegInf) {
      xs.push_back(k);
      ys.push_back(l);
    }
  }
  if (xs.empty()) {
    out.radius = std::numeric_limits<double>::infinity();
    return out;
  }
  if (xs.size() < 2) throw NumericalError("analyticity_probe: too few non-zero coefficients to fit");
  out.radius = std::exp(-num::fit_line(xs, ys).slope);
  return out;
}

num::LineFit caloric_decay_check(const CaloricSeries& s, std::span<const double> r_grid, double t) {
  if (r_grid.size() < 3) throw DomainError("caloric_decay_check: >= 3 radii required");
  for (const auto& e : s.pairs())
    if (e.i < 1) throw DomainError("caloric_decay_check: every pair needs i >= 1");
  std::vector<double> xs, ys;
  for (double r : r_grid) {
    const SignedLog v = evaluate_caloric(s, r, t);
    if (v.sign == 0) {
      std::ostringstream msg;
      msg << "caloric_decay_check: f vanishes at r = " << r;
      throw NumericalError(msg.str());
    }
    xs.push_back(std::pow(r, -s.params().eps));
    ys.push_back(v.log_mag);
  }
  return num::fit_line(xs, ys);
}

}  // namespace hornlab
