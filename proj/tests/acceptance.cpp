// One line per acceptance criterion; exit status 0 iff all pass.

#include <boost/math/special_functions/gamma.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "hornlab/frequency_elliptic.hpp"
#include "hornlab/frequency_parabolic.hpp"
#include "hornlab/numerics/special_functions.hpp"
#include "hornlab/radial_modes.hpp"
#include "hornlab/spectral_heat.hpp"
#include "oracles.hpp"

using namespace hornlab;

namespace {

const HornParams P = make_horn_params(3, 4.0, 0.5, 0.25);
constexpr double kROut = 3.0;

struct Outcome {
  bool pass;
  std::string detail;
};

std::vector<double> log_grid(double lo, double hi, int m) {
  std::vector<double> g(m);
  for (int k = 0; k < m; ++k) g[k] = lo * std::pow(hi / lo, double(k) / (m - 1));
  g.back() = hi;
  return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

ModeState tip_state(double mu) { return make_mode_state(profile_from_k2(P, 1, mu, 2e-3, 64)); }

const std::vector<EigenPair>& pairs() {
  static const auto e = dirichlet_eigenvalues(P, 1, kROut, 8);
  return e;
}
const CaloricSeries& two_pair() {
  static const CaloricSeries s({pairs()[0], pairs()[1]}, {1.0, 1.0});
  return s;
}

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

Outcome logI_identity() {
  const auto s = tip_state(1.0);
  double d[3];
  for (int j = 0; j < 3; ++j) d[j] = check_logI_identity(s, elliptic_scan(s, log_grid(0.02, 0.13, 1 + 63 * (1 << j)))).max_defect;
  const double o1 = std::log2(d[0] / d[1]), o2 = std::log2(d[1] / d[2]);
  return {d[0] <= 1e-3 && o1 >= 1.9 && o2 >= 1.9,
          fmt("defect(64)=%.3e <= 1e-3, orders %.3f %.3f >= 1.9", d[0], o1, o2)};
}

Outcome ID_identity() {
  double worst = 0.0, min_order = 1e300;
  for (double R : {0.05, 0.1, 0.2}) {
    const auto a = check_ID_relation(two_pair(), R, 1e-3 * R), b = check_ID_relation(two_pair(), R, 5e-4 * R);
    worst = std::max(worst, a.relative_defect);
    min_order = std::min(min_order, std::log2(a.defect / b.defect));
  }
  return {worst <= 1e-4 && min_order >= 1.9,
          fmt("two-pair series, R in {0.05,0.1,0.2}: max relative defect %.3e <= 1e-4, min order %.3f >= 1.9", worst,
              min_order)};
}

Outcome sandwich() {
  bool ok = true;
  double worst_w = 0.0;
  int points = 0;
  for (int i : {1, 2}) {
    for (double mu : {0.5, 1.0, 2.0}) {
      const auto s = check_sandwich(P, i, mu, 3.0, 301);
      ok = ok && s.k1_holds && s.k2_holds;
      worst_w = std::max(worst_w, s.wronskian_defect);
      points += s.points;
    }
  }
  return {ok && worst_w <= 1e-8, fmt("%d points, bounds hold: %s, max |W + 1| = %.3e <= 1e-8", points, ok ? "yes" : "no", worst_w)};
}

Outcome eigen_decay() {
  const auto prof = profile_from_k2(P, 1, 1.0, 2e-3, 64);
  const auto fit = decay_exponent_fit(prof);
  double lo = 1e300, hi = -1e300;
  for (double l : prof.log_mag()) {
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  const double beta = k_rate(P, 1);
  const bool in = fit.slope >= -(beta + 2) && fit.slope <= -(beta - 1);
  return {in && fit.max_residual <= 0.05 * (hi - lo),
          fmt("slope %.4f in [%.4f, %.4f], residual %.2f%% <= 5%% of range", fit.slope, -(beta + 2), -(beta - 1),
              100 * fit.max_residual / (hi - lo))};
}

Outcome caloric_decay() {
  const std::vector<EigenPair> six(pairs().begin(), pairs().begin() + 6);
  const CaloricSeries s(six, {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125});
  const auto grid = log_grid(0.003, 0.1, 32);
  double slopes[3], worst_res = 0.0;
  bool neg = true;
  int k = 0;
  for (double t : {0.25, 0.5, 1.0}) {
    const auto f = caloric_decay_check(s, grid, t);
    double lo = 1e300, hi = -1e300;
    for (double r : grid) {
      const double v = evaluate_caloric(s, r, t).log_mag;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst_res = std::max(worst_res, f.max_residual / (hi - lo));
    neg = neg && f.slope < 0.0;
    slopes[k++] = f.slope;
  }
  double var = 0.0;
  for (double sl : slopes) var = std::max(var, rel(sl, slopes[1]));
  return {neg && worst_res <= 0.1 && var <= 0.15,
          fmt("6-pair series: slope(t=0.5) %.4f < 0, max residual %.2f%% <= 10%%, slope variation %.2e <= 15%%", slopes[1],
              100 * worst_res, var)};
}

Outcome frequency_bounds() {
  const auto s0 = tip_state(0.0);
  const auto g0 = check_U_growth(s0, elliptic_scan(s0, log_grid(0.02, 0.13, 64)));
  const auto s1 = tip_state(1.0);
  const auto a = check_U_growth(s1, elliptic_scan(s1, log_grid(0.02, 0.13, 64)));
  const auto b = check_U_growth(s1, elliptic_scan(s1, log_grid(0.02, 0.13, 127)));
  const CaloricSeries lowest({pairs()[0]}, {1.0});
  const auto grid = log_grid(0.02, 0.2, 16);
  const auto n1 = check_N_bound(lowest, grid), n2 = check_N_bound(two_pair(), grid);
  const bool ok = g0.defect <= 1e-9 * g0.C && std::isfinite(a.C) && rel(a.C, b.C) <= 0.1 && std::isfinite(n1.C) &&
                  std::isfinite(n2.C) && n1.defect <= 1e-9 && n2.defect <= 1e-9 && !n1.trivial;
  return {ok, fmt("mu=0 monotonicity defect %.2e; mu=1 C %.4f vs %.4f (grid x2); N R^{2eps} C %.4f / %.4f on R in [0.02,0.2], "
                  "(log N)' defects %.1e %.1e",
                  g0.defect, a.C, b.C, n1.C, n2.C, n1.defect, n2.defect)};
}

Outcome lower_bounds() {
  const auto s = tip_state(1.0);
  const auto scan = elliptic_scan(s, log_grid(0.02, 0.13, 64));
  double lo = 1e300, hi = -1e300;
  for (const auto& row : scan.rows) {
    lo = std::min(lo, row.log_I);
    hi = std::max(hi, row.log_I);
  }
  const auto fi = check_I_lower(s, scan);
  const auto pscan = parabolic_scan(two_pair(), log_grid(0.02, 0.2, 16));
  double plo = 1e300, phi = -1e300;
  for (const auto& row : pscan.rows) {
    plo = std::min(plo, std::log(row.second));
    phi = std::max(phi, std::log(row.second));
  }
  const auto fd = check_D_lower(P, pscan);
  const double ri = fi.max_residual / (hi - lo), rd = fd.max_residual / (phi - plo);
  return {fi.slope >= 0 && ri <= 0.1 && fd.slope >= 0 && rd <= 0.1,
          fmt("I fit slope %.4f residual %.2f%%; D fit slope %.4f residual %.2f%% (<= 10%%)", fi.slope, 100 * ri, fd.slope,
              100 * rd)};
}

Outcome oracle_equivalence() {
  const auto s = tip_state(1.0);
  double wi = 0.0, we = 0.0, wd = 0.0;
  for (double r : {0.03, 0.08, 0.13}) {
    wi = std::max(wi, rel(elliptic_I(s, r), oracle::elliptic_I(s, r)));
    we = std::max(we, rel(elliptic_E(s, r), oracle::elliptic_E(s, r)));
  }
  const CaloricSeries one({pairs()[0]}, {1.0});
  for (double R : {0.05, 0.15, 0.4}) wd = std::max(wd, rel(parabolic_IDN(one, R).D, oracle::parabolic(one, R).D));
  return {wi <= 1e-6 && we <= 1e-6 && wd <= 1e-6, fmt("max relative gap I %.2e, E %.2e, D %.2e (<= 1e-6)", wi, we, wd)};
}

Outcome spectral() {
  const auto& e = pairs();
  const auto small = dirichlet_eigenvalues(P, 1, 2.5, 8);
  bool simple = true, sturm = true, mono = true;
  for (int j = 0; j < 8; ++j) {
    simple = simple && (j == 0 || e[j].nu > e[j - 1].nu);
    sturm = sturm && e[j].zeros == j;
    mono = mono && small[j].nu > e[j].nu;
  }
  const auto w = weyl_check(e, P);
  const bool weyl = w.exponent >= 2.0 / P.bigN - 0.1 && w.exponent <= 2.1;
  return {simple && sturm && mono && weyl,
          fmt("r_out=3: nu_1..nu_8 = %.4f..%.4f, simple %d, Sturm %d, monotone vs r_out=2.5 %d, Weyl exponent %.4f in [%.2f, 2.1]",
              e[0].nu, e[7].nu, simple, sturm, mono, w.exponent, 2.0 / P.bigN - 0.1)};
}

Outcome special_functions() {
  const double pi = std::numbers::pi;
  double wr = 0.0, rec = 0.0;
  for (double nu : {0.0, 0.5, 1.375, 5.0}) {
    for (int k = 0; k <= 60; ++k) {
      const double x = 0.1 * std::pow(500.0, k / 60.0);
      const double jn = num::bessel_j(nu, x), jn1 = num::bessel_j(nu + 1, x);
      const double yn = num::bessel_y(nu, x), yn1 = num::bessel_y(nu + 1, x);
      wr = std::max(wr, rel(jn * (nu / x * yn - yn1) - (nu / x * jn - jn1) * yn, 2.0 / (pi * x)));
      const double m = nu + 1.0;
      const double lhs = num::bessel_j(m - 1, x) + num::bessel_j(m + 1, x);
      rec = std::max(rec, std::abs(lhs - 2.0 * m / x * num::bessel_j(m, x)) /
                              (std::abs(num::bessel_j(m - 1, x)) + std::abs(num::bessel_j(m + 1, x))));
    }
  }
  double half = 0.0;
  for (double x : {0.3, pi / 2, pi, 7.0, 25.0}) {
    half = std::max(half, std::abs(num::bessel_j(0.5, x) - std::sqrt(2 / (pi * x)) * std::sin(x)));
    half = std::max(half, std::abs(num::bessel_y(0.5, x) + std::sqrt(2 / (pi * x)) * std::cos(x)));
    half = std::max(half, std::abs(num::bessel_j(1.5, x) - std::sqrt(2 / (pi * x)) * (std::sin(x) / x - std::cos(x))));
  }
  const UnitCaloric u(P);
  const double closed = 4 * pi * std::pow(2.0, P.c + 1 - P.n) * boost::math::tgamma(0.5 * (P.c + 1.0));
  double dmin = 1e300, dmax = -1e300, gap = 0.0;
  for (double R : log_grid(0.05, 0.5, 9)) {
    const double D = parabolic_IDN(u, R).D;
    dmin = std::min(dmin, D);
    dmax = std::max(dmax, D);
    gap = std::max(gap, rel(D, closed));
  }
  const double spread = (dmax - dmin) / dmin;
  return {wr <= 1e-8 && rec <= 1e-8 && half <= 1e-12 && spread <= 1e-8 && gap <= 1e-8,
          fmt("Wronskian %.1e, recurrence %.1e, half-integer %.1e, D(R) spread %.1e, D vs Gamma form %.4f: %.1e", wr, rec, half,
              spread, closed, gap)};
}

Outcome analyticity() {
  const auto a = analyticity_probe(two_pair(), 1.0, 0.5, 16), b = analyticity_probe(two_pair(), 1.0, 0.5, 24);
  return {a.radius >= 0.5 && b.radius >= a.radius,
          fmt("two-pair series at r0=1, t0=0.5: rho(16) = %.4f >= 0.5, rho(24) = %.4f", a.radius, b.radius)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no runtime limit
    std::function<Outcome()> body;
  };
  const Criterion list[] = {
      {1, "logI identity", 10.0, logI_identity},
      {2, "I = (R/4) D' identity", 30.0, ID_identity},
      {3, "sandwich bounds", 10.0, sandwich},
      {4, "eigenfunction infinite-order vanishing", 0.0, eigen_decay},
      {5, "caloric infinite-order vanishing", 0.0, caloric_decay},
      {6, "frequency bounds", 0.0, frequency_bounds},
      {7, "lower bounds", 0.0, lower_bounds},
      {8, "oracle equivalence", 0.0, oracle_equivalence},
      {9, "spectral structure", 0.0, spectral},
      {10, "special functions", 0.0, special_functions},
      {11, "time analyticity", 0.0, analyticity},
  };
  int failed = 0;
  for (const auto& c : list) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && secs > c.limit_s) {
      out.pass = false;
      out.detail += fmt(" [runtime over %.0f s]", c.limit_s);
    }
    if (!out.pass) ++failed;
    std::printf("%s %2d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), secs);
  }
  std::printf("%d of 11 criteria passed\n", 11 - failed);
  return failed == 0 ? 0 : 1;
}
