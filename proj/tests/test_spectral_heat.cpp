#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "hornlab/errors.hpp"
#include "hornlab/spectral_heat.hpp"

using namespace hornlab;

namespace {

const HornParams P = make_horn_params(3, 4.0, 0.5, 0.25);

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<double> log_grid(double lo, double hi, int m) {
  std::vector<double> g(m);
  for (int k = 0; k < m; ++k) g[k] = lo * std::pow(hi / lo, double(k) / (m - 1));
  g.back() = hi;
  return g;
}

const std::vector<EigenPair>& eigs12() {
  static const auto e = dirichlet_eigenvalues(P, 1, 3.0, 12);
  return e;
}

double g_at(const EigenPair& e, double r) {
  const ScaledValue v = e.g->eval(r);
  return std::exp(v.log_scale) * v.value;
}

// Independent shooting in r: the mode ODE f'' + (c/r) f' - 4 mu_1 r^{-2-2eps} f + nu f = 0
// integrated outward from r = 0.01 with the leading tip asymptotics s^a e^{-beta s}, which
// is stable for the decaying branch. Returns f(r_out) / max |f|.
double oracle_boundary(double nu, double r_out) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const double mui = sphere_eigenvalue(P.n, 1), beta = std::sqrt(4 * mui) / P.eps, a = P.k_shift();
  const double r0 = 0.01, s0 = std::pow(r0, -P.eps);
  State y{std::pow(s0, a) * std::exp(-beta * s0), 0.0};
  y[1] = (a / s0 - beta) * y[0] * (-P.eps * s0 / r0);
  auto rhs = [&](const State& f, State& d, double r) {
    d[0] = f[1];
    d[1] = -(P.c / r) * f[1] + 4 * mui * std::pow(r, -2 - 2 * P.eps) * f[0] - nu * f[0];
  };
  double peak = 0.0;
  auto obs = [&](const State& f, double) { peak = std::max(peak, std::abs(f[0])); };
  odeint::integrate_adaptive(odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>()), rhs,
                             y, r0, r_out, 1e-4, obs);
  return y[0] / peak;
}

}  // namespace

TEST_CASE("Dirichlet eigenpairs: simplicity, Sturm count, normalisation") {
  const auto& e = eigs12();
  REQUIRE(e.size() == 12);
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (j > 0) CHECK(e[j].nu > e[j - 1].nu * (1 + 1e-6));
    CHECK(e[j].zeros == int(j));
    CHECK(e[j].norm_defect <= 1e-8);
    CHECK(e[j].dirichlet_defect <= 1e-8);
    CHECK(e[j].i == 1);
    CHECK(e[j].r_out == 3.0);
    // sign changes on a fine uniform r grid, independent of the integrator's steps
    int changes = 0;
    double prev = g_at(e[j], 0.01);
    for (int k = 1; k < 6000; ++k) {
      const double v = g_at(e[j], 0.01 + (3.0 - 0.01) * k / 6000.0);
      if (v * prev < 0.0) ++changes;
      if (v != 0.0) prev = v;
    }
    CHECK(changes == int(j));
    CHECK(g_at(e[j], 0.02) > 0.0);
    if (j > 0) CHECK(e[j].sup_abs / e[j].nu < e[j - 1].sup_abs / e[j - 1].nu);
  }
}

TEST_CASE("eigenvalues against independent outward shooting") {
  const auto& e = eigs12();
  for (int j = 0; j < 8; ++j) {
    const double nu = e[j].nu;
    CHECK(std::abs(oracle_boundary(nu, 3.0)) < 1e-6);
    CHECK(oracle_boundary(nu * (1 - 1e-6), 3.0) * oracle_boundary(nu * (1 + 1e-6), 3.0) < 0.0);
  }
}

TEST_CASE("mode ODE residual at interior points") {
  const auto& e = eigs12();
  const double mui = sphere_eigenvalue(P.n, 1);
  for (int j = 0; j < 8; ++j) {
    for (double r : {0.05, 0.2, 0.7, 1.5, 2.5}) {
      const double h = 1e-4 * r;
      const ScaledValue m = e[j].g->eval(r), lo = e[j].g->eval(r - h), hi = e[j].g->eval(r + h);
      const double f = std::exp(m.log_scale) * m.value, fp = std::exp(m.log_scale) * m.deriv;
      const double fpp = (std::exp(hi.log_scale) * hi.deriv - std::exp(lo.log_scale) * lo.deriv) / (2 * h);
      const double terms[] = {fpp, P.c * fp / r, 4 * mui * std::pow(r, -2 - 2 * P.eps) * f, e[j].nu * f};
      double scale = 0.0;
      for (double t : terms) scale = std::max(scale, std::abs(t));
      CHECK(std::abs(terms[0] + terms[1] - terms[2] + terms[3]) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("domain monotonicity and Weyl sandwich") {
  const auto small = dirichlet_eigenvalues(P, 1, 2.5, 8);
  for (int j = 0; j < 8; ++j) CHECK(small[j].nu > eigs12()[j].nu);

  const auto w8 = weyl_check(std::span(eigs12()).first(8), P);
  const auto w12 = weyl_check(eigs12(), P);
  MESSAGE("Weyl exponent " << w12.exponent << " C1 " << w12.C1 << " C2 " << w12.C2);
  CHECK(w12.C1 <= eigs12()[0].nu);
  CHECK(eigs12()[0].nu <= w12.C2);
  CHECK(w12.C1 > 0.0);
  CHECK(std::isfinite(w12.C2));
  CHECK(w12.exponent >= 2.0 / P.bigN - 0.1);
  CHECK(w12.exponent <= 2.1);
  CHECK(rel(w8.C1, w12.C1) <= 0.2);
  CHECK(rel(w8.C2, w12.C2) <= 0.2);
  for (std::size_t j = 0; j < 12; ++j) {
    const double jj = double(j + 1);
    CHECK(eigs12()[j].nu >= w12.C1 * std::pow(jj, 2.0 / P.bigN) * (1 - 1e-14));
    CHECK(eigs12()[j].nu <= w12.C2 * jj * jj * (1 + 1e-14));
  }
  CHECK_THROWS_AS(weyl_check(std::span(eigs12()).first(7), P), DomainError);
  CHECK_THROWS_AS(dirichlet_eigenvalues(P, 0, 3.0, 4), DomainError);
  CHECK_THROWS_AS(dirichlet_eigenvalues(P, 1, 3.0, 0), DomainError);
}

TEST_CASE("tail bound") {
  const auto& e = eigs12();
  const double C1 = weyl_check(e, P).C1, pw = 2.0 / P.bigN;
  for (double t : {0.05, 0.3, 1.0}) {
    CHECK(tail_bound(e, 3, t, P) >= tail_bound(e, 5, t, P));
    CHECK(tail_bound(e, 5, t, P) >= tail_bound(e, 8, t, P));
    for (int k : {2, 6, 11}) {
      double partial = 0.0;
      for (int j = k; j < 12; ++j) partial += e[j].nu * std::exp(-e[j].nu * t);
      CHECK(tail_bound(e, k, t, P) >= partial);
    }
    // beyond the list: a brute-force sum of the Weyl floor (clipped at nu_12 and 1/t)
    double brute = 0.0;
    const double floor_nu = std::max(e.back().nu, 1.0 / t);
    for (int j = 13; j < 4000000; ++j) {
      const double x = std::max(floor_nu, C1 * std::pow(double(j), pw));
      brute += x * std::exp(-x * t);
    }
    CHECK(tail_bound(e, 12, t, P) >= brute);
    CHECK(tail_bound(e, 12, t, P) <= 2 * brute + 1e-300);
  }
  for (int k : {3, 6, 9}) {
    CHECK(tail_bound(e, k, 0.1, P) >= tail_bound(e, k, 0.3, P));
    CHECK(tail_bound(e, k, 0.3, P) >= tail_bound(e, k, 1.0, P));
  }
  const double lead = e[0].nu * std::exp(-e[0].nu);
  CHECK(tail_bound(e, 8, 1.0, P) < 1e-6 * lead);
  CHECK(tail_bound(e, 4, 1.0, P, 3.0) == doctest::Approx(3 * tail_bound(e, 4, 1.0, P)).epsilon(1e-14));
  CHECK_THROWS_AS(tail_bound(e, 4, 0.0, P), DomainError);
  CHECK_THROWS_AS(tail_bound(e, 13, 1.0, P), DomainError);
}

TEST_CASE("series evaluation") {
  const auto& e = eigs12();
  const CaloricSeries one({e[0]}, {1.0});
  for (double r : {0.05, 0.5, 2.0}) {
    for (double t : {0.1, 1.0}) {
      const auto v = evaluate_caloric(one, r, t);
      CHECK(v.sign == 1);
      CHECK(rel(std::exp(v.log_mag), std::exp(-e[0].nu * t) * g_at(e[0], r)) < 1e-13);
      for (int k : {1, 2, 5}) {
        const auto d = time_derivative(one, k, r, t);
        CHECK(d.sign == (k % 2 ? -1 : 1));
        CHECK(d.log_mag == doctest::Approx(k * std::log(e[0].nu) - e[0].nu * t + std::log(g_at(e[0], r))).epsilon(1e-13));
      }
    }
  }
  const std::vector<EigenPair> four(e.begin(), e.begin() + 4);
  const CaloricSeries s(four, {1.0, -0.7, 0.4, 0.2});
  const CaloricSeries s2(four, {2.0, -1.4, 0.8, 0.4});
  for (double r : {0.05, 0.4, 1.1}) {
    const double t = 0.3, h = 1e-5;
    const auto v = evaluate_caloric(s, r, t), d0 = time_derivative(s, 0, r, t);
    CHECK(v.sign == d0.sign);
    CHECK(v.log_mag == d0.log_mag);
    const auto v2 = evaluate_caloric(s2, r, t);
    CHECK(v2.log_mag - v.log_mag == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    auto val = [&](double tt) {
      const auto w = evaluate_caloric(s, r, tt);
      return w.sign * std::exp(w.log_mag);
    };
    const auto d1 = time_derivative(s, 1, r, t);
    CHECK(rel((val(t + h) - val(t - h)) / (2 * h), d1.sign * std::exp(d1.log_mag)) < 1e-6);
  }
  CHECK(evaluate_caloric(s, 3.5, 0.3).sign == 0);
  CHECK_THROWS_AS(evaluate_caloric(s, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(time_derivative(s, 1, 0.5, -1.0), DomainError);
  CHECK_THROWS_AS(CaloricSeries({e[1], e[0]}, {1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(CaloricSeries({e[0]}, {1.0, 1.0}), DomainError);
}

TEST_CASE("projection of an initial profile and the truncation certificate") {
  const auto& e = eigs12();
  auto u0 = [&](double r) { return g_at(e[0], r) + 0.5 * g_at(e[2], r); };
  const auto s = CaloricSeries::from_initial_profile(std::vector<EigenPair>(e.begin(), e.begin() + 8), u0);
  const double expect[] = {1.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0};
  for (int j = 0; j < 8; ++j) CHECK(std::abs(s.coeffs()[j] - expect[j]) < 1e-8);
  CHECK(s.coeff_bound() == doctest::Approx(std::sqrt(1.25)).epsilon(1e-8));

  // a ramp has every coefficient non-zero; K-term vs (K-2)-term gap stays under the certificate
  auto ramp = [](double r) { return std::min(1.0, r) * (3.0 - r); };
  const auto full = CaloricSeries::from_initial_profile(std::vector<EigenPair>(e.begin(), e.begin() + 8), ramp);
  std::vector<EigenPair> head(e.begin(), e.begin() + 6);
  const CaloricSeries part(head, std::vector<double>(full.coeffs().begin(), full.coeffs().begin() + 6));
  for (int j = 0; j < 8; ++j) CHECK(std::abs(full.coeffs()[j]) <= full.coeff_bound());
  for (double t : {0.02, 0.1, 0.5}) {
    double cert = 0.0;
    {
      double Cg = 0.0;
      for (const auto& p : head) Cg = std::max(Cg, p.sup_abs / p.nu);
      cert = Cg * tail_bound(head, 6, t, P, full.coeff_bound());
    }
    for (double r : {0.1, 0.6, 1.3, 2.4}) {
      const auto a = evaluate_caloric(full, r, t), b = evaluate_caloric(part, r, t);
      const double gap = std::abs(a.sign * std::exp(a.log_mag) - b.sign * std::exp(b.log_mag));
      CHECK(gap <= cert);
    }
    CHECK(full.tail_certificate(t) > 0.0);
  }
}

TEST_CASE("time analyticity probe") {
  const auto& e = eigs12();
  const CaloricSeries one({e[0]}, {1.0});
  const double r1 = analyticity_probe(one, 0.5, 0.5, 16).radius;
  const double r2 = analyticity_probe(one, 0.5, 0.5, 24).radius;
  const double r3 = analyticity_probe(one, 0.5, 0.5, 32).radius;
  CHECK(r1 > 0.0);
  CHECK(r2 > r1);
  CHECK(r3 > r2);

  const CaloricSeries two({e[0], e[1]}, {1.0, 1.0});
  for (double r0 : {0.2, 1.0, 2.0}) {
    const auto a = analyticity_probe(two, r0, 0.5, 16), b = analyticity_probe(two, r0, 0.5, 24);
    MESSAGE("r0 " << r0 << " rho " << a.radius << " -> " << b.radius);
    CHECK(a.radius >= 0.5);
    CHECK(b.radius >= a.radius);
    CHECK(a.log_coeffs.size() == 17);
  }
  const auto pk = analyticity_probe(two, 1.0, 0.5, 16);
  const auto d3 = time_derivative(two, 3, 1.0, 0.5);
  CHECK(pk.log_coeffs[3] == doctest::Approx(d3.log_mag - std::log(6.0)).epsilon(1e-13));

  const CaloricSeries zero({e[0], e[1]}, {0.0, 0.0});
  CHECK(std::isinf(analyticity_probe(zero, 1.0, 0.5, 16).radius));
  CHECK_THROWS_AS(analyticity_probe(two, 1.0, 0.5, 7), DomainError);
}

TEST_CASE("caloric series vanish to infinite order at the tip") {
  const auto& e = eigs12();
  const double beta = k_rate(P, 1);
  const auto grid = log_grid(0.003, 0.1, 32);
  const CaloricSeries one({e[0]}, {1.0});
  const auto f1 = caloric_decay_check(one, grid, 0.5);
  CHECK(f1.slope >= -(beta + 2));
  CHECK(f1.slope <= -(beta - 1));

  const std::vector<EigenPair> six(e.begin(), e.begin() + 6);
  const CaloricSeries s(six, {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125});
  double slopes[3];
  int k = 0;
  for (double t : {0.25, 0.5, 1.0}) {
    const auto f = caloric_decay_check(s, grid, t);
    double lo = 1e300, hi = -1e300;
    for (double r : grid) {
      const double v = evaluate_caloric(s, r, t).log_mag;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(f.slope < 0.0);
    CHECK(f.max_residual <= 0.1 * (hi - lo));
    slopes[k++] = f.slope;
  }
  for (double sl : slopes) CHECK(rel(sl, slopes[1]) <= 0.15);

  EigenPair flat;
  flat.nu = 1.0;
  flat.i = 0;
  flat.r_out = 1.0;
  flat.g = std::make_shared<const RadialProfile>(constant_profile(P, 1e-3, 1.0, 16));
  CHECK_THROWS_AS(caloric_decay_check(CaloricSeries({flat}, {1.0}), grid, 0.5), DomainError);
}
