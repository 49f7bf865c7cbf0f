#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hornlab/errors.hpp"
#include "hornlab/frequency_elliptic.hpp"
#include "oracles.hpp"

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

ModeState tip_state(double mu) { return make_mode_state(profile_from_k2(P, 1, mu, 2e-3, 64)); }

}  // namespace

TEST_CASE("constant state closed forms") {
  auto s = make_mode_state(constant_profile(P, 1e-4, 2.0, 16));
  CHECK(elliptic_I(s, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  for (double r : {0.01, 0.5, 1.7}) {
    CHECK(rel(elliptic_I(s, r), 0.25 * std::pow(r, P.c + 1 - P.n)) < 1e-13);
    CHECK(elliptic_E(s, r) == 0.0);
  }
  auto grid = log_grid(0.01, 1.5, 32);
  auto scan = elliptic_scan(s, grid);
  for (const auto& row : scan.rows) CHECK(row.ratio == 0.0);
  auto id = check_logI_identity(s, scan);
  CHECK(id.max_defect < 1e-12);
  CHECK(P.c - P.n + 1 == doctest::Approx(1.75));
  auto g = check_U_growth(s, scan);
  CHECK(g.defect == 0.0);
  CHECK(g.C == 0.0);
  CHECK_THROWS_AS(elliptic_I(s, 3.0), DomainError);
}

TEST_CASE("i = 1 tip state: positive energy and matching E forms") {
  auto s = tip_state(1.0);
  CHECK(s.lambda() == -1.0);
  for (double r : {0.01, 0.05, 0.1, 0.13}) {
    auto e = elliptic_E_parts(s, r);
    CHECK(e.bulk > 0.0);
    CHECK(rel(e.bulk, e.boundary) < 1e-6);
    CHECK(e.tail_bound < 1e-12 * e.bulk);
  }
}

TEST_CASE("1-D reductions against 2-D product quadrature") {
  auto tip = tip_state(1.0);
  auto zero = make_mode_state(bessel_profile(P, 1.0, 1e-6, 2.0, 32));
  for (const ModeState* s : {&tip, &zero}) {
    for (double r : {0.03, 0.08, 0.13}) {
      CHECK(rel(elliptic_I(*s, r), oracle::elliptic_I(*s, r)) < 1e-6);
      CHECK(rel(elliptic_E(*s, r), oracle::elliptic_E(*s, r)) < 1e-6);
    }
  }
}

TEST_CASE("scan invariants and CSV") {
  auto s = tip_state(1.0);
  auto grid = log_grid(0.02, 0.13, 16);
  auto scan = elliptic_scan(s, grid);
  REQUIRE(scan.rows.size() == 16);
  for (std::size_t k = 0; k < scan.rows.size(); ++k) {
    const auto& row = scan.rows[k];
    CHECK(row.I > 0.0);
    CHECK(rel(row.ratio, row.second / row.I) < 1e-12);
    CHECK(rel(row.I, elliptic_I(s, row.scale)) < 1e-12);
    CHECK(rel(row.second, elliptic_E(s, row.scale)) < 1e-9);
    if (k > 0) CHECK(row.scale > scan.rows[k - 1].scale);
  }
  // U blows up toward the tip
  CHECK(scan.rows.front().ratio > 2 * scan.rows.back().ratio);
  std::ostringstream out;
  scan.write_csv(out);
  CHECK(out.str().rfind("r,I,E,U\n", 0) == 0);
  const std::vector<double> bad{0.05, 0.04};
  CHECK_THROWS_AS(elliptic_scan(s, bad), DomainError);
}

TEST_CASE("logI identity converges at second order") {
  auto s = tip_state(1.0);
  double d[3];
  for (int j = 0; j < 3; ++j) {
    auto scan = elliptic_scan(s, log_grid(0.02, 0.13, 1 + 63 * (1 << j)));
    d[j] = check_logI_identity(s, scan).max_defect;
  }
  MESSAGE("logI defects: " << d[0] << " " << d[1] << " " << d[2]);
  CHECK(d[0] <= 1e-3);
  CHECK(std::log2(d[0] / d[1]) >= 1.9);
  CHECK(std::log2(d[1] / d[2]) >= 1.9);
}

TEST_CASE("U growth and I lower bound") {
  {
    auto s = tip_state(0.0);
    auto scan = elliptic_scan(s, log_grid(0.02, 0.13, 64));
    auto g = check_U_growth(s, scan);
    CHECK(g.defect <= 1e-9 * g.C);
    for (std::size_t k = 1; k < scan.rows.size(); ++k) {
      const double v0 = std::pow(scan.rows[k - 1].scale, 2 * P.eps) * scan.rows[k - 1].ratio;
      const double v1 = std::pow(scan.rows[k].scale, 2 * P.eps) * scan.rows[k].ratio;
      CHECK(v1 >= v0);
    }
  }
  auto s = tip_state(1.0);
  auto a = elliptic_scan(s, log_grid(0.02, 0.13, 64));
  auto b = elliptic_scan(s, log_grid(0.02, 0.13, 127));
  auto ga = check_U_growth(s, a), gb = check_U_growth(s, b);
  CHECK(ga.defect <= 1e-9 * ga.C);
  CHECK(std::isfinite(ga.C));
  CHECK(std::abs(ga.C - gb.C) <= 0.1 * gb.C);

  auto fa = check_I_lower(s, a), fb = check_I_lower(s, b);
  double lo = 1e300, hi = -1e300;
  for (const auto& row : a.rows) {
    lo = std::min(lo, row.log_I);
    hi = std::max(hi, row.log_I);
  }
  MESSAGE("I fit slope " << fa.slope << " residual/range " << fa.max_residual / (hi - lo));
  CHECK(fa.slope > 0.0);
  CHECK(fa.max_residual <= 0.1 * (hi - lo));
  CHECK(std::abs(fa.slope - fb.slope) <= 0.1 * fb.slope);

  // power-law I: the slope against the r^{-2eps} abscissa is small next to the tip state's
  auto c = make_mode_state(constant_profile(P, 1e-3, 1.0, 16));
  auto fc = check_I_lower(c, elliptic_scan(c, log_grid(0.02, 0.13, 64)));
  CHECK(std::abs(fc.slope) < 0.25 * fa.slope);
}
