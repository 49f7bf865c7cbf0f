#include "hornlab/frequency_parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hornlab/errors.hpp"
#include "hornlab/numerics/quadrature.hpp"
#include "hornlab/parallel.hpp"

namespace hornlab {

namespace {

constexpr double kGaussCap = 12.0;  // y = r/(2R) beyond which e^{-y^2} < 1e-62

double gaussian_moment_tail(double c, double Y) {
  // int_Y^inf y^c e^{-y^2} dy <= Y^c e^{-Y^2} / (2Y - c/Y) for 2Y^2 > c
  return std::pow(Y, c) * std::exp(-Y * Y) / (2.0 * Y - c / Y);
}

}  // namespace

BackwardKernel make_backward_kernel(const HornParams& p) { return {p, 0.5 * (p.c + 1.0)}; }

double kernel_log(const BackwardKernel& g, double r, double t) {
  if (!(t < 0.0)) throw DomainError("kernel_log: t < 0 required");
  if (!(r >= 0.0)) throw DomainError("kernel_log: r >= 0 required");
  return -g.exponent * std::log(-t) + r * r / (4.0 * t);
}

double UnitCaloric::r_support() const { return std::numeric_limits<double>::infinity(); }

ParabolicIDN parabolic_IDN(const CaloricField& u, double R, double rel_tol) {
  if (!(R > 0.0)) throw DomainError("parabolic_IDN: R > 0 required");
  const HornParams& p = u.params();
  const double c = p.c, t = -R * R, twoR = 2.0 * R;
  const double mui = sphere_eigenvalue(p.n, u.mode_index());
  const bool bounded = std::isfinite(u.r_support());
  const double y_lo = u.r_floor() / twoR;
  const double y_hi = bounded ? u.r_support() / twoR : kGaussCap;
  if (!(y_hi > y_lo)) throw DomainError("parabolic_IDN: empty radial range");

  auto log_envelope = [&](double y) {
    const ScaledValue s = u.sample(twoR * y, t);
    return s.log_scale + std::log(std::abs(s.value)) + 0.5 * (c * std::log(y) - y * y);
  };
  double ref = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 64; ++k) {
    const double y = y_lo + (y_hi - y_lo) * k / 64.0;
    const double e = log_envelope(y);
    if (std::isfinite(e)) ref = std::max(ref, e);
  }
  if (!std::isfinite(ref)) throw NumericalError("parabolic_IDN: field vanishes on the slice");

  auto densities = [&](double y, double& d, double& i) {
    const double r = twoR * y;
    const ScaledValue s = u.sample(r, t);
    const double base = std::exp(2.0 * s.log_scale + c * std::log(y) - y * y - 2.0 * ref);
    d = base * s.value * s.value;
    const double V = mui == 0.0 ? 0.0 : mui * angular_coupling(p, r);
    i = base * (s.deriv * s.deriv + V * s.value * s.value);
  };
  const num::QuadOptions opts{0.0, rel_tol, 4000};
  const double jd = num::quad_adaptive(
                        [&](double y) {
                          double d, i;
                          densities(y, d, i);
                          return d;
                        },
                        y_lo, y_hi, opts)
                        .value;
  const double ji = num::quad_adaptive(
                        [&](double y) {
                          double d, i;
                          densities(y, d, i);
                          return i;
                        },
                        y_lo, y_hi, opts)
                        .value;
  if (!(jd > 0.0)) {
    std::ostringstream msg;
    msg << "parabolic_IDN: D = 0 at R = " << R;
    throw NumericalError(msg.str());
  }

  double tail = 0.0;
  if (y_lo > 0.0) {
    double d, i;
    densities(y_lo, d, i);
    tail = std::max(d / jd, ji > 0.0 ? i / ji : 0.0) * y_lo;
  }
  if (!bounded) {
    const double s = u.sup_abs(t);
    tail += s * s * std::exp(-2.0 * ref) * gaussian_moment_tail(c, y_hi) / jd;
  }

  // D = m_S 2^{1-n} R^{-(c+1)} int u^2 e^{-r^2/4R^2} r^c dr, with dr r^c = (2R)^{c+1} y^c dy
  const double log_pref = std::log(u.sphere_mass()) + (1 - p.n) * std::log(2.0) + (c + 1.0) * std::log(2.0);
  ParabolicIDN out;
  out.log_D = log_pref + 2.0 * ref + std::log(jd);
  out.D = std::exp(out.log_D);
  out.N = R * R * ji / jd;
  out.I = out.N * out.D;
  out.tail_bound = tail;
  return out;
}

FrequencyScan parabolic_scan(const CaloricField& u, std::span<const double> R_grid) {
  const std::size_t m = R_grid.size();
  if (m == 0) throw DomainError("parabolic_scan: empty grid");
  for (std::size_t k = 1; k < m; ++k)
    if (!(R_grid[k] > R_grid[k - 1])) throw DomainError("parabolic_scan: grid must increase");
  std::vector<ParabolicIDN> vals(m);
  parallel_for(m, [&](std::size_t k) { vals[k] = parabolic_IDN(u, R_grid[k]); });
  FrequencyScan scan;
  scan.kind = FrequencyScan::Kind::parabolic;
  for (std::size_t k = 0; k < m; ++k)
    scan.rows.push_back({R_grid[k], vals[k].I, vals[k].D, vals[k].N, std::log(vals[k].I)});
  return scan;
}

IDRelation check_ID_relation(const CaloricField& u, double R, double h) {
  if (!(h > 0.0 && R - h > 0.0)) throw DomainError("check_ID_relation: 0 < h < R required");
  const ParabolicIDN mid = parabolic_IDN(u, R);
  const double dp = parabolic_IDN(u, R + h).D, dm = parabolic_IDN(u, R - h).D;
  const double rhs = 0.25 * R * (dp - dm) / (2.0 * h);
  IDRelation out;
  out.defect = std::abs(mid.I - rhs);
  out.relative_defect = mid.I != 0.0 ? out.defect / std::abs(mid.I) : out.defect;
  return out;
}

NBound check_N_bound(const HornParams& p, const FrequencyScan& scan) {
  const auto& rows = scan.rows;
  if (rows.size() < 3) throw DomainError("check_N_bound: >= 3 grid points required");
  std::size_t zeros = 0;
  for (const auto& row : rows) zeros += row.ratio == 0.0 ? 1 : 0;
  if (zeros == rows.size()) return {0.0, 0.0, true};
  if (zeros > 0) throw NumericalError("check_N_bound: N = 0 at part of the grid");
  const double e2 = 2.0 * p.eps;
  NBound out{0.0, 0.0, false};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.C = std::max(out.C, rows[k].ratio * std::pow(rows[k].scale, e2));
    if (k == 0) continue;
    const double rise = std::log(rows[k].ratio / rows[k - 1].ratio);
    const double floor = -e2 * std::log(rows[k].scale / rows[k - 1].scale);
    out.defect = std::max(out.defect, floor - rise);
  }
  return out;
}

NBound check_N_bound(const CaloricField& u, std::span<const double> R_grid) {
  return check_N_bound(u.params(), parabolic_scan(u, R_grid));
}

num::LineFit check_D_lower(const HornParams& p, const FrequencyScan& scan) {
  const auto& rows = scan.rows;
  if (rows.size() < 8) throw DomainError("check_D_lower: >= 8 grid points required");
  const double top = rows.back().scale;
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    xs.push_back(1.0 - std::pow(row.scale / top, -2.0 * p.eps));
    ys.push_back(std::log(row.second));
  }
  return num::fit_line(xs, ys);
}

num::LineFit check_D_lower(const CaloricField& u, std::span<const double> R_grid) {
  return check_D_lower(u.params(), parabolic_scan(u, R_grid));
}

}  // namespace hornlab
