#include "hornlab/frequency_elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "hornlab/errors.hpp"
#include "hornlab/io.hpp"
#include "hornlab/numerics/quadrature.hpp"
#include "hornlab/parallel.hpp"

namespace hornlab {

namespace {

constexpr double kQuadRel = 1e-12;
constexpr double kEnergyAgreement = 1e-6;

void require_in_domain(const ModeState& s, double r, const char* who) {
  const double slack = 1e-12;
  if (!(r >= s.r_lo() * (1 - slack) && r <= s.r_hi() * (1 + slack))) {
    std::ostringstream msg;
    msg << who << ": r = " << r << " outside the state domain [" << s.r_lo() << ", " << s.r_hi() << "]";
    throw DomainError(msg.str());
  }
}

// Energy density (f'^2 + V f^2 - mu f^2) w at rho, divided by e^{2 ref}.
double energy_density(const ModeState& s, double rho, double ref) {
  const ScaledValue f = s.profile->eval(rho);
  const double mui = sphere_eigenvalue(s.params.n, s.i);
  const double V = mui * angular_coupling(s.params, rho);
  const double poly = f.deriv * f.deriv + (V - s.mu) * f.value * f.value;
  if (poly == 0.0) return 0.0;
  return poly * std::exp(2.0 * (f.log_scale - ref) + log_measure_weight(s.params, rho));
}

double energy_piece(const ModeState& s, double a, double b, double ref) {
  if (b <= a) return 0.0;
  auto res = num::quad_adaptive([&](double rho) { return energy_density(s, rho, ref); }, a, b,
                                num::QuadOptions{0.0, kQuadRel, 4000});
  return res.value;
}

// Scaled pieces of one row: f(r) = e^{L} v, S = int_{r_lo}^r density / e^{2L}.
struct RowScaled {
  double L, v, dv;
};

RowScaled scaled_at(const ModeState& s, double r) {
  const ScaledValue f = s.profile->eval(r);
  return {f.log_scale, f.value, f.deriv};
}

void check_agreement(double bulk, double boundary, double tail, double r) {
  const double scale = std::max(std::abs(bulk), std::abs(boundary));
  if (!(std::abs(bulk - boundary) <= kEnergyAgreement * scale + tail)) {
    std::ostringstream msg;
    msg << "elliptic_E: bulk " << bulk << " and boundary " << boundary << " forms disagree at r = " << r;
    throw ConsistencyError(msg.str());
  }
}

}  // namespace

ModeState make_mode_state(RadialProfile profile) {
  ModeState s;
  s.params = profile.params();
  s.i = profile.mode_index();
  s.mu = profile.mu();
  s.profile = std::make_shared<const RadialProfile>(std::move(profile));
  return s;
}

void FrequencyScan::write_csv(std::ostream& out) const {
  out << (kind == Kind::elliptic ? "r,I,E,U\n" : "R,I,D,N\n");
  for (const auto& row : rows) {
    out << io::sci(row.scale) << ',' << io::sci(row.I) << ',' << io::sci(row.second) << ','
        << io::sci(row.ratio) << '\n';
  }
}

double elliptic_log_I(const ModeState& state, double r) {
  require_in_domain(state, r, "elliptic_I");
  return (1 - state.params.n) * std::log(r) + log_measure_weight(state.params, r) +
         2.0 * state.profile->log_abs(r);
}

double elliptic_I(const ModeState& state, double r) { return std::exp(elliptic_log_I(state, r)); }

EllipticEnergy elliptic_E_parts(const ModeState& state, double r) {
  require_in_domain(state, r, "elliptic_E");
  const RowScaled f = scaled_at(state, r);
  const double r0 = state.r_lo();
  const double S = energy_piece(state, r0, r, f.L);
  const double tail = std::abs(energy_density(state, r0, f.L)) * r0;
  const double w = measure_weight(state.params, r);
  const double Bd = w * f.v * f.dv;
  check_agreement(S, Bd, tail, r);
  const double pref = std::exp((2 - state.params.n) * std::log(r) + 2.0 * f.L);
  return {pref * S, pref * Bd, pref * tail};
}

double elliptic_E(const ModeState& state, double r) { return elliptic_E_parts(state, r).bulk; }

FrequencyScan elliptic_scan(const ModeState& state, std::span<const double> r_grid) {
  const std::size_t m = r_grid.size();
  if (m == 0) throw DomainError("elliptic_scan: empty grid");
  for (std::size_t k = 0; k < m; ++k) {
    require_in_domain(state, r_grid[k], "elliptic_scan");
    if (k > 0 && !(r_grid[k] > r_grid[k - 1])) throw DomainError("elliptic_scan: grid must increase");
  }
  std::vector<RowScaled> f(m);
  std::vector<double> piece(m);
  parallel_for(m, [&](std::size_t k) {
    f[k] = scaled_at(state, r_grid[k]);
    const double a = k == 0 ? state.r_lo() : r_grid[k - 1];
    piece[k] = energy_piece(state, a, r_grid[k], f[k].L);
  });

  FrequencyScan scan;
  scan.kind = FrequencyScan::Kind::elliptic;
  const double tail = std::abs(energy_density(state, state.r_lo(), f[0].L)) * state.r_lo();
  double S = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double r = r_grid[k];
    S = (k == 0 ? 0.0 : S * std::exp(2.0 * (f[k - 1].L - f[k].L))) + piece[k];
    if (f[k].v == 0.0) {
      std::ostringstream msg;
      msg << "elliptic_scan: I = 0 at r = " << r << " (nodal sphere)";
      throw NumericalError(msg.str());
    }
    const double w = measure_weight(state.params, r);
    const double row_tail = tail * std::exp(2.0 * (f[0].L - f[k].L));
    check_agreement(S, w * f[k].v * f[k].dv, row_tail, r);
    FrequencyRow row;
    row.scale = r;
    row.log_I = (1 - state.params.n) * std::log(r) + std::log(w) + 2.0 * f[k].L +
                2.0 * std::log(std::abs(f[k].v));
    row.I = std::exp(row.log_I);
    row.second = std::exp((2 - state.params.n) * std::log(r) + 2.0 * f[k].L) * S;
    row.ratio = r * S / (w * f[k].v * f[k].v);
    scan.rows.push_back(row);
  }
  return scan;
}

LogIIdentity check_logI_identity(const ModeState& state, const FrequencyScan& scan) {
  const auto& rows = scan.rows;
  if (rows.size() < 3) throw DomainError("check_logI_identity: >= 3 rows required");
  const double target = state.params.c - state.params.n + 1.0;
  LogIIdentity out{0.0, 0.0};
  for (std::size_t k = 1; k + 1 < rows.size(); ++k) {
    const double u0 = std::log(rows[k - 1].scale), u1 = std::log(rows[k].scale),
                 u2 = std::log(rows[k + 1].scale);
    const double h1 = u1 - u0, h2 = u2 - u1;
    const double y0 = rows[k - 1].log_I, y1 = rows[k].log_I, y2 = rows[k + 1].log_I;
    // second-order derivative on a possibly uneven grid
    const double dlog = (h1 * h1 * y2 - h2 * h2 * y0 + (h2 * h2 - h1 * h1) * y1) / (h1 * h2 * (h1 + h2));
    const double gap = dlog - 2.0 * rows[k].ratio - target;
    out.max_defect = std::max(out.max_defect, std::abs(gap) / std::max(1.0, std::abs(dlog)));
    out.max_abs_defect = std::max(out.max_abs_defect, std::abs(gap) / rows[k].scale);
  }
  return out;
}

UGrowth check_U_growth(const ModeState& state, const FrequencyScan& scan) {
  const auto& rows = scan.rows;
  if (rows.size() < 3) throw DomainError("check_U_growth: >= 3 rows required");
  const double e2 = 2.0 * state.params.eps;
  const double lam = state.lambda();
  UGrowth out{0.0, -std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double v = std::pow(rows[k].scale, e2) * rows[k].ratio;
    out.C = std::max(out.C, v);
    if (k == 0) continue;
    const double vprev = std::pow(rows[k - 1].scale, e2) * rows[k - 1].ratio;
    const double forcing =
        lam * (std::pow(rows[k].scale, 2.0 + e2) - std::pow(rows[k - 1].scale, 2.0 + e2)) / (2.0 + e2);
    out.defect = std::max(out.defect, forcing - (v - vprev));
  }
  return out;
}

num::LineFit check_I_lower(const ModeState& state, const FrequencyScan& scan) {
  const auto& rows = scan.rows;
  if (rows.size() < 8) throw DomainError("check_I_lower: >= 8 rows required");
  const double top = rows.back().scale;
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    xs.push_back(1.0 - std::pow(row.scale / top, -2.0 * state.params.eps));
    ys.push_back(row.log_I);
  }
  return num::fit_line(xs, ys);
}

}  // namespace hornlab
