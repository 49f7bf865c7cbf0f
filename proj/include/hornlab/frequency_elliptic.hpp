#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "hornlab/horn_geometry.hpp"
#include "hornlab/numerics/fit.hpp"
#include "hornlab/radial_modes.hpp"

namespace hornlab {

/// Separated solution u = f_i(r) phi_i(theta) with a unit-L^2 spherical factor.
/// Convention Delta u = -mu u; the frequency quantities use lambda = -mu.
struct ModeState {
  HornParams params;
  int i = 0;
  double mu = 0.0;
  std::shared_ptr<const RadialProfile> profile;

  double lambda() const { return -mu; }
  double r_lo() const { return profile->r_lo(); }
  double r_hi() const { return profile->r_hi(); }
};

ModeState make_mode_state(RadialProfile profile);

struct FrequencyRow {
  double scale;   ///< r (elliptic) or R (parabolic)
  double I;
  double second;  ///< E (elliptic) or D (parabolic)
  double ratio;   ///< U = E/I or N = I/D
  double log_I;   ///< log I, kept for when I underflows
};

struct FrequencyScan {
  enum class Kind { elliptic, parabolic };
  Kind kind = Kind::elliptic;
  std::vector<FrequencyRow> rows;

  /// Header "r,I,E,U" or "R,I,D,N", 12 significant digits.
  void write_csv(std::ostream& out) const;
};

/// I(r) = r^{1-n} w(r) f(r)^2.
double elliptic_I(const ModeState& state, double r);
double elliptic_log_I(const ModeState& state, double r);

struct EllipticEnergy {
  double bulk;        ///< r^{2-n} int_{r_lo}^r (f'^2 + 4 mu_i s^{-2-2eps} f^2 - mu f^2) w ds
  double boundary;    ///< r^{2-n} w(r) f(r) f'(r)
  double tail_bound;  ///< majorant of the omitted piece below the profile's r_lo
};

/// Both forms of E(r); ConsistencyError if they differ by more than 1e-6 relative.
EllipticEnergy elliptic_E_parts(const ModeState& state, double r);
double elliptic_E(const ModeState& state, double r);

/// Rows (r, I, E, U). The bulk integral is accumulated piecewise between grid points
/// in a floating scale, so the scan is safe where f underflows. An I = 0 row throws
/// NumericalError naming the radius.
FrequencyScan elliptic_scan(const ModeState& state, std::span<const double> r_grid);

struct LogIIdentity {
  /// max |r (log I)' - 2U - (c-n+1)| / max(1, |r (log I)'|) over interior rows
  double max_defect;
  /// max |(log I)' - 2U/r - (c-n+1)/r| (the unscaled defect)
  double max_abs_defect;
};

/// (log I)' by central differences in log r.
LogIIdentity check_logI_identity(const ModeState& state, const FrequencyScan& scan);

struct UGrowth {
  double defect;  ///< max shortfall of v_{k+1} - v_k below lambda int r^{1+2eps}, v = r^{2eps} U
  double C;       ///< max_k r_k^{2eps} U_k
};
UGrowth check_U_growth(const ModeState& state, const FrequencyScan& scan);

/// Fit of log I against 1 - (r / r_top)^{-2eps}, r_top = last scan radius.
num::LineFit check_I_lower(const ModeState& state, const FrequencyScan& scan);

}  // namespace hornlab
