#include "hornlab/numerics/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "hornlab/errors.hpp"

namespace hornlab::num {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double z) {
  // z is the shifted argument x - 1
  double acc = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) acc += kLanczos[k] / (z + static_cast<double>(k));
  return acc;
}

// Taylor coefficients of 1/Gamma(1 + z) about 0.
constexpr std::array<double, 27> kRecipGamma = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18};

// Temme's auxiliary functions for |mu| <= 1/2:
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu),  gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2.
struct TemmeGammas {
  double gam1, gam2, gampl, gammi;
};

TemmeGammas temme_gammas(double mu) {
  double even = 0.0, odd = 0.0;
  double pw = 1.0;
  for (std::size_t k = 0; k < kRecipGamma.size(); ++k) {
    if (k % 2 == 0)
      even += kRecipGamma[k] * pw;
    else
      odd += kRecipGamma[k] * pw;
    if (k % 2 == 1) pw *= mu * mu;
  }
  // 1/Gamma(1+mu) = even + mu*odd, 1/Gamma(1-mu) = even - mu*odd
  TemmeGammas g{};
  g.gam1 = -odd;
  g.gam2 = even;
  g.gampl = even + mu * odd;
  g.gammi = even - mu * odd;
  return g;
}

// Ascending series sum_k (-x^2/4)^k / (k! Gamma(nu+k+1)), i.e. (x/2)^{-nu} J_nu(x).
double j_series_scaled(double nu, double x) {
  const double q = -0.25 * x * x;
  double term = 1.0 / gamma(nu + 1.0);
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (k * (nu + k));
    sum += term;
    if (std::abs(term) <= kEps * std::abs(sum)) break;
  }
  return sum;
}

constexpr double kSeriesLimit = 2.0;

}  // namespace

double gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw DomainError("gamma: pole at non-positive integer");
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma(1.0 - x));
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_sum(z);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: x > 0 required");
  if (x < 0.5) return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

namespace {

// Lower series: P(a, x) for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int k = 0; k < 10000; ++k) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// log of the continued fraction h with Gamma(a, x) = exp(-x) x^a h, for x >= a + 1.
double log_upper_gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return -x + a * std::log(x) + std::log(h);
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q: a > 0 and x >= 0 required");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return std::exp(log_upper_gamma_cf(a, x) - log_gamma(a));
}

double log_upper_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("log_upper_gamma: a > 0 and x >= 0 required");
  if (x < a + 1.0) return log_gamma(a) + std::log1p(-gamma_p_series(a, x));
  return log_upper_gamma_cf(a, x);
}

BesselJY bessel_jy(double nu, double x) {
  if (!(x > 0.0) || nu < 0.0) throw DomainError("bessel_jy: nu >= 0 and x > 0 required");
  constexpr int kMaxIter = 100000;
  constexpr double kXmin = 2.0;
  constexpr double kFpMin = 1e-300;

  const int nl = x < kXmin ? static_cast<int>(nu + 0.5)
                           : std::max(0, static_cast<int>(nu - x + 1.5));
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  const double w = xi2 / kPi;

  // CF1: J'_nu / J_nu by modified Lentz.
  int isign = 1;
  double h = nu * xi;
  if (h < kFpMin) h = kFpMin;
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int it = 0;
  for (; it < kMaxIter; ++it) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b - 1.0 / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::abs(del - 1.0) < kEps) break;
  }
  if (it == kMaxIter) throw NumericalError("bessel_jy: CF1 did not converge (x too large)");

  // Downward recurrence from nu to xmu with arbitrary normalisation.
  double rjl = isign * 1e-200;
  double rjpl = h * rjl;
  const double rjl1 = rjl;
  const double rjp1 = rjpl;
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const double rjtemp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * rjtemp - rjl;
    rjl = rjtemp;
  }
  if (rjl == 0.0) rjl = kEps;
  const double f = rjpl / rjl;

  double rjmu, rymu, rymup, ry1;
  if (x < kXmin) {
    // Temme's series for Y_mu, Y_{mu+1}.
    const double x2 = 0.5 * x;
    const double pimu = kPi * xmu;
    const double fact1 = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double dd = -std::log(x2);
    double e = xmu * dd;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const TemmeGammas g = temme_gammas(xmu);
    double ff = 2.0 / kPi * fact1 * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * dd);
    e = std::exp(e);
    double p = e / (g.gampl * kPi);
    double q = 1.0 / (e * kPi * g.gammi);
    const double pimu2 = 0.5 * pimu;
    const double fact3 = std::abs(pimu2) < kEps ? 1.0 : std::sin(pimu2) / pimu2;
    const double r = kPi * pimu2 * fact3 * fact3;
    double cc = 1.0;
    dd = -x2 * x2;
    double sum = ff + r * q;
    double sum1 = p;
    int i = 1;
    for (; i < kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - xmu2);
      cc *= dd / i;
      p /= (i - xmu);
      q /= (i + xmu);
      const double del = cc * (ff + r * q);
      sum += del;
      const double del1 = cc * p - i * del;
      sum1 += del1;
      if (std::abs(del) < (1.0 + std::abs(sum)) * kEps) break;
    }
    if (i == kMaxIter) throw NumericalError("bessel_jy: Temme series did not converge");
    rymu = -sum;
    ry1 = -sum1 * xi2;
    rymup = xmu * xi * rymu - ry1;
    rjmu = w / (rymup - f * rymu);
  } else {
    // CF2 (Steed): p + i q = (J' + i Y') / (J + i Y).
    double a = 0.25 - xmu2;
    double p = -0.5 * xi;
    double q = 1.0;
    const double br = 2.0 * x;
    double bi = 2.0;
    double fct = a * xi / (p * p + q * q);
    double cr = br + q * fct;
    double ci = bi + p * fct;
    double den = br * br + bi * bi;
    double dr = br / den;
    double di = -bi / den;
    double dlr = cr * dr - ci * di;
    double dli = cr * di + ci * dr;
    double temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    int i = 2;
    for (; i < kMaxIter; ++i) {
      a += 2 * (i - 1);
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::abs(dr) + std::abs(di) < kFpMin) dr = kFpMin;
      fct = a / (cr * cr + ci * ci);
      cr = br + cr * fct;
      ci = bi - ci * fct;
      if (std::abs(cr) + std::abs(ci) < kFpMin) cr = kFpMin;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      temp = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = temp;
      if (std::abs(dlr - 1.0) + std::abs(dli) < kEps) break;
    }
    if (i == kMaxIter) throw NumericalError("bessel_jy: CF2 did not converge");
    const double gam = (p - f) / q;
    rjmu = std::sqrt(w / ((p - f) * gam + q));
    rjmu = std::copysign(rjmu, rjl);
    rymu = rjmu * gam;
    rymup = rymu * (p + q / gam);
    ry1 = xmu * xi * rymu - rymup;
  }

  const double scale = rjmu / rjl;
  BesselJY out{};
  out.j = rjl1 * scale;
  out.jp = rjp1 * scale;
  for (int i = 1; i <= nl; ++i) {
    const double rytemp = (xmu + i) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = rytemp;
  }
  out.y = rymu;
  out.yp = nu * xi * rymu - ry1;
  return out;
}

double bessel_j(double nu, double x) {
  if (nu < 0.0 || x < 0.0) throw DomainError("bessel_j: nu >= 0 and x >= 0 required");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (x <= kSeriesLimit) return std::pow(0.5 * x, nu) * j_series_scaled(nu, x);
  return bessel_jy(nu, x).j;
}

double bessel_y(double nu, double x) {
  if (nu < 0.0) throw DomainError("bessel_y: nu >= 0 required");
  if (!(x > 0.0)) throw DomainError("bessel_y: x > 0 required (pole at 0)");
  return bessel_jy(nu, x).y;
}

double bessel_j_scaled(double nu, double x) {
  if (nu < 0.0 || x < 0.0) throw DomainError("bessel_j_scaled: nu >= 0 and x >= 0 required");
  if (x <= kSeriesLimit) return std::pow(0.5, nu) * j_series_scaled(nu, x);
  return bessel_jy(nu, x).j * std::pow(x, -nu);
}

}  // namespace hornlab::num
