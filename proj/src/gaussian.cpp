#include "nstest/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nstest {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kSqrt2 = 1.41421356237309504880;

// Acklam's rational approximation to the normal quantile, |relative error|
// below 1.2e-9 on (0,1); used as the seed for one Newton correction.
double quantile_estimate(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - kLow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("std_normal_quantile: p must lie in (0,1)");
  }
  double y = quantile_estimate(p);
  const double density = std_normal_pdf(y);
  if (density > 0.0 && std::isfinite(y)) {
    y -= (std_normal_cdf(y) - p) / density;
  }
  return y;
}

double iso_profile(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::domain_error("iso_profile: s must lie in [0,1]");
  }
  if (s == 0.0 || s == 1.0) return 0.0;
  return std_normal_pdf(std_normal_quantile(s));
}

double psi_weight(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::domain_error("psi_weight: s must lie in [0,1]");
  }
  if (s > 0.5) s = 1.0 - s;  // evaluate one flank; keeps the symmetry exact
  if (s == 0.0) return 0.0;
  const double y = std_normal_quantile(s);
  const double density = std_normal_pdf(y);
  if (density == 0.0) {
    // Deep tail where phi underflows: Mills-ratio asymptotics in z = |y|.
    const double z2 = y * y;
    return (1.0 - 1.0 / z2 + 3.0 / (z2 * z2)) / -y;
  }
  return s / density;
}

namespace {

// Integrand after the substitution s = Phi(y): psi(Phi(y)) phi(y) = min(Phi, 1-Phi).
double min_tail(double y) {
  const double c = std_normal_cdf(y);
  return std::min(c, 1.0 - c);
}

double adaptive_simpson(double lo, double hi, double flo, double fmid, double fhi,
                        double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid);
  const double rm = 0.5 * (mid + hi);
  const double flm = min_tail(lm);
  const double frm = min_tail(rm);
  const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(lo, mid, flo, flm, fmid, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth - 1);
}

double integrate_min_tail(double lo, double hi, double tol) {
  if (!(hi > lo)) return 0.0;
  const double mid = 0.5 * (lo + hi);
  const double flo = min_tail(lo);
  const double fmid = min_tail(mid);
  const double fhi = min_tail(hi);
  const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return adaptive_simpson(lo, hi, flo, fmid, fhi, whole, tol, 40);
}

}  // namespace

double psi_integral(double a, double b) {
  if (!(a >= 0.0 && b <= 1.0 && a <= b)) {
    throw std::domain_error("psi_integral: need 0 <= a <= b <= 1");
  }
  if (a == b) return 0.0;
  // Tails beyond |y| = 12 carry less than 1e-32 of the integral.
  constexpr double kYMax = 12.0;
  const double ylo = (a <= 0.0) ? -kYMax : std::clamp(std_normal_quantile(a), -kYMax, kYMax);
  const double yhi = (b >= 1.0) ? kYMax : std::clamp(std_normal_quantile(b), -kYMax, kYMax);
  if (!(yhi > ylo)) return 0.0;
  constexpr double kTol = 2.5e-9;  // per flank; total well under the 1e-8 contract
  double total = 0.0;
  if (ylo < 0.0) total += integrate_min_tail(ylo, std::min(0.0, yhi), kTol);
  if (yhi > 0.0) total += integrate_min_tail(std::max(0.0, ylo), yhi, kTol);
  return total;
}

double curvature_factor(double curvature, double t) {
  if (!(t > 0.0)) {
    throw std::domain_error("curvature_factor: t must be positive");
  }
  if (curvature == 0.0 || std::abs(curvature) * t < 1e-8) {
    return 1.0 / std::sqrt(2.0 * t);
  }
  return 1.0 / std::sqrt(std::expm1(2.0 * curvature * t) / curvature);
}

}  // namespace nstest
