#pragma once

// Scalar special functions: standard normal pdf/cdf/quantile, the Gaussian
// isoperimetric profile I(s) = phi(Phi^{-1}(s)), the level weight
// psi(s) = min(s, 1-s)/I(s), and the semigroup smoothing constant c_R(t).
// All functions are pure and safe to call concurrently.

namespace nstest {

double std_normal_pdf(double x);

// Phi(x), absolute error below 1e-12 (erfc-based).
double std_normal_cdf(double x);

// Inverse of Phi on (0,1): rational approximation refined by one Newton step
// on std_normal_cdf; absolute error below 1e-10. Throws std::domain_error for
// p outside (0,1).
double std_normal_quantile(double p);

// Isoperimetric profile I(s) = phi(Phi^{-1}(s)) on [0,1], with the continuous
// extension I(0) = I(1) = 0.
double iso_profile(double s);

// psi(s) = min(s, 1-s)/I(s) on (0,1), psi(0) = psi(1) = 0. Exactly symmetric:
// psi(s) == psi(1-s) bit for bit.
double psi_weight(double s);

// Integral of psi over [a, b], 0 <= a <= b <= 1. Adaptive Simpson quadrature
// in the Phi-substituted variable (where the integrand is min(Phi, 1-Phi),
// smooth away from the midpoint kink); absolute error <= 1e-8.
double psi_integral(double a, double b);

// c_R(t) = ((e^{2Rt} - 1)/R)^{-1/2} for R != 0 and (2t)^{-1/2} for R = 0;
// the R -> 0 limit is used when |R| t < 1e-8 to avoid cancellation.
// Throws std::domain_error for t <= 0.
double curvature_factor(double curvature, double t);

}  // namespace nstest
