#pragma once

#include <utility>

namespace groupr2::specfun {

inline constexpr double euler_gamma = 0.5772156649015328606065120900824024;
inline constexpr double pi = 3.1415926535897932384626433832795029;

// Result carrier for values that may only be representable in logs.
// When log_scale is set, value holds the natural logarithm.
struct SpecFunResult {
  double value;
  bool log_scale;
};

// ln Gamma(x) for x > 0. Relative error below 1e-13 (Lanczos, g = 607/128).
double ln_gamma(double x);

// (ln |Gamma(x)|, sign) for any non-pole real x, via reflection for x < 0.
std::pair<double, int> lgamma_signed(double x);

// ln B(a, b) for a, b > 0.
double log_beta(double a, double b);

double digamma(double x);   // x > 0
double trigamma(double x);  // x > 0

// Error function; odd, |error| < 1e-12. Thin wrapper over the libm kernel.
double erf(double x);

// Confluent hypergeometric function of the second kind U(eta, nu, z) for
// eta > 0, z > 0, any real nu. Returned on the log scale (U is positive on
// this domain). Regime switching: Kummer connection series for small z,
// Poincare asymptotic series for large z, double-exponential quadrature of
// the Laplace integral elsewhere.
double hyp_u_log(double eta, double nu, double z);
SpecFunResult hyp_u(double eta, double nu, double z);

// Gauss hypergeometric 2F1(a, b; c; z) for c > 0 and z <= 0. The argument
// is mapped into the unit disk (Pfaff z/(z-1), or 1/z for large |z|)
// before series summation.
double hyp_2f1(double a, double b, double c, double z);

// Inverse standard normal CDF (Wichura AS241), |rel err| < 1e-14.
double inv_std_normal_cdf(double p);

}  // namespace groupr2::specfun
