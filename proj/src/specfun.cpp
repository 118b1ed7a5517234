#include "groupr2/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "groupr2/errors.hpp"

namespace groupr2::specfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Series stop rule shared by every expansion in this module: successive-term
// ratio below 1e-14, hard cap 10000 terms (cap -> NumericError).
constexpr double kSeriesTol = 1e-14;
constexpr int kSeriesCap = 10000;

std::string arg3(const char* name, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s(%.17g, %.17g, %.17g)", name, a, b, c);
  return buf;
}

bool near_integer(double x, double tol = 1e-8) {
  return std::abs(x - std::round(x)) < tol;
}

}  // namespace

// ---------------------------------------------------------------------------
// Gamma-family functions
// ---------------------------------------------------------------------------

double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("ln_gamma: requires finite x > 0, got " + std::to_string(x));
  // Lanczos approximation, g = 607/128, 15 coefficients (Godfrey's set).
  static const double g = 4.7421875;
  static const double coef[15] = {
      0.99999999999999709182,     57.156235665862923517,
      -59.597960355475491248,     14.136097974741747174,
      -0.49191381609762019978,    0.33994649984811888699e-4,
      0.46523628927048575665e-4,  -0.98374475304879564677e-4,
      0.15808870322491248884e-3,  -0.21026444172410488319e-3,
      0.21743961811521264320e-3,  -0.16431810653676389022e-3,
      0.84418223983852743293e-4,  -0.26190838401581408670e-4,
      0.36899182659531622704e-5};
  const double xx = x - 1.0;
  double s = coef[0];
  for (int k = 1; k < 15; ++k) s += coef[k] / (xx + k);
  const double t = xx + g + 0.5;
  return 0.5 * std::log(2.0 * pi) + (xx + 0.5) * std::log(t) - t + std::log(s);
}

std::pair<double, int> lgamma_signed(double x) {
  if (!std::isfinite(x)) throw DomainError("lgamma_signed: non-finite argument");
  if (x > 0.0) return {ln_gamma(x), 1};
  if (x == std::floor(x))
    throw DomainError("lgamma_signed: pole at non-positive integer " + std::to_string(x));
  // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
  const double s = std::sin(pi * x);
  const double lg = std::log(pi / std::abs(s)) - ln_gamma(1.0 - x);
  return {lg, s > 0.0 ? 1 : -1};
}

double log_beta(double a, double b) {
  return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("digamma: requires finite x > 0, got " + std::to_string(x));
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // asymptotic: ln x - 1/(2x) - sum B_{2n} / (2n x^{2n})
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = inv2 * (1.0 / 12.0 -
                  inv2 * (1.0 / 120.0 -
                  inv2 * (1.0 / 252.0 -
                  inv2 * (1.0 / 240.0 -
                  inv2 * (1.0 / 132.0 -
                  inv2 * (691.0 / 32760.0 -
                  inv2 * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("trigamma: requires finite x > 0, got " + std::to_string(x));
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // 1/x + 1/(2x^2) + sum B_{2n} x^{-(2n+1)}
  double series = inv * (1.0 / 6.0 -
                  inv2 * (1.0 / 30.0 -
                  inv2 * (1.0 / 42.0 -
                  inv2 * (1.0 / 30.0 -
                  inv2 * (5.0 / 66.0 -
                  inv2 * (691.0 / 2730.0 -
                  inv2 * (7.0 / 6.0)))))));
  return acc + inv + 0.5 * inv2 + inv2 * series;
}

double erf(double x) {
  if (!std::isfinite(x)) throw DomainError("erf: non-finite argument");
  return std::erf(x);
}

// ---------------------------------------------------------------------------
// Confluent hypergeometric U(a, b, z), a > 0, z > 0, log scale
// ---------------------------------------------------------------------------

namespace {

// Poincare expansion U ~ z^{-a} sum_n (a)_n (a-b+1)_n / (n! (-z)^n).
// Returns false when the series does not reach the tolerance while the
// terms still decrease.
bool hyp_u_asymptotic(double a, double b, double z, double& out_log) {
  double term = 1.0;
  double sum = 1.0;
  double prev = kInf;
  for (int n = 0; n < 400; ++n) {
    const double next = term * (a + n) * (a - b + 1.0 + n) / (-(z) * (n + 1));
    if (std::abs(next) >= std::abs(prev)) return false;  // divergence onset
    prev = next;
    sum += next;
    term = next;
    if (std::abs(next) < kSeriesTol * std::abs(sum)) {
      if (!(sum > 0.0)) return false;
      out_log = -a * std::log(z) + std::log(sum);
      return true;
    }
  }
  return false;
}

// Kummer series M(a, b, z); plain double, adequate for z <= 1.
bool kummer_m(double a, double b, double z, double& out) {
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 500; ++n) {
    const double denom = (b + n) * (n + 1.0);
    if (std::abs(denom) < 1e-290) return false;
    term *= (a + n) * z / denom;
    sum += term;
    if (std::abs(term) < kSeriesTol * (std::abs(sum) + 1e-300)) {
      out = sum;
      return true;
    }
  }
  return false;
}

struct SignedLog {
  double log_abs;
  int sign;  // 0 means exact zero
};

SignedLog signed_log_add(SignedLog x, SignedLog y) {
  if (x.sign == 0) return y;
  if (y.sign == 0) return x;
  if (x.log_abs < y.log_abs) std::swap(x, y);
  const double r = y.sign * x.sign > 0 ? 1.0 + std::exp(y.log_abs - x.log_abs)
                                       : 1.0 - std::exp(y.log_abs - x.log_abs);
  if (r <= 0.0) {
    if (r == 0.0) return {-kInf, 0};
    return {x.log_abs + std::log(-r), -x.sign};
  }
  return {x.log_abs + std::log(r), x.sign};
}

// Connection formula U = G1 * M(a,b,z) + G2 * z^{1-b} M(a-b+1, 2-b, z),
// valid for non-integer b. Rejected when cancellation eats the head digits.
bool hyp_u_connection(double a, double b, double z, double& out_log) {
  if (near_integer(b)) return false;
  double m1, m2;
  if (!kummer_m(a, b, z, m1)) return false;
  if (!kummer_m(a - b + 1.0, 2.0 - b, z, m2)) return false;

  const auto [lg_1mb, s_1mb] = lgamma_signed(1.0 - b);
  const auto [lg_abp1, s_abp1] = lgamma_signed(a - b + 1.0);
  const auto [lg_bm1, s_bm1] = lgamma_signed(b - 1.0);
  const double lg_a = ln_gamma(a);

  SignedLog t1{lg_1mb - lg_abp1 + std::log(std::abs(m1) + 1e-300),
               (m1 == 0.0) ? 0 : s_1mb * s_abp1 * (m1 > 0 ? 1 : -1)};
  SignedLog t2{lg_bm1 - lg_a + (1.0 - b) * std::log(z) +
                   std::log(std::abs(m2) + 1e-300),
               (m2 == 0.0) ? 0 : s_bm1 * (m2 > 0 ? 1 : -1)};
  const SignedLog sum = signed_log_add(t1, t2);
  if (sum.sign <= 0) return false;
  // more than ~4 decimal digits of cancellation: leave it to quadrature
  const double head = std::max(t1.log_abs, t2.log_abs);
  if (sum.log_abs < head - 9.2) return false;
  out_log = sum.log_abs;
  return true;
}

// Logarithmic series for b = 1:
// U(a,1,z) = -1/Gamma(a) sum_k (a)_k/(k!)^2 z^k (ln z + psi(a+k) - 2 psi(k+1)).
// Converges rapidly for z <= 1.
bool hyp_u_b1_series(double a, double z, double& out_log) {
  const double lz = std::log(z);
  double poch = 1.0;   // (a)_k / (k!)^2
  double psi_ak = digamma(a);
  double psi_k1 = -euler_gamma;  // psi(1)
  double sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double term = poch * (lz + psi_ak - 2.0 * psi_k1);
    sum += term;
    if (k > 2 && std::abs(term) < kSeriesTol * std::abs(sum)) break;
    poch *= (a + k) * z / ((k + 1.0) * (k + 1.0));
    psi_ak += 1.0 / (a + k);
    psi_k1 += 1.0 / (k + 1.0);
    if (k == 199) return false;
  }
  if (!(sum < 0.0)) return false;  // U > 0 requires a negative bracket sum
  out_log = std::log(-sum) - ln_gamma(a);
  return true;
}

// Leading behavior for z below 1e-13 (DLMF 13.2.18-13.2.22 territory).
bool hyp_u_tiny_z(double a, double b, double z, double& out_log) {
  if (near_integer(b) && std::round(b) == 1.0) {
    const double v = -(std::log(z) + digamma(a) + 2.0 * euler_gamma);
    if (!(v > 0.0)) return false;
    out_log = std::log(v) - ln_gamma(a);
    return true;
  }
  // two-term form: Gamma(1-b)/Gamma(a-b+1) + Gamma(b-1)/Gamma(a) z^{1-b}
  SignedLog c{-kInf, 0}, s{-kInf, 0};
  const bool pole_c = near_integer(1.0 - b) && 1.0 - b <= 0.0;
  const bool pole_s = near_integer(b - 1.0) && b - 1.0 <= 0.0;
  if (!pole_c) {
    const auto [ln1, s1] = lgamma_signed(1.0 - b);
    const auto [ln2, s2] = lgamma_signed(a - b + 1.0);
    c = {ln1 - ln2, s1 * s2};
  }
  if (!pole_s) {
    const auto [ln1, s1] = lgamma_signed(b - 1.0);
    s = {ln1 - ln_gamma(a) + (1.0 - b) * std::log(z), s1};
  }
  // a term next to a Gamma pole must be negligible, otherwise bail out
  if (pole_c && !(b > 1.0)) return false;
  if (pole_s && !(b < 1.0)) return false;
  const SignedLog sum = signed_log_add(c, s);
  if (sum.sign <= 0) return false;
  out_log = sum.log_abs;
  return true;
}

// log of the exp-sinh node weight for the Laplace integral
// integral_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt  with  t = exp(k sinh u).
double u_quad_node(double a, double b, double z, double u) {
  constexpr double k = 1.5707963267948966;
  const double lt = k * std::sinh(u);
  const double zt = (lt < 700.0) ? z * std::exp(lt) : kInf;
  if (!std::isfinite(zt)) return -kInf;
  const double l1pt = (lt > 0.0) ? lt + std::log1p(std::exp(-lt))
                                 : std::log1p(std::exp(lt));
  return -zt + a * lt + (b - a - 1.0) * l1pt + std::log(k * std::cosh(u));
}

double hyp_u_quadrature(double a, double b, double z) {
  constexpr double u_lo = -6.8, u_hi = 6.8;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int level = 0; level <= 8; ++level) {
    const double h = 0.85 / double(1 << level);
    const int n = static_cast<int>(std::floor((u_hi - u_lo) / h));
    std::vector<double> logs;
    logs.reserve(n + 1);
    double mx = -kInf;
    for (int i = 0; i <= n; ++i) {
      const double lv = u_quad_node(a, b, z, u_lo + i * h);
      logs.push_back(lv);
      if (lv > mx) mx = lv;
    }
    if (!std::isfinite(mx))
      throw NumericError("hyp_u: quadrature underflow at " + arg3("U", a, b, z));
    double se = 0.0;
    for (double lv : logs) se += std::exp(lv - mx);
    const double cur = mx + std::log(se) + std::log(h);
    if (level > 0 && std::abs(cur - prev) < 1e-12 * std::max(1.0, std::abs(cur)))
      return cur - ln_gamma(a);
    prev = cur;
  }
  // h = 0.85/256 without stabilizing: treat as non-convergence
  throw NumericError("hyp_u: quadrature did not converge at " + arg3("U", a, b, z));
}

}  // namespace

double hyp_u_log(double eta, double nu, double z) {
  if (!(eta > 0.0) || !std::isfinite(eta) || !std::isfinite(nu))
    throw DomainError("hyp_u: requires eta > 0, got " + arg3("U", eta, nu, z));
  if (!(z > 0.0) || !std::isfinite(z))
    throw DomainError("hyp_u: requires z > 0, got " + arg3("U", eta, nu, z));
  double out;
  if (z >= 50.0 && hyp_u_asymptotic(eta, nu, z, out)) return out;
  if (z <= 1.0 && near_integer(nu) && std::round(nu) == 1.0 &&
      hyp_u_b1_series(eta, z, out))
    return out;
  if (z < 1e-13 && hyp_u_tiny_z(eta, nu, z, out)) return out;
  if (z <= 1.0 && hyp_u_connection(eta, nu, z, out)) return out;
  return hyp_u_quadrature(eta, nu, z);
}

SpecFunResult hyp_u(double eta, double nu, double z) {
  return {hyp_u_log(eta, nu, z), true};
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric 2F1 on the z <= 0 axis
// ---------------------------------------------------------------------------

namespace {

// Plain Gauss series sum_n (a)_n (b)_n / ((c)_n n!) w^n for |w| < 1.
double gauss_series(double a, double b, double c, double w) {
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < kSeriesCap; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * w;
    const double prev_sum = sum;
    sum += term;
    if (std::abs(term) < kSeriesTol * std::abs(sum) && n > 2) return sum;
    if (!std::isfinite(sum))
      throw NumericError("hyp_2f1: series overflow at " + arg3("2F1 series", a, b, c));
    (void)prev_sum;
  }
  throw NumericError("hyp_2f1: series cap (10000 terms) hit at " +
                     arg3("2F1 series", a, b, c) + " w=" + std::to_string(w));
}

}  // namespace

double hyp_2f1(double a, double b, double c, double z) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw DomainError("hyp_2f1: requires c > 0");
  if (!(z <= 0.0) || !std::isfinite(z))
    throw DomainError("hyp_2f1: requires finite z <= 0, got " + std::to_string(z));
  if (!std::isfinite(a) || !std::isfinite(b))
    throw DomainError("hyp_2f1: non-finite parameters");
  if (z == 0.0 || a == 0.0 || b == 0.0) return 1.0;
  if (std::abs(c - b) < 1e-14) return std::pow(1.0 - z, -a);
  if (std::abs(c - a) < 1e-14) return std::pow(1.0 - z, -b);

  if (z >= -9.0) {
    // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1)), w in [0, 0.9]
    const double w = z / (z - 1.0);
    return std::pow(1.0 - z, -a) * gauss_series(a, c - b, c, w);
  }

  // large |z|: 1/z transformation, needs a-b away from integers and
  // Gamma(c-a), Gamma(c-b) away from poles
  const bool ab_int = near_integer(a - b, 1e-6);
  const bool ca_pole = c - a <= 0.0 && near_integer(c - a, 1e-6);
  const bool cb_pole = c - b <= 0.0 && near_integer(c - b, 1e-6);
  if (!ab_int && !ca_pole && !cb_pole) {
    const double iz = 1.0 / z;
    const double lg_c = ln_gamma(c);
    const auto [lg_ba, s_ba] = lgamma_signed(b - a);
    const auto [lg_ab, s_ab] = lgamma_signed(a - b);
    const auto [lg_ca, s_ca] = lgamma_signed(c - a);
    const auto [lg_cb, s_cb] = lgamma_signed(c - b);
    const auto [lg_a, s_a] = lgamma_signed(a);
    const auto [lg_b, s_b] = lgamma_signed(b);
    const double f1 = gauss_series(a, a - c + 1.0, a - b + 1.0, iz);
    const double f2 = gauss_series(b, b - c + 1.0, b - a + 1.0, iz);
    SignedLog t1{lg_c + lg_ba - lg_b - lg_ca - a * std::log(-z) +
                     std::log(std::abs(f1) + 1e-300),
                 (f1 == 0.0) ? 0 : s_ba * s_b * s_ca * (f1 > 0 ? 1 : -1)};
    SignedLog t2{lg_c + lg_ab - lg_a - lg_cb - b * std::log(-z) +
                     std::log(std::abs(f2) + 1e-300),
                 (f2 == 0.0) ? 0 : s_ab * s_a * s_cb * (f2 > 0 ? 1 : -1)};
    const SignedLog sum = signed_log_add(t1, t2);
    if (sum.sign == 0) return 0.0;
    return sum.sign * std::exp(sum.log_abs);
  }

  // integer-difference corner: fall back to the Pfaff series (slow but
  // capped; the cap raises NumericError per the series policy)
  const double w = z / (z - 1.0);
  return std::pow(1.0 - z, -a) * gauss_series(a, c - b, c, w);
}

// ---------------------------------------------------------------------------
// Inverse normal CDF (Wichura's PPND16 / AS 241)
// ---------------------------------------------------------------------------

double inv_std_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("inv_std_normal_cdf: p must be in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

}  // namespace groupr2::specfun
