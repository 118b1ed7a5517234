#include "groupr2/rng.hpp"

#include <cmath>
#include <limits>

#include "groupr2/errors.hpp"

namespace groupr2 {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over seed ^ golden-ratio-scaled salt
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return u;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  have_cached_normal_ = true;
  return u * f;
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

double Rng::exponential(double rate) {
  return -std::log(uniform_pos()) / rate;
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw DomainError("Rng::gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // boost: X_a = X_{a+1} * U^{1/a}
    const double x = gamma(shape + 1.0, 1.0);
    const double u = uniform_pos();
    return x * std::pow(u, 1.0 / shape) / rate;
  }
  // Marsaglia-Tsang squeeze method
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double Rng::log_gamma_draw(double shape) {
  if (!(shape > 0.0)) throw DomainError("Rng::log_gamma_draw: shape must be positive");
  if (shape >= 1.0) return std::log(gamma(shape, 1.0));
  const double x = gamma(shape + 1.0, 1.0);
  const double u = uniform_pos();
  return std::log(x) + std::log(u) / shape;
}

double Rng::chi_square(double df) { return gamma(0.5 * df, 0.5); }

double Rng::student_t(double df) {
  return normal() / std::sqrt(chi_square(df) / df);
}

double Rng::beta(double a, double b) {
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

std::vector<double> Rng::dirichlet_symmetric(std::size_t dim, double concentration) {
  if (dim == 0) throw DomainError("dirichlet_symmetric: dimension must be >= 1");
  if (!(concentration > 0.0))
    throw DomainError("dirichlet_symmetric: concentration must be positive");
  std::vector<double> out(dim);
  if (dim == 1) {
    out[0] = 1.0;
    return out;
  }
  const bool log_space = concentration < 0.05;
  for (int attempt = 0; attempt < 100; ++attempt) {
    if (!log_space) {
      double sum = 0.0;
      for (auto& v : out) {
        v = gamma(concentration, 1.0);
        sum += v;
      }
      if (sum <= 0.0) continue;
      bool ok = true;
      for (auto& v : out) {
        v /= sum;
        if (v < 1e-300) { ok = false; break; }
      }
      if (ok) return out;
    } else {
      // normalize in log space: exp(lg_i - logsumexp(lg))
      double mx = -std::numeric_limits<double>::infinity();
      for (auto& v : out) {
        v = log_gamma_draw(concentration);
        if (v > mx) mx = v;
      }
      double se = 0.0;
      for (double v : out) se += std::exp(v - mx);
      const double lse = mx + std::log(se);
      bool ok = true;
      for (auto& v : out) {
        v = std::exp(v - lse);
        if (v < 1e-300) { ok = false; break; }
      }
      if (ok) return out;
    }
  }
  throw NumericError("dirichlet_symmetric: 100 resample attempts hit the 1e-300 floor");
}

}  // namespace groupr2
