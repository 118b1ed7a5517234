#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace groupr2 {

// Stateless 64-bit mixer used to derive independent seed streams.
// Incrementing the salt gives statistically independent streams, so adding
// chains/workers never perturbs existing streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// Seeded random source. All distributions are implemented on top of the
// engine's raw 64-bit output, so draws are identical across platforms and
// standard libraries. Two instances with the same seed produce identical
// streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1); never returns 0.
  double uniform_pos();
  double uniform(double lo, double hi);

  // Standard normal (Marsaglia polar, second deviate cached).
  double normal();
  double normal(double mean, double sd);

  double exponential(double rate = 1.0);

  // Gamma(shape, rate). Marsaglia-Tsang for shape >= 1, power boost below.
  double gamma(double shape, double rate = 1.0);
  // log of a Gamma(shape, 1) draw; exact in log space for tiny shapes.
  double log_gamma_draw(double shape);

  double chi_square(double df);
  double student_t(double df);
  double beta(double a, double b);

  // Symmetric Dirichlet via normalized Gamma draws. Concentrations below
  // 0.05 are drawn in log space; a coordinate that would underflow past
  // 1e-300 triggers a resample (at most 100 attempts, then NumericError).
  std::vector<double> dirichlet_symmetric(std::size_t dim, double concentration);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace groupr2
