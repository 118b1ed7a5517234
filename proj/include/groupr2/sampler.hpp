#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace groupr2::sampler {

// Target: returns log density at q and fills grad. -inf marks an untenable
// state (the sampler treats it as a divergence).
using LogDensityGradient =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct SamplerConfig {
  int n_chains = 4;
  int n_warmup = 1000;
  int n_samples = 1000;
  double target_accept = 0.95;
  int max_tree_depth = 10;
  std::uint64_t seed = 0;
  bool adapt = true;

  // n_warmup >= 150 with adaptation, target_accept in [0.6, 0.99],
  // max_tree_depth <= 12
  void validate() const;
};

struct ChainResult {
  Eigen::MatrixXd draws;  // n_samples x dim, post-warmup
  std::vector<double> logp;
  std::vector<double> energy;
  std::vector<std::uint8_t> divergent;
  std::vector<int> tree_depth;
  double step_size = 0.0;
  Eigen::VectorXd inv_mass;

  int n_divergent() const;
  // energy Bayesian fraction of missing information
  double ebfmi() const;
};

struct ChainDraws {
  std::vector<ChainResult> chains;
  int dim() const { return chains.empty() ? 0 : int(chains[0].draws.cols()); }
  int n_samples() const { return chains.empty() ? 0 : int(chains[0].draws.rows()); }
  int n_chains() const { return int(chains.size()); }
  int total_divergent() const;
  double divergence_rate() const;

  // per-chain series of a scalar function of the unconstrained draw
  std::vector<std::vector<double>> quantity(
      const std::function<double(const Eigen::VectorXd&)>& f) const;
  std::vector<std::vector<double>> coordinate(int idx) const;
};

// Runs n_chains independent NUTS chains (parallel threads, per-chain RNG
// streams derived from seed by chain index; results are identical for
// identical seed/config regardless of scheduling). init, when given, seeds
// every chain's starting point; otherwise coordinates start uniform on
// (-2, 2), resampled until the target is finite (up to 100 tries).
ChainDraws sample(const LogDensityGradient& target, int dim,
                  const SamplerConfig& config,
                  std::optional<Eigen::VectorXd> init = std::nullopt);

}  // namespace groupr2::sampler
