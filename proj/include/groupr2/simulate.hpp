#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "groupr2/metrics.hpp"
#include "groupr2/prior.hpp"
#include "groupr2/rng.hpp"
#include "groupr2/sampler.hpp"

namespace groupr2::sim {

enum class Signal {
  Concentrated,
  RandomConcentrated,
  Distributed,
  RandomDistributed,
  RandomCoefficients,
};

std::string signal_name(Signal s);
Signal signal_from_name(const std::string& name);

// One data-generating configuration: block-exchangeable design correlation,
// a coefficient pattern, and an error variance chosen to hit a target R2.
struct ScenarioSpec {
  int n = 100;
  int p = 40;
  int group_size = 10;
  double rho_in = 0.8;
  double rho_out = 0.2;
  double r2_target = 0.5;
  Signal signal = Signal::Distributed;
  std::uint64_t seed = 0;

  int num_groups() const { return p / group_size; }
  // p divisible by group_size, correlations feasible, target in (0,1)
  void validate() const;
};

// population covariance: 1 on the diagonal, rho_in within blocks, rho_out
// across; positive definiteness is verified by a Cholesky attempt
Eigen::MatrixXd population_sigma_x(const ScenarioSpec& spec);

// n rows from N(0, Sigma_x), columns then standardized to unit sample
// variance
Eigen::MatrixXd gen_design(const ScenarioSpec& spec, Rng& rng);

struct Coefficients {
  Eigen::VectorXd b;
  std::vector<std::uint8_t> active;
};

Coefficients gen_coefficients(const ScenarioSpec& spec, Rng& rng);

// sigma2 = b' Sigma_x b (1 - R2)/R2
double sigma_from_r2(const Eigen::VectorXd& b, const Eigen::MatrixXd& sigma_x,
                     double r2_target);

// y = X b + eps
Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& b,
                             double sigma2, Rng& rng);

// --------------------------------------------------------------------------
// grouped-vs-nongrouped study
// --------------------------------------------------------------------------

struct StudyConfig {
  std::vector<Signal> signals{Signal::Distributed, Signal::Concentrated};
  std::vector<double> r2_targets{0.25, 0.8};
  int replications = 20;
  int n = 100, p = 40, group_size = 10;
  double rho_in = 0.8, rho_out = 0.2;
  std::string grouped_prior = "R2-1.0";
  sampler::SamplerConfig sampler;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency
};

// one row of metrics.csv: a (scenario, r2, prior arm, replication) cell
struct CellResult {
  std::string scenario;
  double r2_target = 0.0;
  std::string prior;
  int replication = 0;
  std::string status;  // "ok" or the failure message
  metrics::MetricsReport report;
};

struct DeltaRow {
  std::string scenario;
  double r2_target = 0.0;
  std::string grouped_prior;
  int replication = 0;
  double delta_elpd = 0.0, asinh_delta_elpd = 0.0;
  double delta_rmse_all = 0.0, delta_rmse_zero = 0.0, delta_rmse_nonzero = 0.0;
};

struct StudyResult {
  std::vector<CellResult> cells;   // grouped and nongrouped rows, paired order
  std::vector<DeltaRow> deltas;
};

// Runs every (signal x r2 x replication) cell; grouped and nongrouped fits
// share the replication's dataset (paired seeds). Cells are scheduled on a
// worker pool; output order is deterministic regardless of pool size.
// Failures are recorded in the row status, the study continues.
StudyResult run_study(const StudyConfig& config);

}  // namespace groupr2::sim
