#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "groupr2/diagnostics.hpp"
#include "groupr2/model.hpp"
#include "groupr2/sampler.hpp"

namespace groupr2::fit {

// Natural-scale views of a sampler run: per-chain series of every reported
// quantity.
struct TransformedDraws {
  std::vector<Eigen::MatrixXd> b;     // per chain: S x p
  std::vector<Eigen::MatrixXd> rg2;   // per chain: S x G (group explained variance)
  std::vector<Eigen::VectorXd> r2, sigma2, tau2, meff, b0;
  int n_chains = 0, n_samples = 0, p = 0, G = 0;

  Eigen::MatrixXd pooled_b() const;             // (chains*S) x p
  std::vector<prior::PriorDraw> pooled_draws;   // for predictive computations
};

TransformedDraws transform_draws(const model::Model& m,
                                 const sampler::ChainDraws& draws);

struct QuantitySummary {
  std::string name;
  double mean, sd, q5, q95, rhat, ess;
};

// Summaries for b, b0, sigma2, tau2, R2, R_g2, m_eff and lp.
std::vector<QuantitySummary> summarize(const model::Model& m,
                                       const sampler::ChainDraws& draws,
                                       const TransformedDraws& t);

struct FitResult {
  sampler::ChainDraws draws;
  TransformedDraws transformed;
  double rhat_max = 0.0, ess_min = 0.0;
  double divergence_rate = 0.0;
};

FitResult run_fit(const model::Model& m, const sampler::SamplerConfig& cfg);

}  // namespace groupr2::fit
