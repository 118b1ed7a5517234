#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "groupr2/prior.hpp"

namespace groupr2::metrics {

enum class Transform { Identity, Asinh };
enum class Subset { All, Zero, Nonzero };

struct RocPoint {
  double level;
  double fpr;
  double tpr;
};

struct MetricsReport {
  double elpd = 0.0;
  double rmse_all = 0.0, rmse_zero = 0.0, rmse_nonzero = 0.0;
  double coverage95 = 0.0;
  double interval_width_mean = 0.0;
  double sensitivity = 0.0, specificity = 0.0;
  std::vector<RocPoint> roc_points;
  double rhat_max = 0.0, ess_min = 0.0;
};

// expected log pointwise predictive density over a held-out set, one
// log-mean-exp per observation across posterior draws
double elpd(const Eigen::VectorXd& test_y, const Eigen::MatrixXd& test_x,
            const std::vector<prior::PriorDraw>& draws);

// draw-wise posterior RMSE averaged over a coefficient subset
double rmse_posterior(const Eigen::MatrixXd& b_draws,  // S x p
                      const Eigen::VectorXd& b_true,
                      const std::vector<std::uint8_t>& active_mask, Subset subset);

// transform(q_grouped - q_nongrouped)
double delta_metric(double q_grouped, double q_nongrouped, Transform transform);

// equal-tailed marginal intervals per credible level; a coefficient is
// selected when its interval strictly excludes zero; a zero-width interval
// at exactly the true value counts as covering. Needs S >= 20.
// Fills coverage95/width/sensitivity/specificity (at the 0.95 level, which
// is appended to the grid if absent) and the ROC trace over `levels`.
void coverage_and_roc(const Eigen::MatrixXd& b_draws, const Eigen::VectorXd& b_true,
                      const std::vector<std::uint8_t>& active_mask,
                      const std::vector<double>& levels, MetricsReport& report);

// default ROC sweep: 99 levels over (0.005, 0.995)
std::vector<double> default_roc_levels();

// type-7 quantile of a sorted vector
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace groupr2::metrics
