#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "groupr2/prior.hpp"

namespace groupr2::model {

// Response + standardized design + group map. Columns must arrive with unit
// sample variance (checked at construction for n >= 3, never silently
// rescaled). n = 0 is the prior-sampling mode.
struct RegressionData {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  prior::GroupStructure structure;

  RegressionData(Eigen::VectorXd y_in, Eigen::MatrixXd x_in,
                 prior::GroupStructure structure_in);
  int n() const { return static_cast<int>(y.size()); }
  int p() const { return structure.total(); }
};

// Index map for the unconstrained parameter vector:
//   [0, p)            coefficient innovations z
//   [p]               log tau2
//   [phi_off, +G-1)   group stick-breaking raws (absent for G = 1)
//   per group g       within-group raws, p_g - 1 each (absent for p_g = 1)
//   [sigma_off]       log sigma
//   [b0_off]          intercept (always parameterized)
struct ParamLayout {
  explicit ParamLayout(const prior::GroupStructure& structure);
  int p = 0, G = 0;
  int z_off = 0;
  int tau_off = 0;
  int phi_off = 0;               // valid iff G >= 2
  std::vector<int> varphi_off;   // per group, -1 when p_g = 1
  int sigma_off = 0;
  int b0_off = 0;
  int dim = 0;
  std::vector<std::string> names;  // one per unconstrained coordinate
};

class Model {
 public:
  // Resolves data-dependent prior scales: sigma_scale <= 0 becomes sd(y)
  // (1 for n < 2); intercept location/scale default to mean(y) and
  // 10 sd(y). The resolved values are frozen into hyper().
  Model(RegressionData data, prior::Hyperparams hyper);

  int dim() const { return layout_.dim; }
  const ParamLayout& layout() const { return layout_; }
  const RegressionData& data() const { return data_; }
  const prior::Hyperparams& hyper() const { return hyper_; }

  // Natural-scale quantities plus the log |Jacobian| of the constraining
  // transform. Finite input maps to a valid draw; non-finite input is a
  // domain error.
  std::pair<prior::PriorDraw, double> constrain(const Eigen::VectorXd& q) const;

  // Inverse of constrain (up to float roundoff; round trip holds to 1e-10).
  Eigen::VectorXd unconstrain(const prior::PriorDraw& draw) const;

  // Joint log density (likelihood + priors + Jacobian) with its analytic
  // gradient. Numeric trouble (underflowed scales, overflowed residuals)
  // yields -inf with a zero gradient so samplers treat the point as a
  // rejected/divergent state.
  double log_joint(const Eigen::VectorXd& q, Eigen::VectorXd& grad) const;

  double log_joint(const Eigen::VectorXd& q) const {
    Eigen::VectorXd g(dim());
    return log_joint(q, g);
  }

 private:
  RegressionData data_;
  prior::Hyperparams hyper_;
  ParamLayout layout_;
};

// log Normal(y_new; b0 + x'b, sigma2) for one posterior draw.
double pointwise_predictive_logdens(double y_new, const Eigen::VectorXd& x_new,
                                    const prior::PriorDraw& draw);

// Subtract column means and scale to unit sample variance (in place).
// Constant columns are a domain error.
void standardize_columns(Eigen::MatrixXd& X);

}  // namespace groupr2::model
