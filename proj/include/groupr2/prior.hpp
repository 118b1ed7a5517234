#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "groupr2/rng.hpp"

namespace groupr2::prior {

// Partition of p coefficients into G mutually exclusive, exhaustive groups.
// Coefficients are indexed 0..p-1 in group-major order; (g, l) pairs map
// bijectively onto that range.
class GroupStructure {
 public:
  explicit GroupStructure(std::vector<int> group_sizes);

  int num_groups() const { return static_cast<int>(sizes_.size()); }
  int total() const { return total_; }
  int group_size(int g) const { return sizes_[g]; }
  const std::vector<int>& group_sizes() const { return sizes_; }

  // first coefficient index of group g
  int offset(int g) const { return offsets_[g]; }
  int flat_index(int g, int l) const { return offsets_[g] + l; }
  // inverse map: coefficient index -> (group, within-group index)
  std::pair<int, int> group_of(int idx) const;

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
};

enum class InterceptPrior { Normal, Flat };

// Hyperparameters of the hierarchy. (a1, a2) are the Beta shapes of the R^2
// prior; the equivalent mean/precision parametrization is kept in sync.
struct Hyperparams {
  double a1 = 1.0;
  double a2 = 1.0;
  double a_G = 1.0;              // group-level symmetric Dirichlet concentration
  std::vector<double> c;         // within-group concentrations, one per group

  double sigma_df = 3.0;         // half-Student-t degrees of freedom
  double sigma_scale = -1.0;     // scale; negative means "resolve from data sd"
  InterceptPrior intercept = InterceptPrior::Normal;
  double intercept_loc = 0.0;
  double intercept_scale = -1.0; // negative means "resolve from data"

  double mu_r2() const { return a1 / (a1 + a2); }
  double nu_r2() const { return a1 + a2; }

  // throws DomainError if shapes/concentrations are not strictly positive or
  // the c vector length disagrees with the structure
  void validate(const GroupStructure& structure) const;
};

// (a1, a2) from mean/precision of the R^2 Beta prior.
std::pair<double, double> beta_shapes_from_mean_precision(double mu, double nu);

// One-to-one map between total variance and explained variance.
double tau2_to_r2(double tau2);
double r2_to_tau2(double r2);

// Concentration coupling that closes the within-group marginals.
double couple_cg_from_ag(double a_G, int p_g);
double couple_ag_from_cg(const GroupStructure& structure, const std::vector<double>& c);

// One joint draw from the hierarchy.
struct PriorDraw {
  double tau2 = 0.0;
  std::vector<double> phi;                  // G-simplex
  std::vector<std::vector<double>> varphi;  // per-group simplices
  double sigma2 = 1.0;
  std::vector<double> lambda2;              // per coefficient, = varphi * phi * tau2
  std::vector<double> b;
  double b0 = 0.0;

  double r2() const { return tau2 / (tau2 + 1.0); }
  double tau2_group(int g) const { return phi[g] * tau2; }
};

// Draws tau2 through the hierarchical Gamma representation
// (tau2 | xi ~ Gamma(a1, xi), xi ~ Gamma(a2, 1)), simplices from symmetric
// Dirichlets, sigma from the half-t, and coefficients from their normal
// kernels. A flat intercept prior yields b0 = 0 (no proper draw exists).
PriorDraw sample_prior(const Hyperparams& hyper, const GroupStructure& structure, Rng& rng);

// log density of BetaPrime(s1, s2) at x > 0.
double betaprime_logpdf(double x, double s1, double s2);

// Log density that may hit a parameter-dependent pole instead of a value.
struct LogDensity {
  double value;
  bool pole;
};

// Marginal log prior density of a single coefficient. Pole at b = 0 when
// c_g <= 1/2.
LogDensity marginal_b_logdensity(double b, double c_g, double a2);

// Joint log density of a group's coefficients conditional on its
// within-group allocation. Pole when all coefficients vanish and
// c_g < p_g / 2.
LogDensity joint_group_logdensity(const std::vector<double>& b_g,
                                  const std::vector<double>& varphi_g,
                                  double c_g, double a2);

// k-th moment of the group-wise explained variance R_g^2.
double rg2_moment(int k, double alpha_g, double alpha0, double a1, double a2);

// Correlation of log marginal variances log(phi_g varphi_gj), log(phi_g varphi_gk),
// j != k, in trigamma form. G = 1 degenerates to the pure-Dirichlet case.
double log_variance_correlation(double a_G, int G, double c_g, int p_g);

// Covariance of the raw variance proportions phi_g varphi_gj, phi_g varphi_gk.
double variance_covariance(double a_G, int G, double c_g, int p_g);

}  // namespace groupr2::prior
