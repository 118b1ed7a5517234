#include "groupr2/shrinkage.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "groupr2/errors.hpp"
#include "groupr2/specfun.hpp"

namespace groupr2::shrinkage {

namespace sf = groupr2::specfun;

double kappa_from_lambda2(double lambda2) {
  if (!(lambda2 >= 0.0) || !std::isfinite(lambda2))
    throw DomainError("kappa_from_lambda2: requires finite lambda2 >= 0");
  return 1.0 / (1.0 + lambda2);
}

double posterior_mean_normal_means(double y, double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw DomainError("posterior_mean_normal_means: kappa must be in [0, 1]");
  return (1.0 - kappa) * y;
}

double kappa_moment_conditional(int m, double c_g, int p_g, double tau_g2) {
  if (m < 1) throw DomainError("kappa_moment_conditional: m >= 1");
  if (!(c_g > 0.0) || p_g < 1 || !(tau_g2 >= 0.0))
    throw DomainError("kappa_moment_conditional: bad arguments");
  if (tau_g2 == 0.0) return 1.0;
  if (p_g == 1) return std::pow(1.0 + tau_g2, -double(m));  // 2F1(m,c;c;z)
  return sf::hyp_2f1(double(m), c_g, c_g * p_g, -tau_g2);
}

double kappa_joint_logdensity_conditional(const std::vector<double>& kappa_g,
                                          double tau_g2, double c_g) {
  const int p_g = static_cast<int>(kappa_g.size());
  if (p_g < 1) throw DomainError("kappa_joint_logdensity_conditional: empty kappa");
  if (!(tau_g2 > 0.0) || !(c_g > 0.0))
    throw DomainError("kappa_joint_logdensity_conditional: tau_g2, c_g must be > 0");
  double surface = 0.0;
  for (double k : kappa_g) {
    if (!(k > 0.0 && k < 1.0))
      throw DomainError("kappa_joint_logdensity_conditional: kappa outside (0,1)");
    surface += (1.0 - k) / k;
  }
  const double residual = surface - tau_g2;
  if (std::abs(residual) > 1e-8 * std::max(1.0, tau_g2))
    throw DomainError(
        "kappa_joint_logdensity_conditional: off the constraint surface, residual = " +
        std::to_string(residual));
  double v = sf::ln_gamma(c_g * p_g) - sf::ln_gamma(c_g) - p_g * c_g * std::log(tau_g2);
  for (double k : kappa_g)
    v += (c_g - 1.0) * std::log1p(-k) - (c_g + 1.0) * std::log(k);
  return v;
}

double kappa_joint_logdensity(const std::vector<double>& kappa_g, double c_g,
                              double a_G, double a2) {
  const int p_g = static_cast<int>(kappa_g.size());
  if (p_g < 1) throw DomainError("kappa_joint_logdensity: empty kappa");
  if (!(c_g > 0.0) || !(a_G > 0.0) || !(a2 > 0.0))
    throw DomainError("kappa_joint_logdensity: concentrations must be > 0");
  if (!(a_G > p_g * c_g))
    throw DomainError("kappa_joint_logdensity: requires a_G > p_g c_g (the "
                      "tau-marginal moment diverges otherwise)");
  // conditional constant times E[(tau_g^2)^{-p c}] under BetaPrime(a_G, a2)
  double v = sf::ln_gamma(c_g * p_g) - sf::ln_gamma(c_g) +
             sf::log_beta(a_G - p_g * c_g, a2 + p_g * c_g) - sf::log_beta(a_G, a2);
  for (double k : kappa_g) {
    if (!(k > 0.0 && k < 1.0))
      throw DomainError("kappa_joint_logdensity: kappa outside (0,1)");
    v += (c_g - 1.0) * std::log1p(-k) - (c_g + 1.0) * std::log(k);
  }
  return v;
}

prior::LogDensity kappa_marginal_logdensity(double kappa, double c_g, double a_G,
                                            int p_g, double a2) {
  if (!(c_g > 0.0) || !(a_G > 0.0) || !(a2 > 0.0) || p_g < 1)
    throw DomainError("kappa_marginal_logdensity: bad parameters");
  if (!(kappa >= 0.0 && kappa <= 1.0))
    throw DomainError("kappa_marginal_logdensity: kappa must be in [0, 1]");
  if (kappa == 0.0 || kappa == 1.0) {
    const double shape = (kappa == 0.0) ? a2 : c_g;
    if (shape < 1.0) return {std::numeric_limits<double>::infinity(), true};
    if (shape > 1.0) return {-std::numeric_limits<double>::infinity(), false};
    // shape == 1: finite boundary value of the Beta density
  }
  const double v = (a2 - 1.0) * std::log(kappa) + (c_g - 1.0) * std::log1p(-kappa) -
                   sf::log_beta(a2, c_g);
  return {v, false};
}

double meff(const std::vector<double>& kappa) {
  double s = 0.0;
  for (double k : kappa) {
    if (!(k >= 0.0 && k <= 1.0)) throw DomainError("meff: kappa must be in [0, 1]");
    s += 1.0 - k;
  }
  return s;
}

std::vector<double> meff_groups(const std::vector<double>& kappa,
                                const prior::GroupStructure& structure) {
  if (static_cast<int>(kappa.size()) != structure.total())
    throw DomainError("meff_groups: kappa length mismatch");
  std::vector<double> out(structure.num_groups(), 0.0);
  for (int g = 0; g < structure.num_groups(); ++g) {
    for (int l = 0; l < structure.group_size(g); ++l) {
      const double k = kappa[structure.flat_index(g, l)];
      if (!(k >= 0.0 && k <= 1.0)) throw DomainError("meff_groups: kappa in [0,1]");
      out[g] += 1.0 - k;
    }
  }
  return out;
}

std::vector<std::vector<double>> prior_predictive_meff(
    const prior::Hyperparams& hyper, const prior::GroupStructure& structure,
    int n_sims, Rng& rng) {
  if (n_sims < 0) throw DomainError("prior_predictive_meff: n_sims must be >= 0");
  hyper.validate(structure);
  const int G = structure.num_groups();
  std::vector<std::vector<double>> out(n_sims, std::vector<double>(G, 0.0));
  for (int s = 0; s < n_sims; ++s) {
    const double xi = rng.gamma(hyper.a2, 1.0);
    const double tau2 = rng.gamma(hyper.a1, xi);
    const auto phi = rng.dirichlet_symmetric(G, hyper.a_G);
    for (int g = 0; g < G; ++g) {
      const auto vp = rng.dirichlet_symmetric(structure.group_size(g), hyper.c[g]);
      double m = 0.0;
      for (double v : vp) {
        const double lambda2 = v * phi[g] * tau2;  // sigma = 1 convention
        m += lambda2 / (1.0 + lambda2);
      }
      out[s][g] = m;
    }
  }
  return out;
}

}  // namespace groupr2::shrinkage
