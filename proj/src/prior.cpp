#include "groupr2/prior.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "groupr2/errors.hpp"
#include "groupr2/specfun.hpp"

namespace groupr2::prior {

namespace sf = groupr2::specfun;

GroupStructure::GroupStructure(std::vector<int> group_sizes)
    : sizes_(std::move(group_sizes)) {
  if (sizes_.empty()) throw DomainError("GroupStructure: needs at least one group");
  offsets_.reserve(sizes_.size());
  for (int s : sizes_) {
    if (s < 1) throw DomainError("GroupStructure: group sizes must be >= 1");
    offsets_.push_back(total_);
    total_ += s;
  }
}

std::pair<int, int> GroupStructure::group_of(int idx) const {
  if (idx < 0 || idx >= total_) throw DomainError("GroupStructure: index out of range");
  int g = static_cast<int>(sizes_.size()) - 1;
  while (offsets_[g] > idx) --g;
  return {g, idx - offsets_[g]};
}

void Hyperparams::validate(const GroupStructure& structure) const {
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw DomainError("Hyperparams: a1, a2 must be > 0");
  if (!(a_G > 0.0)) throw DomainError("Hyperparams: a_G must be > 0");
  if (static_cast<int>(c.size()) != structure.num_groups())
    throw DomainError("Hyperparams: c has " + std::to_string(c.size()) +
                      " entries for " + std::to_string(structure.num_groups()) + " groups");
  for (double cg : c)
    if (!(cg > 0.0)) throw DomainError("Hyperparams: all c_g must be > 0");
  if (!(sigma_df > 0.0)) throw DomainError("Hyperparams: sigma_df must be > 0");
  // derived mean/precision must be self-consistent
  const auto [ra1, ra2] = beta_shapes_from_mean_precision(mu_r2(), nu_r2());
  if (std::abs(ra1 - a1) > 1e-12 * std::max(1.0, a1) ||
      std::abs(ra2 - a2) > 1e-12 * std::max(1.0, a2))
    throw DomainError("Hyperparams: inconsistent (mu, nu) <-> (a1, a2)");
}

std::pair<double, double> beta_shapes_from_mean_precision(double mu, double nu) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("beta shapes: mean must be in (0,1)");
  if (!(nu > 0.0)) throw DomainError("beta shapes: precision must be > 0");
  return {mu * nu, (1.0 - mu) * nu};
}

double tau2_to_r2(double tau2) {
  if (!(tau2 >= 0.0) || !std::isfinite(tau2))
    throw DomainError("tau2_to_r2: requires finite tau2 >= 0");
  return tau2 / (tau2 + 1.0);
}

double r2_to_tau2(double r2) {
  if (!(r2 >= 0.0 && r2 < 1.0))
    throw DomainError("r2_to_tau2: requires r2 in [0, 1)");
  return r2 / (1.0 - r2);
}

double couple_cg_from_ag(double a_G, int p_g) {
  if (!(a_G > 0.0) || p_g < 1) throw DomainError("couple_cg_from_ag: a_G > 0, p_g >= 1");
  return a_G / p_g;
}

double couple_ag_from_cg(const GroupStructure& structure, const std::vector<double>& c) {
  if (static_cast<int>(c.size()) != structure.num_groups())
    throw DomainError("couple_ag_from_cg: length mismatch");
  double sum = 0.0;
  for (int g = 0; g < structure.num_groups(); ++g) {
    if (!(c[g] > 0.0)) throw DomainError("couple_ag_from_cg: c_g must be > 0");
    sum += structure.group_size(g) * c[g];
  }
  return sum / structure.num_groups();
}

PriorDraw sample_prior(const Hyperparams& hyper, const GroupStructure& structure, Rng& rng) {
  hyper.validate(structure);
  const int G = structure.num_groups();
  const int p = structure.total();

  PriorDraw d;
  // tau2 ~ BetaPrime(a1, a2) via the Gamma-Gamma representation
  const double xi = rng.gamma(hyper.a2, 1.0);
  d.tau2 = rng.gamma(hyper.a1, xi);

  d.phi = rng.dirichlet_symmetric(G, hyper.a_G);
  d.varphi.resize(G);
  for (int g = 0; g < G; ++g)
    d.varphi[g] = rng.dirichlet_symmetric(structure.group_size(g), hyper.c[g]);

  const double sigma_scale = hyper.sigma_scale > 0.0 ? hyper.sigma_scale : 1.0;
  const double sigma = sigma_scale * std::abs(rng.student_t(hyper.sigma_df));
  d.sigma2 = sigma * sigma;

  d.lambda2.resize(p);
  d.b.resize(p);
  for (int g = 0; g < G; ++g) {
    for (int l = 0; l < structure.group_size(g); ++l) {
      const int i = structure.flat_index(g, l);
      d.lambda2[i] = d.varphi[g][l] * d.phi[g] * d.tau2;
      d.b[i] = rng.normal() * sigma * std::sqrt(d.lambda2[i]);
    }
  }

  if (hyper.intercept == InterceptPrior::Normal) {
    const double loc = hyper.intercept_loc;
    const double scale = hyper.intercept_scale > 0.0 ? hyper.intercept_scale : 10.0;
    d.b0 = rng.normal(loc, scale);
  } else {
    d.b0 = 0.0;  // improper flat prior has no draw
  }
  return d;
}

double betaprime_logpdf(double x, double s1, double s2) {
  if (!(x > 0.0)) throw DomainError("betaprime_logpdf: requires x > 0");
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw DomainError("betaprime_logpdf: shapes must be > 0");
  return (s1 - 1.0) * std::log(x) - (s1 + s2) * std::log1p(x) - sf::log_beta(s1, s2);
}

LogDensity marginal_b_logdensity(double b, double c_g, double a2) {
  if (!(c_g > 0.0) || !(a2 > 0.0))
    throw DomainError("marginal_b_logdensity: c_g, a2 must be > 0");
  if (!std::isfinite(b)) throw DomainError("marginal_b_logdensity: non-finite b");
  const double z = 0.5 * b * b;
  if (z == 0.0) {
    if (c_g <= 0.5) return {std::numeric_limits<double>::infinity(), true};
    // finite at the origin: U(eta, nu, 0) = Gamma(1-nu)/Gamma(eta-nu+1), nu < 1
    const double eta = a2 + 0.5;
    const double nu = 1.5 - c_g;
    const double log_u0 = sf::ln_gamma(1.0 - nu) - sf::ln_gamma(eta - nu + 1.0);
    const double v = -0.5 * std::log(2.0 * sf::pi) - sf::log_beta(c_g, a2) +
                     sf::ln_gamma(eta) + log_u0;
    return {v, false};
  }
  const double eta = a2 + 0.5;
  const double nu = 1.5 - c_g;
  const double v = -0.5 * std::log(2.0 * sf::pi) - sf::log_beta(c_g, a2) +
                   sf::ln_gamma(eta) + sf::hyp_u_log(eta, nu, z);
  return {v, false};
}

LogDensity joint_group_logdensity(const std::vector<double>& b_g,
                                  const std::vector<double>& varphi_g,
                                  double c_g, double a2) {
  const int p_g = static_cast<int>(b_g.size());
  if (p_g < 1 || varphi_g.size() != b_g.size())
    throw DomainError("joint_group_logdensity: dimension mismatch");
  if (!(c_g > 0.0) || !(a2 > 0.0))
    throw DomainError("joint_group_logdensity: c_g, a2 must be > 0");
  double sum_vp = 0.0, log_prod_vp = 0.0, z = 0.0;
  for (int l = 0; l < p_g; ++l) {
    if (!(varphi_g[l] > 0.0)) throw DomainError("joint_group_logdensity: varphi_g must be positive");
    sum_vp += varphi_g[l];
    log_prod_vp += std::log(varphi_g[l]);
    z += b_g[l] * b_g[l] / (2.0 * varphi_g[l]);
  }
  if (std::abs(sum_vp - 1.0) > 1e-8)
    throw DomainError("joint_group_logdensity: varphi_g is not on the simplex");
  if (z == 0.0 && c_g < 0.5 * p_g)
    return {std::numeric_limits<double>::infinity(), true};
  const double eta = a2 + 0.5 * p_g;
  const double nu = 1.0 + 0.5 * p_g - c_g;
  double log_u;
  if (z == 0.0) {
    log_u = sf::ln_gamma(1.0 - nu) - sf::ln_gamma(eta - nu + 1.0);
  } else {
    log_u = sf::hyp_u_log(eta, nu, z);
  }
  const double v = -0.5 * p_g * std::log(2.0 * sf::pi) - sf::log_beta(c_g, a2) -
                   0.5 * log_prod_vp + sf::ln_gamma(eta) + log_u;
  return {v, false};
}

double rg2_moment(int k, double alpha_g, double alpha0, double a1, double a2) {
  if (k < 0) throw DomainError("rg2_moment: k must be >= 0");
  if (!(alpha_g > 0.0) || !(alpha0 >= alpha_g) || !(a1 > 0.0) || !(a2 > 0.0))
    throw DomainError("rg2_moment: requires alpha0 >= alpha_g > 0 and positive shapes");
  double m = 1.0;
  for (int i = 0; i < k; ++i)
    m *= (alpha_g + i) / (alpha0 + i) * (a1 + i) / (a1 + a2 + i);
  return m;
}

double log_variance_correlation(double a_G, int G, double c_g, int p_g) {
  if (!(a_G > 0.0) || !(c_g > 0.0) || G < 1 || p_g < 2)
    throw DomainError("log_variance_correlation: requires a_G, c_g > 0, G >= 1, p_g >= 2");
  // Var(log phi_g) = psi1(a_G) - psi1(G a_G); zero when G = 1
  const double var_log_phi = sf::trigamma(a_G) - sf::trigamma(G * a_G);
  const double cov_within = -sf::trigamma(p_g * c_g);
  const double var_within = sf::trigamma(c_g) - sf::trigamma(p_g * c_g);
  return (var_log_phi + cov_within) / (var_log_phi + var_within);
}

double variance_covariance(double a_G, int G, double c_g, int p_g) {
  if (!(a_G > 0.0) || !(c_g > 0.0) || G < 1)
    throw DomainError("variance_covariance: requires positive concentrations");
  if (p_g < 2)
    throw DomainError("variance_covariance: p_g >= 2 required for distinct j, k");
  const double e_phi2 = a_G * (a_G + 1.0) / (G * a_G * (G * a_G + 1.0));
  // E[varphi_gj varphi_gk] = c/(p(cp+1)); the c^2/p^2 variant fails the
  // Monte Carlo check.
  const double e_cross = c_g / (p_g * (c_g * p_g + 1.0));
  return e_phi2 * e_cross - 1.0 / (double(G) * G * p_g * p_g);
}

}  // namespace groupr2::prior
