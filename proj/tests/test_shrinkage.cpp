#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "groupr2/errors.hpp"
#include "groupr2/prior.hpp"
#include "groupr2/rng.hpp"
#include "groupr2/shrinkage.hpp"
#include "support/oracles.hpp"

using namespace groupr2;
using namespace groupr2::shrinkage;

namespace {
double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// MC estimate of E[kappa^m | tau2] via varphi_1 ~ Beta(c, (p-1)c)
double mc_kappa_moment(int m, double c, int p, double tau2, Rng& rng, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double vp = (p == 1) ? 1.0 : rng.beta(c, (p - 1) * c);
    acc += std::pow(1.0 / (1.0 + vp * tau2), m);
  }
  return acc / n;
}
}  // namespace

TEST_CASE("kappa_from_lambda2: anchors and limit") {
  CHECK(kappa_from_lambda2(0.0) == 1.0);
  CHECK(kappa_from_lambda2(1.0) == 0.5);
  CHECK(kappa_from_lambda2(1e12) < 1e-11);
  CHECK_THROWS_AS(kappa_from_lambda2(-0.1), DomainError);
}

TEST_CASE("posterior_mean_normal_means") {
  CHECK(posterior_mean_normal_means(3.7, 1.0) == 0.0);
  CHECK(posterior_mean_normal_means(3.7, 0.0) == 3.7);
  CHECK(posterior_mean_normal_means(2.0, 0.25) == doctest::Approx(1.5));
  CHECK_THROWS_AS(posterior_mean_normal_means(1.0, 1.5), DomainError);
}

TEST_CASE("kappa_moment_conditional: boundary, ordering, MC oracle") {
  CHECK(kappa_moment_conditional(1, 0.5, 10, 0.0) == 1.0);
  CHECK(kappa_moment_conditional(2, 0.5, 1, 3.0) ==
        doctest::Approx(std::pow(0.25, 2.0)).epsilon(1e-12));

  Rng rng(123);
  const double got = kappa_moment_conditional(1, 0.5, 10, 4.0);
  const double mc = mc_kappa_moment(1, 0.5, 10, 4.0, rng, 1000000);
  CHECK(rel_err(got, mc) < 0.005);

  // spot cells of the moment grid (the full grid runs in acceptance)
  for (auto [m, c, p, t] : {std::tuple{2, 0.1, 5, 0.5}, std::tuple{3, 1.0, 10, 20.0},
                            std::tuple{1, 0.1, 10, 20.0}}) {
    const double v = kappa_moment_conditional(m, c, p, t);
    const double w = mc_kappa_moment(m, c, p, t, rng, 1000000);
    CHECK(rel_err(v, w) < 0.005);
  }

  // E[kappa^2] <= E[kappa] since kappa in (0,1)
  for (double t : {0.5, 4.0, 20.0})
    CHECK(kappa_moment_conditional(2, 0.5, 10, t) <=
          kappa_moment_conditional(1, 0.5, 10, t));
}

TEST_CASE("kappa_joint_logdensity_conditional: surface, symmetry, pushforward ratios") {
  // p = 1: the surface pins kappa = 1/(1+tau2)
  const double tau2 = 3.0;
  const double k1 = 1.0 / (1.0 + tau2);
  CHECK(std::isfinite(kappa_joint_logdensity_conditional({k1}, tau2, 0.5)));
  CHECK_THROWS_AS(kappa_joint_logdensity_conditional({0.9 * k1}, tau2, 0.5), DomainError);

  // permutation invariance on a valid p = 2 point
  auto surface_point = [&](double phi1, double t) {
    return std::vector<double>{1.0 / (1.0 + phi1 * t), 1.0 / (1.0 + (1.0 - phi1) * t)};
  };
  const auto ka = surface_point(0.3, tau2);
  const std::vector<double> kb{ka[1], ka[0]};
  const double c = 0.7;
  CHECK(kappa_joint_logdensity_conditional(ka, tau2, c) ==
        doctest::Approx(kappa_joint_logdensity_conditional(kb, tau2, c)).epsilon(1e-13));

  // ratio of two on-surface points matches the Dirichlet pushforward
  // (dphi/dkappa = -1/(kappa^2 tau2) per coordinate; constants cancel)
  const auto kc = surface_point(0.55, tau2);
  const double lhs = kappa_joint_logdensity_conditional(ka, tau2, c) -
                     kappa_joint_logdensity_conditional(kc, tau2, c);
  auto push = [&](const std::vector<double>& k) {
    double v = 0.0;
    for (double kk : k) {
      const double phi = (1.0 - kk) / (kk * tau2);
      v += (c - 1.0) * std::log(phi) - 2.0 * std::log(kk);
    }
    return v;
  };
  CHECK(lhs == doctest::Approx(push(ka) - push(kc)).epsilon(1e-10));
}

TEST_CASE("kappa_joint_logdensity: tau-marginal moment and the coupling degeneracy") {
  // E[(tau^2)^{-pc}] under BetaPrime(a_G, a2) equals B(a_G-pc, a2+pc)/B(a_G, a2)
  const double a_G = 3.0, a2 = 0.5, c = 0.5;
  const int p = 2;  // pc = 1 < a_G
  Rng rng(42);
  double acc = 0.0;
  const int n = 2000000;
  for (int i = 0; i < n; ++i) {
    const double xi = rng.gamma(a2, 1.0);
    const double t = rng.gamma(a_G, xi);
    acc += std::pow(t, -double(p) * c);
  }
  const std::vector<double> kap{0.4, 0.7};
  const double joint = kappa_joint_logdensity(kap, c, a_G, a2);
  double conditional_kernel = oracle::ln_gamma(c * p) - oracle::ln_gamma(c);
  for (double k : kap)
    conditional_kernel += (c - 1.0) * std::log1p(-k) - (c + 1.0) * std::log(k);
  CHECK(rel_err(std::exp(joint - conditional_kernel), acc / n) < 0.01);

  // coupling c_g = a_G / p_g makes the first Beta shape zero: domain error
  CHECK_THROWS_AS(kappa_joint_logdensity(kap, a_G / p, a_G, a2), DomainError);
}

TEST_CASE("kappa_marginal_logdensity: horseshoe bathtub, normalization, sampling KS") {
  // c = a2 = 1/2 gives Beta(1/2, 1/2)
  const double mid = kappa_marginal_logdensity(0.5, 0.5, 1.0, 10, 0.5).value;
  const double edge = kappa_marginal_logdensity(0.05, 0.5, 1.0, 10, 0.5).value;
  CHECK(edge > mid);
  const double direct = -0.5 * std::log(0.5) - 0.5 * std::log(0.5) -
                        (oracle::ln_gamma(0.5) * 2.0 - oracle::ln_gamma(1.0)) -
                        0.5 * std::log(0.5) + 0.5 * std::log(0.5);
  (void)direct;
  CHECK(std::exp(mid) == doctest::Approx(1.0 / M_PI / std::sqrt(0.25)).epsilon(1e-10));

  // integrates to one (power substitutions flatten both endpoints; the
  // sliver where 1 - u^{1/c} rounds to 1.0 is added analytically, where the
  // transformed integrand is the constant 1/(c B(a2, c)))
  auto mass = [](double c, double a2) {
    auto lo = [&](double u) {
      const double k = std::pow(u, 1.0 / a2);
      return std::exp(kappa_marginal_logdensity(k, c, 1.0, 10, a2).value) *
             std::pow(u, 1.0 / a2 - 1.0) / a2;
    };
    auto hi = [&](double u) {
      const double k = 1.0 - std::pow(u, 1.0 / c);
      return std::exp(kappa_marginal_logdensity(k, c, 1.0, 10, a2).value) *
             std::pow(u, 1.0 / c - 1.0) / c;
    };
    const double u_min = std::pow(1e-13, c);
    const double log_b = oracle::ln_gamma(a2) + oracle::ln_gamma(c) - oracle::ln_gamma(a2 + c);
    const double stub = u_min / (c * std::exp(log_b));
    return oracle::simpson_adaptive(lo, 1e-14, std::pow(0.5, a2), 1e-11) +
           oracle::simpson_adaptive(hi, u_min, std::pow(0.5, c), 1e-11) + stub;
  };
  for (double c : {0.5, 1.5}) {
    for (double a2 : {0.5, 1.0}) {
      CHECK(std::abs(mass(c, a2) - 1.0) < 1e-8);
    }
  }

  // kappa from hierarchy draws under the coupling matches Beta(a2, c_g).
  // Tested on the complement scale 1 - kappa = lambda2/(1+lambda2) ~
  // Beta(c_g, a2): the kappa scale itself collapses ~2% of draws onto 1.0
  // in double precision (lambda2 below 1e-16), which would fake a KS jump.
  const int G = 10, pg = 10;
  const double a_G = 1.0, a2v = 0.5;
  const double cg = a_G / pg;
  Rng rng(7);
  const int n = 1000000;
  std::vector<double> ks_sample(n);
  for (int i = 0; i < n; ++i) {
    const double xi = rng.gamma(a2v, 1.0);
    const double tau2 = rng.gamma(G * a_G, xi);
    const auto phi = rng.dirichlet_symmetric(G, a_G);
    const auto vp = rng.dirichlet_symmetric(pg, cg);
    const double lambda2 = vp[0] * phi[0] * tau2;
    ks_sample[i] = lambda2 / (1.0 + lambda2);
  }
  const double ks = oracle::ks_distance(
      ks_sample, [&](double x) { return oracle::betainc(cg, a2v, x); });
  CHECK(ks < 0.01);

  // boundary poles for shapes < 1
  CHECK(kappa_marginal_logdensity(0.0, 0.5, 1.0, 10, 0.5).pole);
  CHECK(kappa_marginal_logdensity(1.0, 0.5, 1.0, 10, 0.5).pole);
  CHECK_FALSE(kappa_marginal_logdensity(1.0, 1.5, 1.0, 10, 0.5).pole);
}

TEST_CASE("meff: sums, decomposition, bookkeeping against lambda2") {
  prior::GroupStructure s({3, 2, 4});
  std::vector<double> ones(9, 1.0), zeros(9, 0.0);
  CHECK(meff(ones) == 0.0);
  CHECK(meff(zeros) == 9.0);

  Rng rng(9);
  std::vector<double> kappa(9), lambda2(9);
  for (int i = 0; i < 9; ++i) {
    lambda2[i] = rng.gamma(1.0, 1.0);
    kappa[i] = kappa_from_lambda2(lambda2[i]);
  }
  const auto per_group = meff_groups(kappa, s);
  double total = 0.0;
  for (double m : per_group) total += m;
  CHECK(total == doctest::Approx(meff(kappa)).epsilon(1e-15));
  double book = 0.0;
  for (double l2 : lambda2) book += l2 / (1.0 + l2);
  CHECK(std::abs(meff(kappa) - book) < 1e-12);
  for (int g = 0; g < 3; ++g) {
    CHECK(per_group[g] >= 0.0);
    CHECK(per_group[g] <= s.group_size(g));
  }
  CHECK_THROWS_AS(meff({1.2}), DomainError);
}

TEST_CASE("prior_predictive_meff: hyperparameter patterns") {
  const int G = 10, pg = 20;
  prior::GroupStructure s(std::vector<int>(G, pg));
  auto run = [&](double a_G, double c, int n_sims, std::uint64_t seed) {
    prior::Hyperparams h;
    h.a_G = a_G;
    h.a1 = G * a_G;
    h.a2 = 0.5;
    h.c = std::vector<double>(G, c);
    Rng rng(seed);
    auto sims = prior_predictive_meff(h, s, n_sims, rng);
    std::vector<double> flat;
    flat.reserve(sims.size() * G);
    for (const auto& row : sims)
      for (double m : row) {
        CHECK(m >= 0.0);
        CHECK(m <= pg);
        flat.push_back(m);
      }
    return flat;
  };

  // small a_G concentrates group effective sizes near zero for any c_g
  for (double c : {0.1, 0.5, 1.0}) {
    auto m = run(0.1, c, 2000, 51);
    CHECK(oracle::median(m) < 0.1 * pg);
  }
  // smaller c_g pushes mass toward lower m_eff,g at fixed a_G
  auto lo_c = run(1.0, 0.1, 2000, 52);
  auto hi_c = run(1.0, 2.0, 2000, 53);
  CHECK(oracle::median(lo_c) < oracle::median(hi_c));
}

TEST_CASE("shrinkage factors are negatively dependent within a group") {
  // sample Cov(kappa_gk, kappa_gl | tau2) < 0, sign shared with the
  // second-order Taylor approximation
  Rng rng(77);
  for (auto [c, p, tau2] : {std::tuple{0.5, 10, 4.0}, std::tuple{0.1, 5, 0.5},
                            std::tuple{1.0, 10, 20.0}, std::tuple{0.5, 5, 0.5}}) {
    const int n = 400000;
    std::vector<double> k1(n), k2(n);
    for (int i = 0; i < n; ++i) {
      const auto vp = rng.dirichlet_symmetric(p, c);
      k1[i] = 1.0 / (1.0 + vp[0] * tau2);
      k2[i] = 1.0 / (1.0 + vp[1] * tau2);
    }
    const double cov = oracle::covariance(k1, k2);
    const double mu = 1.0 / p;
    const double fp = -tau2 / ((1.0 + mu * tau2) * (1.0 + mu * tau2));
    const double fpp = 2.0 * tau2 * tau2 / std::pow(1.0 + mu * tau2, 3.0);
    const double cov_phi = -c / (double(p) * p * (p * c + 1.0));
    const double var_phi = c * (p - 1.0) / (double(p) * p * (p * c + 1.0));
    const double taylor = fp * fp * cov_phi - 0.25 * fpp * fpp * var_phi * var_phi;
    CHECK(cov < 0.0);
    CHECK(taylor < 0.0);
  }
}
