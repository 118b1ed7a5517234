#include "groupr2/fit.hpp"

#include <algorithm>
#include <cmath>

#include "groupr2/metrics.hpp"

namespace groupr2::fit {

Eigen::MatrixXd TransformedDraws::pooled_b() const {
  Eigen::MatrixXd out(n_chains * n_samples, p);
  for (int c = 0; c < n_chains; ++c)
    out.middleRows(c * n_samples, n_samples) = b[c];
  return out;
}

TransformedDraws transform_draws(const model::Model& m,
                                 const sampler::ChainDraws& draws) {
  TransformedDraws t;
  t.n_chains = draws.n_chains();
  t.n_samples = draws.n_samples();
  t.p = m.layout().p;
  t.G = m.layout().G;
  t.pooled_draws.reserve(std::size_t(t.n_chains) * t.n_samples);
  for (int c = 0; c < t.n_chains; ++c) {
    Eigen::MatrixXd bc(t.n_samples, t.p), rg2c(t.n_samples, t.G);
    Eigen::VectorXd r2c(t.n_samples), s2c(t.n_samples), tau2c(t.n_samples),
        meffc(t.n_samples), b0c(t.n_samples);
    for (int i = 0; i < t.n_samples; ++i) {
      const auto [d, lj] = m.constrain(draws.chains[c].draws.row(i).transpose());
      for (int j = 0; j < t.p; ++j) bc(i, j) = d.b[j];
      const double r2 = d.r2();
      for (int g = 0; g < t.G; ++g) rg2c(i, g) = d.phi[g] * r2;
      r2c[i] = r2;
      s2c[i] = d.sigma2;
      tau2c[i] = d.tau2;
      double me = 0.0;
      for (double l2 : d.lambda2) me += l2 / (1.0 + l2);
      meffc[i] = me;
      b0c[i] = d.b0;
      t.pooled_draws.push_back(d);
    }
    t.b.push_back(std::move(bc));
    t.rg2.push_back(std::move(rg2c));
    t.r2.push_back(std::move(r2c));
    t.sigma2.push_back(std::move(s2c));
    t.tau2.push_back(std::move(tau2c));
    t.meff.push_back(std::move(meffc));
    t.b0.push_back(std::move(b0c));
  }
  return t;
}

namespace {

std::vector<std::vector<double>> per_chain_column(
    const std::vector<Eigen::MatrixXd>& mats, int col) {
  std::vector<std::vector<double>> out;
  out.reserve(mats.size());
  for (const auto& mat : mats) {
    std::vector<double> s(mat.rows());
    for (Eigen::Index i = 0; i < mat.rows(); ++i) s[i] = mat(i, col);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<double>> per_chain_vector(
    const std::vector<Eigen::VectorXd>& vecs) {
  std::vector<std::vector<double>> out;
  out.reserve(vecs.size());
  for (const auto& v : vecs)
    out.emplace_back(v.data(), v.data() + v.size());
  return out;
}

QuantitySummary summarize_series(const std::string& name,
                                 const std::vector<std::vector<double>>& series) {
  std::vector<double> flat;
  for (const auto& c : series) flat.insert(flat.end(), c.begin(), c.end());
  double mean = 0.0;
  for (double v : flat) mean += v;
  mean /= double(flat.size());
  double var = 0.0;
  for (double v : flat) var += (v - mean) * (v - mean);
  var /= double(flat.size() - 1);
  std::sort(flat.begin(), flat.end());
  return {name,
          mean,
          std::sqrt(var),
          metrics::quantile_sorted(flat, 0.05),
          metrics::quantile_sorted(flat, 0.95),
          diagnostics::split_rhat(series).value,
          diagnostics::ess_bulk(series).value};
}

}  // namespace

std::vector<QuantitySummary> summarize(const model::Model& m,
                                       const sampler::ChainDraws& draws,
                                       const TransformedDraws& t) {
  std::vector<QuantitySummary> out;
  const auto& st = m.data().structure;
  for (int j = 0; j < t.p; ++j) {
    const auto [g, l] = st.group_of(j);
    out.push_back(summarize_series(
        "b[" + std::to_string(g + 1) + "," + std::to_string(l + 1) + "]",
        per_chain_column(t.b, j)));
  }
  out.push_back(summarize_series("b0", per_chain_vector(t.b0)));
  out.push_back(summarize_series("sigma2", per_chain_vector(t.sigma2)));
  out.push_back(summarize_series("tau2", per_chain_vector(t.tau2)));
  out.push_back(summarize_series("R2", per_chain_vector(t.r2)));
  for (int g = 0; g < t.G; ++g)
    out.push_back(summarize_series("Rg2[" + std::to_string(g + 1) + "]",
                                   per_chain_column(t.rg2, g)));
  out.push_back(summarize_series("m_eff", per_chain_vector(t.meff)));
  {
    std::vector<std::vector<double>> lp;
    for (const auto& c : draws.chains) lp.push_back(c.logp);
    out.push_back(summarize_series("lp", lp));
  }
  return out;
}

FitResult run_fit(const model::Model& m, const sampler::SamplerConfig& cfg) {
  FitResult r;
  auto target = [&m](const Eigen::VectorXd& q, Eigen::VectorXd& grad) {
    return m.log_joint(q, grad);
  };
  r.draws = sampler::sample(target, m.dim(), cfg);
  r.transformed = transform_draws(m, r.draws);
  r.divergence_rate = r.draws.divergence_rate();

  // convergence scan over coefficients and key scalars
  r.rhat_max = 0.0;
  r.ess_min = std::numeric_limits<double>::infinity();
  auto scan = [&](const std::vector<std::vector<double>>& series) {
    const auto rh = diagnostics::split_rhat(series);
    const auto es = diagnostics::ess_bulk(series);
    if (!rh.degenerate) r.rhat_max = std::max(r.rhat_max, rh.value);
    if (!es.degenerate) r.ess_min = std::min(r.ess_min, es.value);
  };
  for (int j = 0; j < r.transformed.p; ++j) scan(per_chain_column(r.transformed.b, j));
  scan(per_chain_vector(r.transformed.r2));
  scan(per_chain_vector(r.transformed.sigma2));
  if (!std::isfinite(r.ess_min)) r.ess_min = 0.0;
  return r;
}

}  // namespace groupr2::fit
