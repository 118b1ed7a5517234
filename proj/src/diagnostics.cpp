#include "groupr2/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "groupr2/errors.hpp"
#include "groupr2/specfun.hpp"

namespace groupr2::diagnostics {

namespace {

// split every chain in half, dropping the middle draw of odd chains
std::vector<std::vector<double>> split_chains(
    const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> out;
  out.reserve(2 * chains.size());
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    out.emplace_back(c.begin(), c.begin() + half);
    out.emplace_back(c.end() - half, c.end());
  }
  return out;
}

bool is_constant(const std::vector<std::vector<double>>& chains) {
  const double v0 = chains[0][0];
  for (const auto& c : chains)
    for (double v : c)
      if (v != v0) return false;
  return true;
}

// pooled average ranks -> normal scores via (r - 3/8)/(S + 1/4)
std::vector<std::vector<double>> rank_normalize(
    const std::vector<std::vector<double>>& chains) {
  std::size_t total = 0;
  for (const auto& c : chains) total += c.size();
  struct Entry {
    double v;
    std::size_t chain, idx;
  };
  std::vector<Entry> pool;
  pool.reserve(total);
  for (std::size_t c = 0; c < chains.size(); ++c)
    for (std::size_t i = 0; i < chains[c].size(); ++i)
      pool.push_back({chains[c][i], c, i});
  std::sort(pool.begin(), pool.end(),
            [](const Entry& a, const Entry& b) { return a.v < b.v; });

  std::vector<std::vector<double>> z(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) z[c].resize(chains[c].size());
  std::size_t i = 0;
  while (i < pool.size()) {
    std::size_t j = i;
    while (j < pool.size() && pool[j].v == pool[i].v) ++j;
    const double avg_rank = 0.5 * double(i + 1 + j);  // average of ranks i+1..j
    const double score = groupr2::specfun::inv_std_normal_cdf(
        (avg_rank - 0.375) / (double(total) + 0.25));
    for (std::size_t k = i; k < j; ++k) z[pool[k].chain][pool[k].idx] = score;
    i = j;
  }
  return z;
}

double chain_mean(const std::vector<double>& c) {
  return std::accumulate(c.begin(), c.end(), 0.0) / double(c.size());
}

double chain_var(const std::vector<double>& c, double mean) {
  double s = 0.0;
  for (double v : c) s += (v - mean) * (v - mean);
  return s / double(c.size() - 1);
}

// classic potential scale reduction on already-transformed split chains
double rhat_basic(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  const double n = double(chains[0].size());
  std::vector<double> means(m), vars(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = chain_mean(chains[c]);
    vars[c] = chain_var(chains[c], means[c]);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / double(m);
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= n / double(m - 1);
  const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / double(m);
  if (w <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

// bulk ESS on already-transformed split chains: combined autocorrelations,
// Geyer initial positive sequence on lag pairs (rho_0+rho_1), (rho_2+rho_3),
// ..., clamped to be non-increasing
double ess_basic(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains[0].size();
  std::vector<double> means(m), vars(m);
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = chain_mean(chains[c]);
    vars[c] = chain_var(chains[c], means[c]);
  }
  // mean within-chain variance and between-chain variance
  const double w = std::accumulate(vars.begin(), vars.end(), 0.0) / double(m);
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / double(m);
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= double(n) / double(m - 1);
  const double var_plus = (double(n) - 1.0) / double(n) * w + b / double(n);
  if (!(var_plus > 0.0)) return std::numeric_limits<double>::quiet_NaN();

  // biased (1/n) autocovariances averaged across chains
  std::vector<double> acov(n, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t t = 0; t < n; ++t) {
      double s = 0.0;
      for (std::size_t i = 0; i + t < n; ++i)
        s += (chains[c][i] - means[c]) * (chains[c][i + t] - means[c]);
      acov[t] += s / double(n);
    }
  }
  for (auto& a : acov) a /= double(m);

  std::vector<double> rho(n, 0.0);
  rho[0] = 1.0;
  for (std::size_t t = 1; t < n; ++t)
    rho[t] = 1.0 - (w - acov[t] * double(n) / double(n - 1)) / var_plus;

  double sum_pairs = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t + 1 < n; t += 2) {
    double pair = rho[t] + rho[t + 1];
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    sum_pairs += pair;
  }
  const double tau = std::max(-1.0 + 2.0 * sum_pairs, 1e-12);
  double ess = double(m * n) / tau;
  // antithetic cap, as in the reference implementation
  ess = std::min(ess, double(m * n) * std::log10(double(m * n)));
  return ess;
}

std::vector<std::vector<double>> fold_around_median(
    const std::vector<std::vector<double>>& chains) {
  std::vector<double> pool;
  for (const auto& c : chains) pool.insert(pool.end(), c.begin(), c.end());
  std::nth_element(pool.begin(), pool.begin() + pool.size() / 2, pool.end());
  const double med = pool[pool.size() / 2];
  std::vector<std::vector<double>> out(chains.size());
  for (std::size_t c = 0; c < chains.size(); ++c) {
    out[c].resize(chains[c].size());
    for (std::size_t i = 0; i < chains[c].size(); ++i)
      out[c][i] = std::abs(chains[c][i] - med);
  }
  return out;
}

void check_shape(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2)
    throw DomainError("diagnostics: at least 2 chains required");
  for (const auto& c : chains)
    if (c.size() < 4) throw DomainError("diagnostics: at least 4 draws per chain");
  const std::size_t n = chains[0].size();
  for (const auto& c : chains)
    if (c.size() != n) throw DomainError("diagnostics: ragged chains");
}

}  // namespace

Diag split_rhat(const std::vector<std::vector<double>>& chains) {
  check_shape(chains);
  if (is_constant(chains)) return {1.0, true};
  const auto split = split_chains(chains);
  const double bulk = rhat_basic(rank_normalize(split));
  const double tail = rhat_basic(rank_normalize(fold_around_median(split)));
  if (std::isnan(bulk) || std::isnan(tail)) return {1.0, true};
  return {std::max(bulk, tail), false};
}

Diag ess_bulk(const std::vector<std::vector<double>>& chains) {
  check_shape(chains);
  std::size_t total = 0;
  for (const auto& c : chains) total += c.size();
  if (is_constant(chains)) return {double(total), true};
  const auto split = split_chains(chains);
  const double ess = ess_basic(rank_normalize(split));
  if (std::isnan(ess)) return {double(total), true};
  return {ess, false};
}

double mcse_mean(const std::vector<std::vector<double>>& chains) {
  double mean = 0.0, count = 0.0;
  for (const auto& c : chains)
    for (double v : c) {
      mean += v;
      count += 1.0;
    }
  mean /= count;
  double var = 0.0;
  for (const auto& c : chains)
    for (double v : c) var += (v - mean) * (v - mean);
  var /= (count - 1.0);
  const Diag e = ess_bulk(chains);
  return std::sqrt(var / std::max(1.0, e.value));
}

}  // namespace groupr2::diagnostics
