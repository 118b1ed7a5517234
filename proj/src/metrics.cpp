#include "groupr2/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "groupr2/errors.hpp"
#include "groupr2/model.hpp"

namespace groupr2::metrics {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile_sorted: empty input");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double h = (double(sorted.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - double(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double elpd(const Eigen::VectorXd& test_y, const Eigen::MatrixXd& test_x,
            const std::vector<prior::PriorDraw>& draws) {
  if (draws.empty()) throw DomainError("elpd: needs at least one draw");
  if (test_x.rows() != test_y.size())
    throw DomainError("elpd: test X rows != y length");
  if (test_x.cols() != static_cast<Eigen::Index>(draws[0].b.size()))
    throw DomainError("elpd: test X columns != coefficient count");
  const std::size_t s = draws.size();
  double total = 0.0;
  std::vector<double> lp(s);
  for (Eigen::Index i = 0; i < test_y.size(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s; ++k) {
      lp[k] = model::pointwise_predictive_logdens(test_y[i], test_x.row(i).transpose(),
                                                  draws[k]);
      mx = std::max(mx, lp[k]);
    }
    double se = 0.0;
    for (double v : lp) se += std::exp(v - mx);
    total += mx + std::log(se / double(s));
  }
  return total;
}

double rmse_posterior(const Eigen::MatrixXd& b_draws, const Eigen::VectorXd& b_true,
                      const std::vector<std::uint8_t>& active_mask, Subset subset) {
  const Eigen::Index s = b_draws.rows(), p = b_draws.cols();
  if (s < 1) throw DomainError("rmse_posterior: needs draws");
  if (b_true.size() != p || static_cast<Eigen::Index>(active_mask.size()) != p)
    throw DomainError("rmse_posterior: dimension mismatch");
  double acc = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    const bool in_subset = subset == Subset::All ||
                           (subset == Subset::Zero && !active_mask[i]) ||
                           (subset == Subset::Nonzero && active_mask[i]);
    if (!in_subset) continue;
    const double msd = (b_draws.col(i).array() - b_true[i]).square().mean();
    acc += std::sqrt(msd);
    ++count;
  }
  if (count == 0) throw DomainError("rmse_posterior: empty coefficient subset");
  return acc / double(count);
}

double delta_metric(double q_grouped, double q_nongrouped, Transform transform) {
  if (!std::isfinite(q_grouped) || !std::isfinite(q_nongrouped))
    throw DomainError("delta_metric: non-finite inputs");
  const double d = q_grouped - q_nongrouped;
  return transform == Transform::Asinh ? std::asinh(d) : d;
}

std::vector<double> default_roc_levels() {
  std::vector<double> levels;
  levels.reserve(99);
  for (int i = 1; i <= 99; ++i) levels.push_back(i / 100.0);
  return levels;
}

void coverage_and_roc(const Eigen::MatrixXd& b_draws, const Eigen::VectorXd& b_true,
                      const std::vector<std::uint8_t>& active_mask,
                      const std::vector<double>& levels, MetricsReport& report) {
  const Eigen::Index s = b_draws.rows(), p = b_draws.cols();
  if (s < 20) throw DomainError("coverage_and_roc: needs >= 20 draws for quantiles");
  if (b_true.size() != p || static_cast<Eigen::Index>(active_mask.size()) != p)
    throw DomainError("coverage_and_roc: dimension mismatch");
  for (double lv : levels)
    if (!(lv > 0.0 && lv < 1.0))
      throw DomainError("coverage_and_roc: levels must lie in (0,1)");

  std::vector<std::vector<double>> cols(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    cols[i].assign(b_draws.col(i).data(), b_draws.col(i).data() + s);
    std::sort(cols[i].begin(), cols[i].end());
  }
  int n_active = 0;
  for (auto a : active_mask) n_active += a ? 1 : 0;
  const int n_zero = int(p) - n_active;

  auto eval_level = [&](double level, double* width_out) {
    int covered = 0, tp = 0, fp = 0;
    double width = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      const double lo = quantile_sorted(cols[i], 0.5 * (1.0 - level));
      const double hi = quantile_sorted(cols[i], 1.0 - 0.5 * (1.0 - level));
      width += hi - lo;
      if (b_true[i] >= lo && b_true[i] <= hi) ++covered;
      const bool selected = lo > 0.0 || hi < 0.0;
      if (selected && active_mask[i]) ++tp;
      if (selected && !active_mask[i]) ++fp;
    }
    if (width_out) *width_out = width / double(p);
    const double sens = n_active > 0 ? double(tp) / n_active
                                     : std::numeric_limits<double>::quiet_NaN();
    const double spec = n_zero > 0 ? 1.0 - double(fp) / n_zero
                                   : std::numeric_limits<double>::quiet_NaN();
    return std::tuple{double(covered) / double(p), sens, spec};
  };

  double width95 = 0.0;
  const auto [cov95, sens95, spec95] = eval_level(0.95, &width95);
  report.coverage95 = cov95;
  report.interval_width_mean = width95;
  report.sensitivity = sens95;
  report.specificity = spec95;

  report.roc_points.clear();
  report.roc_points.reserve(levels.size());
  for (double lv : levels) {
    const auto [cov, sens, spec] = eval_level(lv, nullptr);
    (void)cov;
    report.roc_points.push_back({lv, 1.0 - spec, sens});
  }
  // intervals nest in the level, so descending level traces the ROC from
  // (0,0) to (1,1) with both coordinates nondecreasing
  std::sort(report.roc_points.begin(), report.roc_points.end(),
            [](const RocPoint& a, const RocPoint& b) { return a.level > b.level; });
}

}  // namespace groupr2::metrics
