#include "groupr2/simulate.hpp"

#include <Eigen/Cholesky>
#include <atomic>
#include <cmath>
#include <thread>

#include "groupr2/errors.hpp"
#include "groupr2/fit.hpp"
#include "groupr2/hyper.hpp"
#include "groupr2/model.hpp"

namespace groupr2::sim {

std::string signal_name(Signal s) {
  switch (s) {
    case Signal::Concentrated: return "concentrated";
    case Signal::RandomConcentrated: return "random-concentrated";
    case Signal::Distributed: return "distributed";
    case Signal::RandomDistributed: return "random-distributed";
    case Signal::RandomCoefficients: return "random-coefficients";
  }
  throw DomainError("signal_name: bad enum");
}

Signal signal_from_name(const std::string& name) {
  if (name == "concentrated") return Signal::Concentrated;
  if (name == "random-concentrated") return Signal::RandomConcentrated;
  if (name == "distributed") return Signal::Distributed;
  if (name == "random-distributed") return Signal::RandomDistributed;
  if (name == "random-coefficients") return Signal::RandomCoefficients;
  throw DomainError("unknown signal scenario '" + name + "'");
}

void ScenarioSpec::validate() const {
  if (n < 1 || p < 1 || group_size < 1)
    throw DomainError("ScenarioSpec: n, p, group_size must be positive");
  if (p % group_size != 0)
    throw DomainError("ScenarioSpec: p must be divisible by group_size");
  if (!(r2_target > 0.0 && r2_target < 1.0))
    throw DomainError("ScenarioSpec: r2_target in (0,1)");
  if (!(rho_in > -1.0 && rho_in < 1.0) || !(rho_out > -1.0 && rho_out < 1.0))
    throw DomainError("ScenarioSpec: correlations must lie in (-1,1)");
  if (signal == Signal::Distributed || signal == Signal::RandomDistributed ||
      signal == Signal::RandomCoefficients) {
    if (group_size < 10)
      throw DomainError("ScenarioSpec: distributed patterns span 10 slots, "
                        "group_size must be >= 10");
  }
  population_sigma_x(*this);  // PD check
}

Eigen::MatrixXd population_sigma_x(const ScenarioSpec& spec) {
  const int p = spec.p, gs = spec.group_size;
  Eigen::MatrixXd s = Eigen::MatrixXd::Constant(p, p, spec.rho_out);
  for (int g = 0; g < p / gs; ++g)
    s.block(g * gs, g * gs, gs, gs).setConstant(spec.rho_in);
  s.diagonal().setOnes();
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success)
    throw DomainError("population_sigma_x: covariance is not positive definite");
  return s;
}

Eigen::MatrixXd gen_design(const ScenarioSpec& spec, Rng& rng) {
  const Eigen::MatrixXd sigma = population_sigma_x(spec);
  const Eigen::MatrixXd chol_l = sigma.llt().matrixL();
  Eigen::MatrixXd z(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.p; ++j) z(i, j) = rng.normal();
  Eigen::MatrixXd x = z * chol_l.transpose();
  if (spec.n >= 2) model::standardize_columns(x);
  return x;
}

namespace {

void fill_concentrated(Eigen::VectorXd& b, int offset) { b[offset] = 2.0; }

void fill_distributed(Eigen::VectorXd& b, int offset) {
  for (int i = 0; i < 5; ++i) b[offset + i] = 0.5;
  for (int i = 5; i < 10; ++i) b[offset + i] = 1.0;
}

}  // namespace

Coefficients gen_coefficients(const ScenarioSpec& spec, Rng& rng) {
  spec.validate();
  const int G = spec.num_groups(), gs = spec.group_size;
  Coefficients out;
  out.b = Eigen::VectorXd::Zero(spec.p);
  switch (spec.signal) {
    case Signal::Concentrated:
      for (int g = 0; g < G; ++g) fill_concentrated(out.b, g * gs);
      break;
    case Signal::RandomConcentrated:
      for (int g = 0; g < G; ++g) out.b[g * gs] = rng.normal(0.0, 3.0);
      break;
    case Signal::Distributed:
      fill_distributed(out.b, 0);
      break;
    case Signal::RandomDistributed:
      for (int i = 0; i < 10; ++i) out.b[i] = rng.normal(0.0, 3.0);
      break;
    case Signal::RandomCoefficients:
      // first group always active, concentrated or distributed with equal
      // probability; the rest: 0.2 concentrated, 0.2 distributed, 0.6 none
      if (rng.uniform() < 0.5) {
        fill_concentrated(out.b, 0);
      } else {
        fill_distributed(out.b, 0);
      }
      for (int g = 1; g < G; ++g) {
        const double u = rng.uniform();
        if (u < 0.2) {
          fill_concentrated(out.b, g * gs);
        } else if (u < 0.4) {
          fill_distributed(out.b, g * gs);
        }
      }
      break;
  }
  out.active.resize(spec.p);
  for (int i = 0; i < spec.p; ++i) out.active[i] = out.b[i] != 0.0 ? 1 : 0;
  return out;
}

double sigma_from_r2(const Eigen::VectorXd& b, const Eigen::MatrixXd& sigma_x,
                     double r2_target) {
  if (!(r2_target > 0.0 && r2_target < 1.0))
    throw DomainError("sigma_from_r2: r2_target in (0,1)");
  const double signal_var = b.dot(sigma_x * b);
  if (!(signal_var > 0.0))
    throw DomainError("sigma_from_r2: zero signal variance, no R2 achievable");
  return signal_var * (1.0 - r2_target) / r2_target;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, const Eigen::VectorXd& b,
                             double sigma2, Rng& rng) {
  Eigen::VectorXd y = x * b;
  const double sd = std::sqrt(sigma2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += rng.normal(0.0, sd);
  return y;
}

namespace {

struct CellTask {
  Signal signal;
  double r2;
  int replication;
  int index;  // deterministic output slot
};

metrics::MetricsReport evaluate_fit(const fit::FitResult& fr,
                                    const Eigen::VectorXd& test_y,
                                    const Eigen::MatrixXd& test_x,
                                    const Eigen::VectorXd& b_true,
                                    const std::vector<std::uint8_t>& active) {
  metrics::MetricsReport rep;
  rep.elpd = metrics::elpd(test_y, test_x, fr.transformed.pooled_draws);
  const Eigen::MatrixXd b_draws = fr.transformed.pooled_b();
  rep.rmse_all = metrics::rmse_posterior(b_draws, b_true, active, metrics::Subset::All);
  rep.rmse_zero =
      metrics::rmse_posterior(b_draws, b_true, active, metrics::Subset::Zero);
  rep.rmse_nonzero =
      metrics::rmse_posterior(b_draws, b_true, active, metrics::Subset::Nonzero);
  metrics::coverage_and_roc(b_draws, b_true, active, metrics::default_roc_levels(), rep);
  rep.rhat_max = fr.rhat_max;
  rep.ess_min = fr.ess_min;
  return rep;
}

}  // namespace

StudyResult run_study(const StudyConfig& config) {
  config.sampler.validate();
  if (config.replications < 1) throw DomainError("run_study: replications >= 1");

  std::vector<CellTask> tasks;
  {
    int idx = 0;
    for (Signal sig : config.signals)
      for (double r2 : config.r2_targets)
        for (int rep = 0; rep < config.replications; ++rep)
          tasks.push_back({sig, r2, rep, idx++});
  }

  StudyResult result;
  result.cells.resize(tasks.size() * 2);
  result.deltas.resize(tasks.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      const CellTask& task = tasks[k];

      ScenarioSpec spec;
      spec.n = config.n;
      spec.p = config.p;
      spec.group_size = config.group_size;
      spec.rho_in = config.rho_in;
      spec.rho_out = config.rho_out;
      spec.r2_target = task.r2;
      spec.signal = task.signal;
      spec.seed = mix_seed(config.seed, 7000 + task.index);

      CellResult grouped, nongrouped;
      grouped.scenario = nongrouped.scenario = signal_name(task.signal);
      grouped.r2_target = nongrouped.r2_target = task.r2;
      grouped.replication = nongrouped.replication = task.replication;
      grouped.prior = config.grouped_prior;
      nongrouped.prior = "nongrouped";

      DeltaRow delta;
      delta.scenario = grouped.scenario;
      delta.r2_target = task.r2;
      delta.grouped_prior = config.grouped_prior;
      delta.replication = task.replication;

      try {
        Rng data_rng(spec.seed);
        const Eigen::MatrixXd sigma_x = population_sigma_x(spec);
        const Eigen::MatrixXd x = gen_design(spec, data_rng);
        const Coefficients coef = gen_coefficients(spec, data_rng);
        const double sigma2 = sigma_from_r2(coef.b, sigma_x, task.r2);
        const Eigen::VectorXd y = gen_response(x, coef.b, sigma2, data_rng);
        // fresh test set of the same size from the same process
        const Eigen::MatrixXd test_x = gen_design(spec, data_rng);
        const Eigen::VectorXd test_y = gen_response(test_x, coef.b, sigma2, data_rng);

        prior::GroupStructure st(std::vector<int>(spec.num_groups(), spec.group_size));
        const prior::Hyperparams hyper_g = hyper::resolve_preset(config.grouped_prior, st);
        const auto [hyper_ng, st_ng] = hyper::nongrouped_partner(hyper_g, st);

        sampler::SamplerConfig scfg = config.sampler;
        scfg.seed = mix_seed(spec.seed, 1);
        model::Model m_g(model::RegressionData(y, x, st), hyper_g);
        const fit::FitResult fr_g = fit::run_fit(m_g, scfg);
        grouped.report = evaluate_fit(fr_g, test_y, test_x, coef.b, coef.active);
        grouped.status = "ok";

        scfg.seed = mix_seed(spec.seed, 2);
        model::Model m_ng(model::RegressionData(y, x, st_ng), hyper_ng);
        const fit::FitResult fr_ng = fit::run_fit(m_ng, scfg);
        nongrouped.report = evaluate_fit(fr_ng, test_y, test_x, coef.b, coef.active);
        nongrouped.status = "ok";

        delta.delta_elpd = metrics::delta_metric(grouped.report.elpd,
                                                 nongrouped.report.elpd,
                                                 metrics::Transform::Identity);
        delta.asinh_delta_elpd = metrics::delta_metric(
            grouped.report.elpd, nongrouped.report.elpd, metrics::Transform::Asinh);
        delta.delta_rmse_all =
            grouped.report.rmse_all - nongrouped.report.rmse_all;
        delta.delta_rmse_zero =
            grouped.report.rmse_zero - nongrouped.report.rmse_zero;
        delta.delta_rmse_nonzero =
            grouped.report.rmse_nonzero - nongrouped.report.rmse_nonzero;
      } catch (const std::exception& e) {
        if (grouped.status != "ok") grouped.status = e.what();
        if (nongrouped.status != "ok") nongrouped.status = e.what();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        delta.delta_elpd = delta.asinh_delta_elpd = nan;
        delta.delta_rmse_all = delta.delta_rmse_zero = delta.delta_rmse_nonzero = nan;
      }

      result.cells[2 * task.index] = std::move(grouped);
      result.cells[2 * task.index + 1] = std::move(nongrouped);
      result.deltas[task.index] = std::move(delta);
    }
  };

  int n_workers = config.workers > 0
                      ? config.workers
                      : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<int>(n_workers, int(tasks.size()));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return result;
}

}  // namespace groupr2::sim
