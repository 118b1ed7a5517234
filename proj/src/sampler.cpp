#include "groupr2/sampler.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "groupr2/errors.hpp"
#include "groupr2/rng.hpp"

namespace groupr2::sampler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxEnergyError = 1000.0;  // divergence threshold

struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  Eigen::VectorXd grad;
  double logp = -kInf;
};

struct Hamiltonian {
  const LogDensityGradient& target;
  Eigen::VectorXd inv_mass;  // per-coordinate variance estimate

  double energy(const PhasePoint& z) const {
    return -z.logp + 0.5 * (z.p.array().square() * inv_mass.array()).sum();
  }
  void refresh_momentum(PhasePoint& z, Rng& rng) const {
    for (Eigen::Index i = 0; i < z.p.size(); ++i)
      z.p[i] = rng.normal() / std::sqrt(inv_mass[i]);
  }
  void leapfrog(PhasePoint& z, double eps) const {
    z.p += 0.5 * eps * z.grad;
    z.q.array() += eps * (inv_mass.array() * z.p.array());
    z.logp = target(z.q, z.grad);
    z.p += 0.5 * eps * z.grad;
  }
};

// generalized U-turn criterion on a momentum sum
bool no_uturn(const Eigen::VectorXd& p_sharp_beg, const Eigen::VectorXd& p_sharp_end,
              const Eigen::VectorXd& rho) {
  return rho.dot(p_sharp_beg) > 0.0 && rho.dot(p_sharp_end) > 0.0;
}

struct TreeResult {
  bool valid = false;        // no divergence, no internal U-turn
  bool divergent = false;
  double log_sum_weight = -kInf;
  double sum_metro = 0.0;    // sum of min(1, exp(H0 - H)) over visited states
  int n_leapfrog = 0;
};

struct NutsWorker {
  const Hamiltonian& ham;
  double h0 = 0.0;
  double eps = 1.0;
  Rng& rng;

  // Builds a subtree of 2^depth states from z (modified in place to the far
  // end). On return: z_propose holds the multinomial pick, rho the momentum
  // sum, p_sharp_beg/end the metric-scaled edge momenta.
  TreeResult build_tree(int depth, PhasePoint& z, PhasePoint& z_propose,
                        Eigen::VectorXd& rho, Eigen::VectorXd& p_sharp_beg,
                        Eigen::VectorXd& p_sharp_end, double sign) {
    TreeResult res;
    if (depth == 0) {
      ham.leapfrog(z, sign * eps);
      res.n_leapfrog = 1;
      const double h = ham.energy(z);
      const double delta = std::isfinite(h) ? h - h0 : kInf;
      if (delta > kMaxEnergyError) {
        res.divergent = true;
        return res;
      }
      res.valid = true;
      res.log_sum_weight = -delta;
      res.sum_metro = delta > 0.0 ? std::exp(-delta) : 1.0;
      z_propose = z;
      rho += z.p;
      p_sharp_beg = (ham.inv_mass.array() * z.p.array()).matrix();
      p_sharp_end = p_sharp_beg;
      return res;
    }

    Eigen::VectorXd rho_first = Eigen::VectorXd::Zero(rho.size());
    Eigen::VectorXd p_sharp_first_end(rho.size());
    TreeResult first = build_tree(depth - 1, z, z_propose, rho_first, p_sharp_beg,
                                  p_sharp_first_end, sign);
    if (!first.valid) return first;

    PhasePoint z_propose_second = z;
    Eigen::VectorXd rho_second = Eigen::VectorXd::Zero(rho.size());
    Eigen::VectorXd p_sharp_second_beg(rho.size());
    TreeResult second = build_tree(depth - 1, z, z_propose_second, rho_second,
                                   p_sharp_second_beg, p_sharp_end, sign);
    res.divergent = second.divergent;
    res.n_leapfrog = first.n_leapfrog + second.n_leapfrog;
    res.sum_metro = first.sum_metro + second.sum_metro;
    if (!second.valid) return res;

    res.log_sum_weight =
        std::max(first.log_sum_weight, second.log_sum_weight) +
        std::log(std::exp(first.log_sum_weight -
                          std::max(first.log_sum_weight, second.log_sum_weight)) +
                 std::exp(second.log_sum_weight -
                          std::max(first.log_sum_weight, second.log_sum_weight)));
    // multinomial pick between the two halves
    if (std::log(rng.uniform_pos()) <= second.log_sum_weight - res.log_sum_weight)
      z_propose = z_propose_second;

    rho += rho_first + rho_second;
    res.valid = no_uturn(p_sharp_beg, p_sharp_end, rho_first + rho_second);
    return res;
  }
};

struct Transition {
  double accept_stat = 0.0;
  bool divergent = false;
  int depth = 0;
  double energy = 0.0;
};

Transition nuts_transition(const Hamiltonian& ham, PhasePoint& z, double eps,
                           int max_depth, Rng& rng) {
  ham.refresh_momentum(z, rng);
  const double h0 = ham.energy(z);

  PhasePoint z_minus = z, z_plus = z, z_sample = z;
  Eigen::VectorXd rho = z.p;
  Eigen::VectorXd p_sharp_minus = (ham.inv_mass.array() * z.p.array()).matrix();
  Eigen::VectorXd p_sharp_plus = p_sharp_minus;

  double log_sum_weight = 0.0;  // weight of the initial state: exp(-0)
  double sum_metro = 0.0;
  int n_leapfrog = 0;

  NutsWorker worker{ham, h0, eps, rng};
  Transition tr;

  for (int depth = 0; depth < max_depth; ++depth) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    PhasePoint z_propose;
    Eigen::VectorXd rho_sub = Eigen::VectorXd::Zero(z.q.size());
    Eigen::VectorXd p_sharp_sub_beg(z.q.size()), p_sharp_sub_end(z.q.size());
    TreeResult sub;
    if (sign > 0) {
      sub = worker.build_tree(depth, z_plus, z_propose, rho_sub, p_sharp_sub_beg,
                              p_sharp_sub_end, sign);
    } else {
      sub = worker.build_tree(depth, z_minus, z_propose, rho_sub, p_sharp_sub_beg,
                              p_sharp_sub_end, sign);
    }
    n_leapfrog += sub.n_leapfrog;
    sum_metro += sub.sum_metro;
    if (sub.divergent) tr.divergent = true;
    if (!sub.valid) break;

    tr.depth = depth + 1;
    // biased progressive sampling toward the new subtree
    if (sub.log_sum_weight > log_sum_weight ||
        std::log(rng.uniform_pos()) <= sub.log_sum_weight - log_sum_weight) {
      z_sample = z_propose;
    }
    const double mx = std::max(log_sum_weight, sub.log_sum_weight);
    log_sum_weight = mx + std::log(std::exp(log_sum_weight - mx) +
                                   std::exp(sub.log_sum_weight - mx));

    rho += rho_sub;
    if (sign > 0) {
      p_sharp_plus = (ham.inv_mass.array() * z_plus.p.array()).matrix();
    } else {
      p_sharp_minus = (ham.inv_mass.array() * z_minus.p.array()).matrix();
    }
    if (!no_uturn(p_sharp_minus, p_sharp_plus, rho)) break;
  }

  tr.accept_stat = n_leapfrog > 0 ? sum_metro / n_leapfrog : 0.0;
  z = z_sample;
  tr.energy = ham.energy(z);
  return tr;
}

// Nesterov dual averaging of the step size.
struct DualAveraging {
  double mu = 0.0, log_eps = 0.0, log_eps_bar = 0.0, h_bar = 0.0;
  int counter = 0;
  static constexpr double gamma = 0.05, t0 = 10.0, kappa = 0.75;

  void restart(double eps) {
    mu = std::log(10.0 * eps);
    log_eps = std::log(eps);
    log_eps_bar = 0.0;
    h_bar = 0.0;
    counter = 0;
  }
  double update(double accept, double target) {
    ++counter;
    const double frac = 1.0 / (counter + t0);
    h_bar = (1.0 - frac) * h_bar + frac * (target - accept);
    log_eps = mu - std::sqrt(double(counter)) / gamma * h_bar;
    const double eta = std::pow(double(counter), -kappa);
    log_eps_bar = eta * log_eps + (1.0 - eta) * log_eps_bar;
    return std::exp(log_eps);
  }
  double adapted() const { return std::exp(log_eps_bar); }
};

double initial_step_size(const Hamiltonian& ham, const PhasePoint& start, Rng& rng) {
  double eps = 1.0;
  PhasePoint z = start;
  ham.refresh_momentum(z, rng);
  const double h0 = ham.energy(z);
  auto delta_h = [&](double e) {
    PhasePoint zz = z;
    ham.leapfrog(zz, e);
    const double h = ham.energy(zz);
    return std::isfinite(h) ? h0 - h : -kInf;
  };
  double d = delta_h(eps);
  const double dir = d > std::log(0.8) ? 1.0 : -1.0;
  for (int it = 0; it < 100; ++it) {
    if (dir > 0 && !(d > std::log(0.8))) break;
    if (dir < 0 && !(d < std::log(0.8))) break;
    eps *= dir > 0 ? 2.0 : 0.5;
    if (eps > 1e7 || eps < 1e-10) break;
    d = delta_h(eps);
  }
  return eps;
}

// warmup schedule: 15% fast, doubling slow windows (from 25), 10% fast tail
struct AdaptSchedule {
  int init_fast = 0, term_fast = 0;
  std::vector<int> window_ends;  // iteration indices where the metric updates

  explicit AdaptSchedule(int warmup) {
    init_fast = std::max(1, int(std::lround(0.15 * warmup)));
    term_fast = std::max(1, int(std::lround(0.10 * warmup)));
    const int slow_total = warmup - init_fast - term_fast;
    if (slow_total < 20) {  // degenerate: single window over whatever is left
      if (slow_total > 0) window_ends.push_back(init_fast + slow_total);
      return;
    }
    int w = 25, at = init_fast;
    while (true) {
      const int remaining = init_fast + slow_total - at;
      if (remaining <= 0) break;
      if (2 * w >= remaining) {  // last window absorbs the remainder
        window_ends.push_back(at + remaining);
        break;
      }
      window_ends.push_back(at + w);
      at += w;
      w *= 2;
    }
  }
};

ChainResult run_chain(const LogDensityGradient& target, int dim,
                      const SamplerConfig& cfg, std::uint64_t chain_seed,
                      const std::optional<Eigen::VectorXd>& init) {
  Rng rng(chain_seed);
  Hamiltonian ham{target, Eigen::VectorXd::Ones(dim)};

  PhasePoint z;
  z.q.resize(dim);
  z.p.resize(dim);
  z.grad.resize(dim);
  bool ok = false;
  for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
    if (init && attempt == 0) {
      z.q = *init;
    } else {
      for (int i = 0; i < dim; ++i) z.q[i] = rng.uniform(-2.0, 2.0);
    }
    z.logp = target(z.q, z.grad);
    ok = std::isfinite(z.logp) && z.grad.allFinite();
  }
  if (!ok) throw NumericError("sampler: no finite initial point after 100 tries");

  double eps = cfg.adapt ? initial_step_size(ham, z, rng) : 1.0;
  DualAveraging da;
  da.restart(eps);

  AdaptSchedule sched(cfg.n_warmup);
  std::size_t window_idx = 0;
  Eigen::VectorXd acc_mean = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd acc_m2 = Eigen::VectorXd::Zero(dim);
  int acc_n = 0;
  const int slow_begin = sched.init_fast;
  const int slow_end = cfg.n_warmup - sched.term_fast;

  for (int it = 0; it < cfg.n_warmup; ++it) {
    const Transition tr = nuts_transition(ham, z, eps, cfg.max_tree_depth, rng);
    if (cfg.adapt) {
      eps = da.update(std::min(1.0, tr.accept_stat), cfg.target_accept);
      if (it >= slow_begin && it < slow_end) {
        ++acc_n;
        const Eigen::VectorXd delta = z.q - acc_mean;
        acc_mean += delta / double(acc_n);
        acc_m2.array() += (delta.array() * (z.q - acc_mean).array());
        if (window_idx < sched.window_ends.size() &&
            it + 1 == sched.window_ends[window_idx]) {
          if (acc_n >= 5) {
            const double shrink_n = double(acc_n);
            ham.inv_mass =
                ((acc_m2 / double(acc_n - 1)) * (shrink_n / (shrink_n + 5.0)))
                    .array() + 1e-3 * (5.0 / (shrink_n + 5.0));
            if (da.counter > 0) eps = da.adapted();
            da.restart(std::max(1e-10, eps));
          }
          acc_mean.setZero();
          acc_m2.setZero();
          acc_n = 0;
          ++window_idx;
        }
      }
    }
  }
  if (cfg.adapt) eps = da.adapted();

  ChainResult out;
  out.draws.resize(cfg.n_samples, dim);
  out.logp.resize(cfg.n_samples);
  out.energy.resize(cfg.n_samples);
  out.divergent.resize(cfg.n_samples);
  out.tree_depth.resize(cfg.n_samples);
  for (int it = 0; it < cfg.n_samples; ++it) {
    const Transition tr = nuts_transition(ham, z, eps, cfg.max_tree_depth, rng);
    out.draws.row(it) = z.q.transpose();
    out.logp[it] = z.logp;
    out.energy[it] = tr.energy;
    out.divergent[it] = tr.divergent ? 1 : 0;
    out.tree_depth[it] = tr.depth;
  }
  out.step_size = eps;
  out.inv_mass = ham.inv_mass;
  return out;
}

}  // namespace

void SamplerConfig::validate() const {
  if (n_chains < 1) throw DomainError("SamplerConfig: n_chains >= 1");
  if (n_samples < 1) throw DomainError("SamplerConfig: n_samples >= 1");
  if (adapt && n_warmup < 150)
    throw DomainError("SamplerConfig: n_warmup >= 150 required with adaptation");
  if (!(target_accept >= 0.6 && target_accept <= 0.99))
    throw DomainError("SamplerConfig: target_accept in [0.6, 0.99]");
  if (max_tree_depth < 1 || max_tree_depth > 12)
    throw DomainError("SamplerConfig: max_tree_depth in [1, 12]");
}

int ChainResult::n_divergent() const {
  int n = 0;
  for (auto d : divergent) n += d;
  return n;
}

double ChainResult::ebfmi() const {
  const std::size_t n = energy.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mean = 0.0;
  for (double e : energy) mean += e;
  mean /= double(n);
  double var = 0.0;
  for (double e : energy) var += (e - mean) * (e - mean);
  var /= double(n - 1);
  double diff2 = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    diff2 += (energy[i] - energy[i - 1]) * (energy[i] - energy[i - 1]);
  return (diff2 / double(n - 1)) / var;
}

int ChainDraws::total_divergent() const {
  int n = 0;
  for (const auto& c : chains) n += c.n_divergent();
  return n;
}

double ChainDraws::divergence_rate() const {
  const int total = n_chains() * n_samples();
  return total > 0 ? double(total_divergent()) / total : 0.0;
}

std::vector<std::vector<double>> ChainDraws::quantity(
    const std::function<double(const Eigen::VectorXd&)>& f) const {
  std::vector<std::vector<double>> out;
  out.reserve(chains.size());
  for (const auto& c : chains) {
    std::vector<double> series(c.draws.rows());
    for (Eigen::Index i = 0; i < c.draws.rows(); ++i)
      series[i] = f(c.draws.row(i).transpose());
    out.push_back(std::move(series));
  }
  return out;
}

std::vector<std::vector<double>> ChainDraws::coordinate(int idx) const {
  std::vector<std::vector<double>> out;
  out.reserve(chains.size());
  for (const auto& c : chains) {
    std::vector<double> series(c.draws.rows());
    for (Eigen::Index i = 0; i < c.draws.rows(); ++i) series[i] = c.draws(i, idx);
    out.push_back(std::move(series));
  }
  return out;
}

ChainDraws sample(const LogDensityGradient& target, int dim,
                  const SamplerConfig& config, std::optional<Eigen::VectorXd> init) {
  config.validate();
  if (dim < 1) throw DomainError("sample: dimension >= 1");
  if (init && init->size() != dim) throw DomainError("sample: init has wrong dimension");

  ChainDraws out;
  out.chains.resize(config.n_chains);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(config.n_chains);
  for (int c = 0; c < config.n_chains; ++c) {
    threads.emplace_back([&, c] {
      try {
        out.chains[c] =
            run_chain(target, dim, config, mix_seed(config.seed, 1000 + c), init);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace groupr2::sampler
