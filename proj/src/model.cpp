#include "groupr2/model.hpp"

#include <cmath>
#include <limits>

#include "groupr2/errors.hpp"
#include "groupr2/specfun.hpp"

namespace groupr2::model {

namespace sf = groupr2::specfun;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  return t > 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

// Centered stick-breaking: zero raws map to the uniform simplex. Fills phi
// (size K) and the per-stick fractions v (size K-1), returns log |Jacobian|.
double stick_forward(const double* raw, int K, std::vector<double>& phi,
                     std::vector<double>& v) {
  phi.resize(K);
  v.resize(K - 1);
  double rem = 1.0, log_j = 0.0;
  for (int k = 0; k < K - 1; ++k) {
    const double vk = sigmoid(raw[k] - std::log(double(K - 1 - k)));
    v[k] = vk;
    phi[k] = vk * rem;
    log_j += std::log(vk) + std::log1p(-vk) + std::log(rem);
    rem *= (1.0 - vk);
  }
  phi[K - 1] = rem;
  return log_j;
}

// Reverse pass: dL/dphi (all K entries) plus the unit pull on log|Jacobian|
// propagated back to the raws.
void stick_backward(const std::vector<double>& phi, const std::vector<double>& v,
                    const double* g_phi, double* g_raw) {
  const int K = static_cast<int>(phi.size());
  // rebuild the remainder sequence rem_k (before stick k is taken)
  std::vector<double> rem(K);
  rem[0] = 1.0;
  for (int k = 1; k < K; ++k) rem[k] = rem[k - 1] * (1.0 - v[k - 1]);
  double d_rem = g_phi[K - 1];  // phi_{K-1} = rem_{K-1}
  for (int k = K - 2; k >= 0; --k) {
    // phi_k = v_k rem_k ; rem_{k+1} = (1 - v_k) rem_k ; J terms in v_k, rem_k
    double d_v = g_phi[k] * rem[k] - d_rem * rem[k];
    double d_rem_k = g_phi[k] * v[k] + d_rem * (1.0 - v[k]);
    d_v += 1.0 / v[k] - 1.0 / (1.0 - v[k]);  // from log v + log(1-v)
    d_rem_k += 1.0 / rem[k];                 // from log rem
    g_raw[k] = d_v * v[k] * (1.0 - v[k]);
    d_rem = d_rem_k;
  }
}

}  // namespace

RegressionData::RegressionData(Eigen::VectorXd y_in, Eigen::MatrixXd x_in,
                               prior::GroupStructure structure_in)
    : y(std::move(y_in)), X(std::move(x_in)), structure(std::move(structure_in)) {
  if (X.rows() != y.size())
    throw DomainError("RegressionData: X rows != y length");
  if (X.cols() != structure.total())
    throw DomainError("RegressionData: X has " + std::to_string(X.cols()) +
                      " columns for p = " + std::to_string(structure.total()));
  if (!y.allFinite() || !X.allFinite())
    throw DomainError("RegressionData: non-finite entries");
  if (n() >= 3) {
    for (int j = 0; j < X.cols(); ++j) {
      const double mean = X.col(j).mean();
      const double var =
          (X.col(j).array() - mean).square().sum() / double(n() - 1);
      if (std::abs(var - 1.0) > 1e-6)
        throw DomainError("RegressionData: column " + std::to_string(j) +
                          " is not standardized (sample variance " +
                          std::to_string(var) + ")");
    }
  }
}

ParamLayout::ParamLayout(const prior::GroupStructure& structure) {
  p = structure.total();
  G = structure.num_groups();
  z_off = 0;
  tau_off = p;
  int at = p + 1;
  names.reserve(p + G + 4);
  for (int g = 0; g < G; ++g)
    for (int l = 0; l < structure.group_size(g); ++l)
      names.push_back("z[" + std::to_string(g + 1) + "," + std::to_string(l + 1) + "]");
  names.push_back("log_tau2");
  phi_off = at;
  if (G >= 2) {
    for (int k = 0; k < G - 1; ++k) names.push_back("phi_raw[" + std::to_string(k + 1) + "]");
    at += G - 1;
  }
  varphi_off.assign(G, -1);
  for (int g = 0; g < G; ++g) {
    if (structure.group_size(g) >= 2) {
      varphi_off[g] = at;
      for (int k = 0; k < structure.group_size(g) - 1; ++k)
        names.push_back("varphi_raw[" + std::to_string(g + 1) + "," + std::to_string(k + 1) + "]");
      at += structure.group_size(g) - 1;
    }
  }
  sigma_off = at++;
  names.push_back("log_sigma");
  b0_off = at++;
  names.push_back("b0");
  dim = at;
}

Model::Model(RegressionData data, prior::Hyperparams hyper)
    : data_(std::move(data)), hyper_(std::move(hyper)), layout_(data_.structure) {
  hyper_.validate(data_.structure);
  const int n = data_.n();
  double sd_y = 1.0, mean_y = 0.0;
  if (n >= 2) {
    mean_y = data_.y.mean();
    sd_y = std::sqrt((data_.y.array() - mean_y).square().sum() / double(n - 1));
    if (!(sd_y > 0.0)) sd_y = 1.0;
  }
  if (hyper_.sigma_scale <= 0.0) hyper_.sigma_scale = sd_y;
  if (hyper_.intercept == prior::InterceptPrior::Normal && hyper_.intercept_scale <= 0.0) {
    hyper_.intercept_loc = mean_y;
    hyper_.intercept_scale = 10.0 * sd_y;
  }
}

std::pair<prior::PriorDraw, double> Model::constrain(const Eigen::VectorXd& q) const {
  if (q.size() != layout_.dim) throw DomainError("constrain: wrong dimension");
  if (!q.allFinite()) throw DomainError("constrain: non-finite input");
  const auto& st = data_.structure;
  const int G = layout_.G;

  prior::PriorDraw d;
  double log_j = 0.0;
  d.tau2 = std::exp(q[layout_.tau_off]);
  log_j += q[layout_.tau_off];
  const double sigma = std::exp(q[layout_.sigma_off]);
  d.sigma2 = sigma * sigma;
  log_j += q[layout_.sigma_off];
  d.b0 = q[layout_.b0_off];

  std::vector<double> v_scratch;
  if (G >= 2) {
    log_j += stick_forward(q.data() + layout_.phi_off, G, d.phi, v_scratch);
  } else {
    d.phi = {1.0};
  }
  d.varphi.resize(G);
  for (int g = 0; g < G; ++g) {
    const int pg = st.group_size(g);
    if (pg >= 2) {
      log_j += stick_forward(q.data() + layout_.varphi_off[g], pg, d.varphi[g], v_scratch);
    } else {
      d.varphi[g] = {1.0};
    }
  }
  d.lambda2.resize(layout_.p);
  d.b.resize(layout_.p);
  for (int g = 0; g < G; ++g) {
    for (int l = 0; l < st.group_size(g); ++l) {
      const int i = st.flat_index(g, l);
      d.lambda2[i] = d.varphi[g][l] * d.phi[g] * d.tau2;
      d.b[i] = q[layout_.z_off + i] * sigma * std::sqrt(d.lambda2[i]);
    }
  }
  return {d, log_j};
}

namespace {

// inverse stick-breaking: raws from a simplex vector
void stick_inverse(const std::vector<double>& phi, double* raw) {
  const int K = static_cast<int>(phi.size());
  double rem = 1.0;
  for (int k = 0; k < K - 1; ++k) {
    const double v = phi[k] / rem;
    raw[k] = std::log(v / (1.0 - v)) + std::log(double(K - 1 - k));
    rem -= phi[k];
  }
}

}  // namespace

Eigen::VectorXd Model::unconstrain(const prior::PriorDraw& draw) const {
  const auto& st = data_.structure;
  Eigen::VectorXd q(layout_.dim);
  const double sigma = std::sqrt(draw.sigma2);
  for (int g = 0; g < layout_.G; ++g) {
    for (int l = 0; l < st.group_size(g); ++l) {
      const int i = st.flat_index(g, l);
      q[layout_.z_off + i] = draw.b[i] / (sigma * std::sqrt(draw.lambda2[i]));
    }
  }
  q[layout_.tau_off] = std::log(draw.tau2);
  if (layout_.G >= 2) stick_inverse(draw.phi, q.data() + layout_.phi_off);
  for (int g = 0; g < layout_.G; ++g)
    if (st.group_size(g) >= 2) stick_inverse(draw.varphi[g], q.data() + layout_.varphi_off[g]);
  q[layout_.sigma_off] = std::log(sigma);
  q[layout_.b0_off] = draw.b0;
  return q;
}

double Model::log_joint(const Eigen::VectorXd& q, Eigen::VectorXd& grad) const {
  if (q.size() != layout_.dim) throw DomainError("log_joint: wrong dimension");
  if (!q.allFinite()) throw DomainError("log_joint: non-finite input");
  grad.setZero(layout_.dim);

  const auto& st = data_.structure;
  const int G = layout_.G;
  const int p = layout_.p;
  const int n = data_.n();
  const double log2pi = std::log(2.0 * sf::pi);

  const double t = q[layout_.tau_off];
  const double s = q[layout_.sigma_off];
  const double tau2 = std::exp(t);
  const double sigma = std::exp(s);
  const double sigma2 = sigma * sigma;
  const double b0 = q[layout_.b0_off];
  if (!(sigma2 > 0.0) || !std::isfinite(tau2)) return -kInf;

  // simplices
  std::vector<double> phi{1.0};
  std::vector<double> v_phi;
  double value = 0.0;
  if (G >= 2) value += stick_forward(q.data() + layout_.phi_off, G, phi, v_phi);
  std::vector<std::vector<double>> varphi(G), v_varphi(G);
  for (int g = 0; g < G; ++g) {
    const int pg = st.group_size(g);
    if (pg >= 2) {
      value += stick_forward(q.data() + layout_.varphi_off[g], pg, varphi[g], v_varphi[g]);
    } else {
      varphi[g] = {1.0};
    }
  }
  for (double ph : phi)
    if (!(ph > 0.0)) return -kInf;
  for (const auto& vg : varphi)
    for (double vv : vg)
      if (!(vv > 0.0)) return -kInf;

  // coefficients (non-centered)
  Eigen::VectorXd sd(p), b(p);
  for (int g = 0; g < G; ++g) {
    for (int l = 0; l < st.group_size(g); ++l) {
      const int i = st.flat_index(g, l);
      const double l2 = varphi[g][l] * phi[g] * tau2;
      sd[i] = sigma * std::sqrt(l2);
      b[i] = q[layout_.z_off + i] * sd[i];
    }
  }

  // likelihood
  Eigen::VectorXd xtr;
  double rsum = 0.0;
  if (n > 0) {
    Eigen::VectorXd r = data_.y - data_.X * b;
    r.array() -= b0;
    const double ssr = r.squaredNorm();
    value += -double(n) * (0.5 * log2pi + s) - ssr / (2.0 * sigma2);
    xtr = data_.X.transpose() * r;  // p-vector
    rsum = r.sum();
    grad[layout_.sigma_off] += -double(n) + ssr / sigma2;
    grad[layout_.b0_off] += rsum / sigma2;
  } else {
    xtr = Eigen::VectorXd::Zero(p);
  }

  // z innovations
  double zsq = 0.0;
  for (int i = 0; i < p; ++i) {
    const double z = q[layout_.z_off + i];
    zsq += z * z;
    grad[layout_.z_off + i] = (n > 0 ? xtr[i] * sd[i] / sigma2 : 0.0) - z;
  }
  value += -0.5 * zsq - 0.5 * p * log2pi;

  // per-coefficient likelihood pull A_i = (X'r)_i b_i / sigma2 feeds every
  // scale parameter through b_i = z_i sigma sqrt(varphi phi tau2)
  double a_sum = 0.0;
  std::vector<double> a_group(G, 0.0);
  Eigen::VectorXd a(p);
  if (n > 0) {
    for (int g = 0; g < G; ++g) {
      for (int l = 0; l < st.group_size(g); ++l) {
        const int i = st.flat_index(g, l);
        a[i] = xtr[i] * b[i] / sigma2;
        a_sum += a[i];
        a_group[g] += a[i];
      }
    }
  } else {
    a.setZero();
  }

  // tau2 prior: BetaPrime(a1, a2) with log Jacobian e^t
  value += hyper_.a1 * t - (hyper_.a1 + hyper_.a2) * softplus(t) -
           sf::log_beta(hyper_.a1, hyper_.a2);
  grad[layout_.tau_off] = 0.5 * a_sum + hyper_.a1 - (hyper_.a1 + hyper_.a2) * sigmoid(t);

  // group simplex prior
  if (G >= 2) {
    double lp = sf::ln_gamma(G * hyper_.a_G) - G * sf::ln_gamma(hyper_.a_G);
    std::vector<double> g_phi(G);
    for (int g = 0; g < G; ++g) {
      lp += (hyper_.a_G - 1.0) * std::log(phi[g]);
      g_phi[g] = (hyper_.a_G - 1.0) / phi[g] + 0.5 * a_group[g] / phi[g];
    }
    value += lp;
    stick_backward(phi, v_phi, g_phi.data(), grad.data() + layout_.phi_off);
  }

  // within-group simplex priors
  for (int g = 0; g < G; ++g) {
    const int pg = st.group_size(g);
    const double cg = hyper_.c[g];
    if (pg >= 2) {
      double lp = sf::ln_gamma(pg * cg) - pg * sf::ln_gamma(cg);
      std::vector<double> g_vp(pg);
      for (int l = 0; l < pg; ++l) {
        const int i = st.flat_index(g, l);
        lp += (cg - 1.0) * std::log(varphi[g][l]);
        g_vp[l] = (cg - 1.0) / varphi[g][l] + 0.5 * a[i] / varphi[g][l];
      }
      value += lp;
      stick_backward(varphi[g], v_varphi[g], g_vp.data(), grad.data() + layout_.varphi_off[g]);
    }
  }

  // sigma: half-Student-t(df, scale) on sigma plus log Jacobian e^s
  {
    const double df = hyper_.sigma_df;
    const double scale = hyper_.sigma_scale;
    const double q2 = sigma * sigma / (df * scale * scale);
    value += std::log(2.0) + sf::ln_gamma(0.5 * (df + 1.0)) - sf::ln_gamma(0.5 * df) -
             0.5 * std::log(df * sf::pi * scale * scale) -
             0.5 * (df + 1.0) * std::log1p(q2) + s;
    grad[layout_.sigma_off] +=
        1.0 - (df + 1.0) * sigma2 / (df * scale * scale + sigma2) + a_sum;
  }

  // intercept
  if (hyper_.intercept == prior::InterceptPrior::Normal) {
    const double loc = hyper_.intercept_loc;
    const double sc = hyper_.intercept_scale;
    value += -0.5 * (b0 - loc) * (b0 - loc) / (sc * sc) -
             std::log(sc) - 0.5 * log2pi;
    grad[layout_.b0_off] += -(b0 - loc) / (sc * sc);
  }

  if (!std::isfinite(value) || !grad.allFinite()) {
    grad.setZero();
    return -kInf;
  }
  return value;
}

double pointwise_predictive_logdens(double y_new, const Eigen::VectorXd& x_new,
                                    const prior::PriorDraw& draw) {
  if (x_new.size() != static_cast<Eigen::Index>(draw.b.size()))
    throw DomainError("pointwise_predictive_logdens: dimension mismatch");
  double mu = draw.b0;
  for (Eigen::Index i = 0; i < x_new.size(); ++i) mu += x_new[i] * draw.b[i];
  const double resid = y_new - mu;
  return -0.5 * std::log(2.0 * sf::pi * draw.sigma2) -
         resid * resid / (2.0 * draw.sigma2);
}

void standardize_columns(Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  if (n < 2) throw DomainError("standardize_columns: need at least two rows");
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    X.col(j).array() -= mean;
    const double sd = std::sqrt(X.col(j).squaredNorm() / double(n - 1));
    if (!(sd > 0.0))
      throw DomainError("standardize_columns: constant column " + std::to_string(j));
    X.col(j) /= sd;
  }
}

}  // namespace groupr2::model
