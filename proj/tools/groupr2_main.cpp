// groupr2: grouped R2 decomposition priors for linear regression.
// Subcommands: prior-predictive, density, fit, simulate, hyper.
#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "groupr2/csv.hpp"
#include "groupr2/errors.hpp"
#include "groupr2/fit.hpp"
#include "groupr2/hyper.hpp"
#include "groupr2/metrics.hpp"
#include "groupr2/model.hpp"
#include "groupr2/prior.hpp"
#include "groupr2/rng.hpp"
#include "groupr2/sampler.hpp"
#include "groupr2/shrinkage.hpp"
#include "groupr2/simulate.hpp"
#include "groupr2/specfun.hpp"

namespace fs = std::filesystem;
using groupr2::DomainError;
using groupr2::NumericError;
using json = nlohmann::json;

namespace {

// --------------------------------------------------------------------------
// configuration: flat "section.key" -> string map, INI or JSON encoded
// --------------------------------------------------------------------------

using Config = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void load_ini(const std::string& path, Config& cfg) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  std::string line, section;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    cfg[section.empty() ? key : section + "." + key] = value;
  }
}

void load_json_config(const json& j, Config& cfg) {
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object())
      throw DomainError("config JSON: top level must be sections");
    for (const auto& [key, value] : body.items()) {
      std::string str;
      if (value.is_string()) {
        str = value.get<std::string>();
      } else if (value.is_array()) {
        std::string acc;
        for (const auto& v : value) {
          if (!acc.empty()) acc += ",";
          acc += v.is_string() ? v.get<std::string>() : v.dump();
        }
        str = acc;
      } else {
        str = value.dump();
      }
      cfg[section + "." + key] = str;
    }
  }
}

void load_config_file(const std::string& path, Config& cfg) {
  std::ifstream probe(path);
  if (!probe) throw DomainError("cannot open config file '" + path + "'");
  char first = 0;
  probe >> first;
  probe.close();
  if (first == '{') {
    std::ifstream in(path);
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw DomainError(std::string("config JSON parse error: ") + e.what());
    }
    load_json_config(j, cfg);
  } else {
    load_ini(path, cfg);
  }
}

struct ConfigView {
  const Config& cfg;

  bool has(const std::string& key) const { return cfg.count(key) > 0; }
  std::string str(const std::string& key, const std::string& def) const {
    auto it = cfg.find(key);
    return it == cfg.end() ? def : it->second;
  }
  std::string require(const std::string& key) const {
    auto it = cfg.find(key);
    if (it == cfg.end()) throw DomainError("missing required config key '" + key + "'");
    return it->second;
  }
  double num(const std::string& key, double def) const {
    auto it = cfg.find(key);
    if (it == cfg.end()) return def;
    try {
      return std::stod(it->second);
    } catch (...) {
      throw DomainError("config key '" + key + "' is not a number: " + it->second);
    }
  }
  int integer(const std::string& key, int def) const {
    const double v = num(key, double(def));
    if (v != std::floor(v)) throw DomainError("config key '" + key + "' must be an integer");
    return int(v);
  }
  std::vector<double> num_list(const std::string& key,
                               const std::vector<double>& def) const {
    auto it = cfg.find(key);
    if (it == cfg.end()) return def;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = trim(cell);
      if (cell.empty()) continue;
      try {
        out.push_back(std::stod(cell));
      } catch (...) {
        throw DomainError("config key '" + key + "' has a non-numeric entry: " + cell);
      }
    }
    if (out.empty()) throw DomainError("config key '" + key + "' is empty");
    return out;
  }
  std::vector<std::string> str_list(const std::string& key,
                                    const std::vector<std::string>& def) const {
    auto it = cfg.find(key);
    if (it == cfg.end()) return def;
    std::vector<std::string> out;
    std::stringstream ss(it->second);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = trim(cell);
      if (!cell.empty()) out.push_back(cell);
    }
    return out;
  }
  bool flag(const std::string& key, bool def) const {
    auto it = cfg.find(key);
    if (it == cfg.end()) return def;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw DomainError("config key '" + key + "' must be true/false");
  }
};

void write_manifest(const Config& cfg, const fs::path& out_dir) {
  json j;
  for (const auto& [key, value] : cfg) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      j["run"][key] = value;
    } else {
      j[key.substr(0, dot)][key.substr(dot + 1)] = value;
    }
  }
  std::ofstream out(out_dir / "manifest.json", std::ios::binary);
  out << j.dump(2) << "\n";
}

groupr2::sampler::SamplerConfig sampler_config(const ConfigView& view,
                                               std::uint64_t seed) {
  groupr2::sampler::SamplerConfig cfg;
  cfg.n_chains = view.integer("sampler.chains", 4);
  cfg.n_warmup = view.integer("sampler.warmup", 1000);
  cfg.n_samples = view.integer("sampler.samples", 1000);
  cfg.target_accept = view.num("sampler.target_accept", 0.95);
  cfg.max_tree_depth = view.integer("sampler.max_tree_depth", 10);
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// --------------------------------------------------------------------------
// prior-predictive
// --------------------------------------------------------------------------

int cmd_prior_predictive(const ConfigView& view, const fs::path& out_dir,
                         std::uint64_t seed) {
  const int n_sims = view.integer("prior-predictive.n_sims", 4000);
  const int G = view.integer("prior-predictive.G", 10);
  const int pg = view.integer("prior-predictive.p_g", 20);
  const double a2 = view.num("prior-predictive.a2", 0.5);
  const auto ag_list = view.num_list("prior-predictive.a_G", {0.1, 0.5, 1.0, 5.0});
  const auto cg_list = view.num_list("prior-predictive.c_g", {0.1, 0.5, 1.0, 5.0});
  if (n_sims < 0) throw DomainError("prior-predictive.n_sims must be >= 0");

  groupr2::prior::GroupStructure st(std::vector<int>(G, pg));
  const bool single = ag_list.size() == 1 && cg_list.size() == 1;
  int combo = 0;
  for (double a_G : ag_list) {
    for (double c_g : cg_list) {
      groupr2::prior::Hyperparams h;
      h.a_G = a_G;
      h.a1 = G * a_G;
      h.a2 = a2;
      h.c = std::vector<double>(G, c_g);

      const std::string suffix =
          single ? "" : "_aG" + tag(a_G) + "_cg" + tag(c_g);
      groupr2::Rng rng(groupr2::mix_seed(seed, 100 + combo));
      const auto sims = groupr2::shrinkage::prior_predictive_meff(h, st, n_sims, rng);
      {
        groupr2::csv::Writer w((out_dir / ("meff_samples" + suffix + ".csv")).string(),
                               {"sim", "group", "meff_g"});
        for (int s = 0; s < n_sims; ++s) {
          for (int g = 0; g < G; ++g) {
            w.field(s);
            w.field(g + 1);
            w.field(sims[s][g]);
            w.end_row();
          }
        }
      }
      {
        groupr2::Rng rng_r2(groupr2::mix_seed(seed, 500 + combo));
        groupr2::csv::Writer w((out_dir / ("r2_samples" + suffix + ".csv")).string(),
                               {"sim", "r2"});
        for (int s = 0; s < n_sims; ++s) {
          const double xi = rng_r2.gamma(h.a2, 1.0);
          const double tau2 = rng_r2.gamma(h.a1, xi);
          w.field(s);
          w.field(groupr2::prior::tau2_to_r2(tau2));
          w.end_row();
        }
      }
      ++combo;
    }
  }
  return 0;
}

// --------------------------------------------------------------------------
// density
// --------------------------------------------------------------------------

int cmd_density(const ConfigView& view, const fs::path& out_dir) {
  // coefficient marginal grids
  {
    const double b_min = view.num("density.b_min", -5.0);
    const double b_max = view.num("density.b_max", 5.0);
    const int b_points = view.integer("density.b_points", 201);
    if (b_points < 2 || !(b_max > b_min))
      throw DomainError("density: invalid coefficient grid");
    const auto c_list = view.num_list("density.c_g", {0.2, 0.5, 1.0});
    const auto a2_list = view.num_list("density.a2", {0.5});
    groupr2::csv::Writer w((out_dir / "marginal_b.csv").string(),
                           {"c_g", "a2", "b", "log_density", "density", "flag"});
    for (double c : c_list) {
      for (double a2 : a2_list) {
        for (int i = 0; i < b_points; ++i) {
          const double b = b_min + (b_max - b_min) * i / double(b_points - 1);
          const auto ld = groupr2::prior::marginal_b_logdensity(b, c, a2);
          w.field(c);
          w.field(a2);
          w.field(b);
          w.field(ld.pole ? std::numeric_limits<double>::infinity() : ld.value);
          w.field(ld.pole ? std::numeric_limits<double>::infinity()
                          : std::exp(ld.value));
          w.field(std::string(ld.pole ? "pole" : "ok"));
          w.end_row();
        }
      }
    }
  }

  // R2 Beta and tau2 BetaPrime densities for (mu, nu) presets
  {
    const auto mu_list = view.num_list("density.mu_r2", {0.5, 0.5, 1.0 / 3.0});
    const auto nu_list = view.num_list("density.nu_r2", {1.0, 2.0, 3.0});
    if (mu_list.size() != nu_list.size())
      throw DomainError("density: mu_r2 and nu_r2 lists must align");
    const int points = view.integer("density.r2_points", 200);
    const double tau2_max = view.num("density.tau2_max", 10.0);
    groupr2::csv::Writer wr((out_dir / "r2_density.csv").string(),
                            {"mu_r2", "nu_r2", "r2", "density"});
    groupr2::csv::Writer wt((out_dir / "tau2_density.csv").string(),
                            {"mu_r2", "nu_r2", "tau2", "density"});
    for (std::size_t k = 0; k < mu_list.size(); ++k) {
      const auto [a1, a2] =
          groupr2::prior::beta_shapes_from_mean_precision(mu_list[k], nu_list[k]);
      for (int i = 1; i < points; ++i) {
        const double r2 = i / double(points);
        const double logd = (a1 - 1.0) * std::log(r2) + (a2 - 1.0) * std::log1p(-r2) -
                            groupr2::specfun::log_beta(a1, a2);
        wr.field(mu_list[k]);
        wr.field(nu_list[k]);
        wr.field(r2);
        wr.field(std::exp(logd));
        wr.end_row();
      }
      for (int i = 1; i <= points; ++i) {
        const double tau2 = tau2_max * i / double(points);
        wt.field(mu_list[k]);
        wt.field(nu_list[k]);
        wt.field(tau2);
        wt.field(std::exp(groupr2::prior::betaprime_logpdf(tau2, a1, a2)));
        wt.end_row();
      }
    }
  }

  // log-variance correlation curves over c_g for several a_G
  {
    const auto ag_list = view.num_list("density.corr_a_G", {0.1, 0.5, 1.0, 5.0});
    const int G = view.integer("density.corr_G", 10);
    const int pg = view.integer("density.corr_p_g", 10);
    const int points = view.integer("density.corr_points", 60);
    groupr2::csv::Writer w((out_dir / "log_variance_correlation.csv").string(),
                           {"a_G", "c_g", "correlation"});
    for (double a_G : ag_list) {
      for (int i = 0; i < points; ++i) {
        const double cg =
            std::exp(std::log(0.01) + (std::log(10.0) - std::log(0.01)) * i /
                                          double(points - 1));
        w.field(a_G);
        w.field(cg);
        w.field(groupr2::prior::log_variance_correlation(a_G, G, cg, pg));
        w.end_row();
      }
    }
  }
  return 0;
}

// --------------------------------------------------------------------------
// fit
// --------------------------------------------------------------------------

struct LoadedData {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;  // group-major column order
  std::vector<std::string> names;  // per column
  groupr2::prior::GroupStructure structure{std::vector<int>{1}};
};

LoadedData load_fit_data(const ConfigView& view, bool nongrouped) {
  const std::string data_path = view.require("fit.data");
  const auto table = groupr2::csv::read(data_path);
  if (table.header.empty() || table.header[0] != "y")
    throw DomainError("fit: data CSV must start with a 'y' column");
  const int p = int(table.header.size()) - 1;
  if (p < 1) throw DomainError("fit: no predictor columns");
  const int n = int(table.rows.size());
  if (n < 3) throw DomainError("fit: need at least 3 rows");

  Eigen::VectorXd y(n);
  Eigen::MatrixXd x_raw(n, p);
  for (int i = 0; i < n; ++i) {
    y[i] = std::stod(table.rows[i][0]);
    for (int j = 0; j < p; ++j) x_raw(i, j) = std::stod(table.rows[i][j + 1]);
  }
  std::vector<std::string> names(table.header.begin() + 1, table.header.end());

  LoadedData out;
  out.y = y;
  if (nongrouped || !view.has("fit.groups")) {
    if (!nongrouped)
      throw DomainError("fit: missing group map (use --nongrouped for the "
                        "single-simplex baseline)");
    out.structure = groupr2::prior::GroupStructure({p});
    out.x = x_raw;
    out.names = names;
  } else {
    const auto gmap = groupr2::csv::read(view.require("fit.groups"));
    if (gmap.header.size() != 2)
      throw DomainError("fit: group map needs columns (predictor, group)");
    std::map<std::string, int> assignment;
    for (const auto& row : gmap.rows) assignment[trim(row[0])] = std::stoi(row[1]);
    // bucket columns by group id, preserving file order inside groups
    std::map<int, std::vector<int>> buckets;
    for (int j = 0; j < p; ++j) {
      auto it = assignment.find(trim(names[j]));
      if (it == assignment.end())
        throw DomainError("fit: predictor '" + names[j] + "' is not in the group map");
      buckets[it->second].push_back(j);
    }
    std::vector<int> sizes;
    std::vector<int> order;
    for (const auto& [gid, cols] : buckets) {
      sizes.push_back(int(cols.size()));
      order.insert(order.end(), cols.begin(), cols.end());
    }
    out.structure = groupr2::prior::GroupStructure(sizes);
    out.x.resize(n, p);
    out.names.resize(p);
    for (int j = 0; j < p; ++j) {
      out.x.col(j) = x_raw.col(order[j]);
      out.names[j] = names[order[j]];
    }
  }
  groupr2::model::standardize_columns(out.x);
  return out;
}

groupr2::prior::Hyperparams hyper_from_config(
    const ConfigView& view, const groupr2::prior::GroupStructure& st) {
  if (view.has("hyper.preset"))
    return groupr2::hyper::resolve_preset(view.require("hyper.preset"), st);
  groupr2::prior::Hyperparams h;
  h.a_G = view.num("hyper.a_G", 1.0);
  h.a1 = view.num("hyper.a1", st.num_groups() * h.a_G);
  h.a2 = view.num("hyper.a2", 0.5);
  const auto c = view.num_list("hyper.c", {0.5});
  if (int(c.size()) == st.num_groups()) {
    h.c = c;
  } else if (c.size() == 1) {
    h.c = std::vector<double>(st.num_groups(), c[0]);
  } else {
    throw DomainError("hyper.c must have one entry or one per group");
  }
  h.sigma_df = view.num("hyper.sigma_df", 3.0);
  if (view.has("hyper.sigma_scale") && view.str("hyper.sigma_scale", "") != "auto")
    h.sigma_scale = view.num("hyper.sigma_scale", -1.0);
  const std::string intercept = view.str("hyper.intercept", "normal");
  if (intercept == "flat") {
    h.intercept = groupr2::prior::InterceptPrior::Flat;
  } else if (intercept != "normal") {
    throw DomainError("hyper.intercept must be 'normal' or 'flat'");
  }
  return h;
}

int cmd_fit(const ConfigView& view, const fs::path& out_dir, std::uint64_t seed,
            bool nongrouped) {
  const LoadedData data = load_fit_data(view, nongrouped);
  const auto hyper = hyper_from_config(view, data.structure);
  groupr2::model::Model model(
      groupr2::model::RegressionData(data.y, data.x, data.structure), hyper);
  const auto scfg = sampler_config(view, seed);

  groupr2::fit::FitResult result;
  try {
    result = groupr2::fit::run_fit(model, scfg);
  } catch (const NumericError& e) {
    throw;  // mapped to exit 3 by main
  }

  const auto& t = result.transformed;
  for (int c = 0; c < t.n_chains; ++c) {
    std::vector<std::string> header;
    for (const auto& name : data.names) header.push_back(name);
    header.insert(header.end(),
                  {"b0", "sigma2", "tau2", "R2", "m_eff", "lp", "divergent",
                   "tree_depth", "energy"});
    groupr2::csv::Writer w(
        (out_dir / ("draws_chain" + std::to_string(c + 1) + ".csv")).string(),
        header);
    for (int i = 0; i < t.n_samples; ++i) {
      for (int j = 0; j < t.p; ++j) w.field(t.b[c](i, j));
      w.field(t.b0[c][i]);
      w.field(t.sigma2[c][i]);
      w.field(t.tau2[c][i]);
      w.field(t.r2[c][i]);
      w.field(t.meff[c][i]);
      w.field(result.draws.chains[c].logp[i]);
      w.field(int(result.draws.chains[c].divergent[i]));
      w.field(result.draws.chains[c].tree_depth[i]);
      w.field(result.draws.chains[c].energy[i]);
      w.end_row();
    }
  }

  {
    const auto summaries = groupr2::fit::summarize(model, result.draws, t);
    groupr2::csv::Writer w((out_dir / "summary.csv").string(),
                           {"quantity", "mean", "sd", "q5", "q95", "rhat", "ess"});
    for (const auto& s : summaries) {
      w.field(s.name);
      w.field(s.mean);
      w.field(s.sd);
      w.field(s.q5);
      w.field(s.q95);
      w.field(s.rhat);
      w.field(s.ess);
      w.end_row();
    }
  }

  {
    json diag;
    diag["divergences"] = result.draws.total_divergent();
    diag["divergence_rate"] = result.draws.divergence_rate();
    diag["rhat_max"] = result.rhat_max;
    diag["ess_min"] = result.ess_min;
    json chains = json::array();
    for (const auto& c : result.draws.chains) {
      json jc;
      jc["step_size"] = c.step_size;
      jc["ebfmi"] = c.ebfmi();
      jc["n_divergent"] = c.n_divergent();
      chains.push_back(jc);
    }
    diag["chains"] = chains;
    diag["resolved_sigma_scale"] = model.hyper().sigma_scale;
    std::ofstream out(out_dir / "diagnostics.json", std::ios::binary);
    out << diag.dump(2) << "\n";
  }

  if (result.draws.divergence_rate() > 0.25)
    throw NumericError("fit: divergence rate above 25%, results unreliable");
  return 0;
}

// --------------------------------------------------------------------------
// simulate
// --------------------------------------------------------------------------

int cmd_simulate(const ConfigView& view, const fs::path& out_dir,
                 std::uint64_t seed, int workers) {
  groupr2::sim::StudyConfig cfg;
  cfg.signals.clear();
  for (const auto& name :
       view.str_list("simulate.scenarios", {"distributed", "concentrated"}))
    cfg.signals.push_back(groupr2::sim::signal_from_name(name));
  cfg.r2_targets = view.num_list("simulate.r2", {0.25, 0.8});
  cfg.replications = view.integer("simulate.replications", 20);
  cfg.n = view.integer("simulate.n", 100);
  cfg.p = view.integer("simulate.p", 40);
  cfg.group_size = view.integer("simulate.group_size", 10);
  cfg.rho_in = view.num("simulate.rho_in", 0.8);
  cfg.rho_out = view.num("simulate.rho_out", 0.2);
  cfg.grouped_prior = view.str("simulate.prior", "R2-1.0");
  cfg.sampler = sampler_config(view, 0);
  cfg.seed = seed;
  cfg.workers = workers;

  const auto result = groupr2::sim::run_study(cfg);

  {
    groupr2::csv::Writer w(
        (out_dir / "metrics.csv").string(),
        {"scenario", "r2_target", "prior", "replication", "status", "elpd",
         "rmse_all", "rmse_zero", "rmse_nonzero", "coverage95",
         "interval_width_mean", "sensitivity", "specificity", "rhat_max",
         "ess_min"});
    for (const auto& cell : result.cells) {
      w.field(cell.scenario);
      w.field(cell.r2_target);
      w.field(cell.prior);
      w.field(cell.replication);
      w.field(cell.status);
      w.field(cell.report.elpd);
      w.field(cell.report.rmse_all);
      w.field(cell.report.rmse_zero);
      w.field(cell.report.rmse_nonzero);
      w.field(cell.report.coverage95);
      w.field(cell.report.interval_width_mean);
      w.field(cell.report.sensitivity);
      w.field(cell.report.specificity);
      w.field(cell.report.rhat_max);
      w.field(cell.report.ess_min);
      w.end_row();
    }
  }
  {
    groupr2::csv::Writer w(
        (out_dir / "deltas.csv").string(),
        {"scenario", "r2_target", "prior", "replication", "delta_elpd",
         "asinh_delta_elpd", "delta_rmse_all", "delta_rmse_zero",
         "delta_rmse_nonzero"});
    for (const auto& d : result.deltas) {
      w.field(d.scenario);
      w.field(d.r2_target);
      w.field(d.grouped_prior);
      w.field(d.replication);
      w.field(d.delta_elpd);
      w.field(d.asinh_delta_elpd);
      w.field(d.delta_rmse_all);
      w.field(d.delta_rmse_zero);
      w.field(d.delta_rmse_nonzero);
      w.end_row();
    }
  }
  {
    groupr2::csv::Writer w((out_dir / "roc.csv").string(),
                           {"scenario", "r2_target", "prior", "replication",
                            "level", "fpr", "tpr"});
    for (const auto& cell : result.cells) {
      if (cell.status != "ok") continue;
      for (const auto& pt : cell.report.roc_points) {
        w.field(cell.scenario);
        w.field(cell.r2_target);
        w.field(cell.prior);
        w.field(cell.replication);
        w.field(pt.level);
        w.field(pt.fpr);
        w.field(pt.tpr);
        w.end_row();
      }
    }
  }
  return 0;
}

// --------------------------------------------------------------------------
// hyper
// --------------------------------------------------------------------------

int cmd_hyper(const ConfigView& view, const fs::path& out_dir) {
  std::vector<int> sizes;
  for (double v : view.num_list("structure.group_sizes", {10, 10, 10, 10}))
    sizes.push_back(int(v));
  groupr2::prior::GroupStructure st(sizes);

  groupr2::prior::Hyperparams resolved;
  std::string rationale;
  if (view.has("hyper.preset")) {
    resolved = groupr2::hyper::resolve_preset(view.require("hyper.preset"), st);
    rationale = "preset " + view.require("hyper.preset");
  } else {
    groupr2::hyper::Knowledge k;
    if (view.has("knowledge.r2_mean")) k.r2_mean = view.num("knowledge.r2_mean", 0.5);
    if (view.has("knowledge.r2_precision"))
      k.r2_precision = view.num("knowledge.r2_precision", 1.0);
    for (const auto& s : view.str_list("knowledge.signals", {})) {
      if (s == "concentrated") {
        k.group_signals.push_back(groupr2::hyper::SignalType::Concentrated);
      } else if (s == "distributed") {
        k.group_signals.push_back(groupr2::hyper::SignalType::Distributed);
      } else {
        throw DomainError("knowledge.signals entries must be "
                          "concentrated/distributed");
      }
    }
    const std::string coupling = view.str("knowledge.coupling", "");
    if (coupling == "from-group-level") {
      k.coupling = groupr2::hyper::CouplingDirection::FromGroupLevel;
    } else if (coupling == "from-within-group") {
      k.coupling = groupr2::hyper::CouplingDirection::FromWithinGroup;
      k.c_values = view.num_list("knowledge.c_values", {});
    } else if (!coupling.empty()) {
      throw DomainError("knowledge.coupling must be from-group-level or "
                        "from-within-group");
    }
    const auto rec = groupr2::hyper::recommend(k, st);
    resolved = rec.hyper;
    rationale = rec.rationale;
  }

  json j;
  j["a1"] = resolved.a1;
  j["a2"] = resolved.a2;
  j["a_G"] = resolved.a_G;
  j["c"] = resolved.c;
  j["mu_r2"] = resolved.mu_r2();
  j["nu_r2"] = resolved.nu_r2();
  j["sigma_df"] = resolved.sigma_df;
  j["rationale"] = rationale;
  std::ofstream out(out_dir / "hyper.json", std::ios::binary);
  out << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group-R2 decomposition priors: diagnostics, fits, simulations"};
  app.require_subcommand(0, 1);

  std::string config_path, out_override;
  std::uint64_t seed_override = 0;
  bool have_seed = false, nongrouped = false;
  int workers_override = -1;

  app.add_option("--config", config_path, "config file (key-value sections or JSON)");
  app.add_option("--seed", seed_override, "seed override")->each([&](std::string) {
    have_seed = true;
  });
  app.add_option("--out", out_override, "output directory override");
  app.add_option("--workers", workers_override, "simulate worker pool size");
  app.add_flag("--nongrouped", nongrouped, "fit the single-simplex baseline");

  for (const char* name : {"prior-predictive", "density", "fit", "simulate", "hyper"})
    app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    Config cfg;
    if (!config_path.empty()) load_config_file(config_path, cfg);

    std::string command = cfg.count("run.command") ? cfg["run.command"] : "";
    for (const auto* sub : app.get_subcommands()) command = sub->get_name();
    if (command.empty())
      throw DomainError("no command: give a subcommand or run.command in the config");
    cfg["run.command"] = command;

    if (have_seed) cfg["run.seed"] = std::to_string(seed_override);
    if (!out_override.empty()) cfg["run.out"] = out_override;
    if (workers_override >= 0) cfg["run.workers"] = std::to_string(workers_override);
    if (nongrouped) cfg["fit.nongrouped"] = "true";
    if (!cfg.count("run.seed")) cfg["run.seed"] = "0";
    if (!cfg.count("run.out")) cfg["run.out"] = "out";
    if (!cfg.count("run.workers")) {
      const char* env = std::getenv("GROUPR2_WORKERS");
      cfg["run.workers"] = env ? env : "0";
    }

    ConfigView view{cfg};
    const std::uint64_t seed = std::stoull(view.require("run.seed"));
    const int workers = view.integer("run.workers", 0);
    const fs::path out_dir(view.require("run.out"));
    fs::create_directories(out_dir);
    write_manifest(cfg, out_dir);

    if (command == "prior-predictive") return cmd_prior_predictive(view, out_dir, seed);
    if (command == "density") return cmd_density(view, out_dir);
    if (command == "fit")
      return cmd_fit(view, out_dir, seed, view.flag("fit.nongrouped", false));
    if (command == "simulate") return cmd_simulate(view, out_dir, seed, workers);
    if (command == "hyper") return cmd_hyper(view, out_dir);
    throw DomainError("unknown command '" + command + "'");
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
