#include "groupr2/hyper.hpp"

#include <cmath>

#include "groupr2/errors.hpp"

namespace groupr2::hyper {

namespace {

prior::Hyperparams base_hyper(const prior::GroupStructure& structure, double a1,
                              double a2, double a_G, double c) {
  prior::Hyperparams h;
  h.a1 = a1;
  h.a2 = a2;
  h.a_G = a_G;
  h.c = std::vector<double>(structure.num_groups(), c);
  return h;
}

bool parse_suffix_number(const std::string& name, const std::string& prefix,
                         double* out) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
    return false;
  const std::string tail = name.substr(prefix.size());
  std::size_t used = 0;
  try {
    *out = std::stod(tail, &used);
  } catch (...) {
    return false;
  }
  return used == tail.size() && *out > 0.0;
}

}  // namespace

prior::Hyperparams resolve_preset(const std::string& name,
                                  const prior::GroupStructure& structure) {
  const int G = structure.num_groups();
  if (name == "R2-u") return base_hyper(structure, 1.0, 1.0, 1.0, 1.0);
  if (name == "R2-c") {
    const auto [a1, a2] = prior::beta_shapes_from_mean_precision(1.0 / 3.0, 3.0);
    return base_hyper(structure, a1, a2, 1.0, 0.5);
  }
  if (name == "R2-d") {
    const auto [a1, a2] = prior::beta_shapes_from_mean_precision(1.0 / 3.0, 3.0);
    return base_hyper(structure, a1, a2, 0.5, 1.0);
  }
  double val = 0.0;
  if (parse_suffix_number(name, "nongrouped-R2D2-", &val)) {
    if (G != 1)
      throw DomainError("resolve_preset: nongrouped preset needs a single-group "
                        "structure (got G = " + std::to_string(G) + ")");
    return base_hyper(structure, val, 0.5, val, val);
  }
  if (parse_suffix_number(name, "R2-", &val))
    return base_hyper(structure, G * val, 0.5, val, 0.5);
  throw DomainError("resolve_preset: unknown preset '" + name + "'");
}

std::pair<prior::Hyperparams, prior::GroupStructure> nongrouped_partner(
    const prior::Hyperparams& grouped, const prior::GroupStructure& structure) {
  grouped.validate(structure);
  prior::GroupStructure collapsed({structure.total()});
  prior::Hyperparams h = grouped;
  h.c = {grouped.a_G};  // a_pi = a_G
  h.a_G = grouped.a_G;
  return {h, collapsed};
}

Recommendation recommend(const Knowledge& knowledge,
                         const prior::GroupStructure& structure) {
  const int G = structure.num_groups();
  std::string why;

  if (knowledge.r2_mean.has_value() != knowledge.r2_precision.has_value())
    throw DomainError("recommend: R2 mean and precision must be given together");
  if (knowledge.coupling == CouplingDirection::FromWithinGroup &&
      static_cast<int>(knowledge.c_values.size()) != G)
    throw DomainError("recommend: within-group coupling needs one c_g per group");
  if (knowledge.coupling == CouplingDirection::FromGroupLevel &&
      !knowledge.c_values.empty())
    throw DomainError("recommend: contradictory coupling inputs (group-level "
                      "direction with explicit c values)");
  if (!knowledge.group_signals.empty() &&
      static_cast<int>(knowledge.group_signals.size()) != G)
    throw DomainError("recommend: one signal tag per group expected");

  const bool no_knowledge = !knowledge.r2_mean && knowledge.group_signals.empty() &&
                            !knowledge.coupling;
  if (no_knowledge) {
    Recommendation rec{resolve_preset("R2-u", structure),
                       "no prior knowledge: uniform R2 prior and uniform simplex "
                       "allocations"};
    return rec;
  }

  prior::Hyperparams h = base_hyper(structure, 1.0, 0.5, 1.0, 0.5);
  why = "defaults: a2 = 0.5 for heavy tails and bounded influence";

  if (knowledge.r2_mean) {
    const auto [a1, a2] =
        prior::beta_shapes_from_mean_precision(*knowledge.r2_mean,
                                               *knowledge.r2_precision);
    h.a1 = a1;
    h.a2 = a2;
    why += "; R2 location/scale mapped to Beta shapes (" + std::to_string(a1) +
           ", " + std::to_string(a2) + ")";
  }

  if (!knowledge.group_signals.empty()) {
    bool any_distributed = false;
    for (auto s : knowledge.group_signals)
      if (s == SignalType::Distributed) any_distributed = true;
    h.a_G = any_distributed ? 1.0 : 0.1;
    why += any_distributed
               ? "; distributed signals expected: larger group concentration "
                 "(a_G = 1) for less shrinkage"
               : "; concentrated signals expected: small group concentration "
                 "(a_G = 0.1) for strong joint shrinkage";
  }

  if (knowledge.coupling == CouplingDirection::FromGroupLevel) {
    for (int g = 0; g < G; ++g)
      h.c[g] = prior::couple_cg_from_ag(h.a_G, structure.group_size(g));
    why += "; within-group concentrations coupled as c_g = a_G / p_g";
  } else if (knowledge.coupling == CouplingDirection::FromWithinGroup) {
    h.c = knowledge.c_values;
    h.a_G = prior::couple_ag_from_cg(structure, knowledge.c_values);
    why += "; group concentration pooled from stated c_g as a_G = mean(p_g c_g)";
  }

  if (!knowledge.r2_mean) {
    h.a1 = G * h.a_G;  // keep the R2 prior aligned with the group level
    why += "; R2 shape tied to the group level (a1 = G a_G)";
  }

  h.validate(structure);
  return {h, why};
}

}  // namespace groupr2::hyper
