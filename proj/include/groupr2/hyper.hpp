#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "groupr2/prior.hpp"

namespace groupr2::hyper {

// Named prior configurations. Accepted names:
//   "R2-<a_G>"   e.g. R2-0.1, R2-0.5, R2-1.0 : a1 = G a_G, a2 = 0.5, c_g = 0.5
//   "R2-u"       uniform R2 and simplexes: a1 = a2 = 1, a_G = c_g = 1
//   "R2-c"       (mu, nu) = (1/3, 3), a_G = 1, c_g = 0.5
//   "R2-d"       (mu, nu) = (1/3, 3), a_G = 0.5, c_g = 1
//   "nongrouped-R2D2-<a_pi>" : single simplex over all p with concentration
//                a_pi; requires a G = 1 structure; a1 = a_pi, a2 = 0.5
prior::Hyperparams resolve_preset(const std::string& name,
                                  const prior::GroupStructure& structure);

// The nongrouped counterpart of a grouped configuration: same R2 prior
// (a1, a2) and sigma/intercept settings, a single simplex over all p with
// concentration a_pi = a_G. Returns the hyperparameters and the collapsed
// structure.
std::pair<prior::Hyperparams, prior::GroupStructure> nongrouped_partner(
    const prior::Hyperparams& grouped, const prior::GroupStructure& structure);

enum class SignalType { Concentrated, Distributed };
enum class CouplingDirection { FromGroupLevel, FromWithinGroup };

struct Knowledge {
  std::optional<double> r2_mean;
  std::optional<double> r2_precision;
  std::vector<SignalType> group_signals;  // empty = unknown
  std::optional<CouplingDirection> coupling;
  std::vector<double> c_values;  // required for FromWithinGroup
};

struct Recommendation {
  prior::Hyperparams hyper;
  std::string rationale;
};

// Deterministic mapping from stated knowledge to hyperparameters. With no
// knowledge at all this is the uniform configuration.
Recommendation recommend(const Knowledge& knowledge,
                         const prior::GroupStructure& structure);

}  // namespace groupr2::hyper
