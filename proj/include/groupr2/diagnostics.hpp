#pragma once

#include <vector>

namespace groupr2::diagnostics {

// Result of a convergence diagnostic; degenerate inputs (constant chains)
// produce a convention value with the warning flag set instead of failing.
struct Diag {
  double value;
  bool degenerate;
};

// Rank-normalized split potential scale reduction factor: the maximum of
// the bulk statistic and the one computed on draws folded around their
// median. Needs >= 2 chains with >= 4 draws each. Constant input returns
// 1.0 (converged by convention) with the warning flag.
Diag split_rhat(const std::vector<std::vector<double>>& chains);

// Rank-normalized bulk effective sample size (split chains, Geyer initial
// monotone sequence). Constant input returns the total draw count with the
// warning flag.
Diag ess_bulk(const std::vector<std::vector<double>>& chains);

// sd / sqrt(ESS) for a pooled scalar series.
double mcse_mean(const std::vector<std::vector<double>>& chains);

}  // namespace groupr2::diagnostics
