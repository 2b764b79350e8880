#pragma once

#include <optional>
#include <string>
#include <vector>

#include "latent/digraph.hpp"

namespace latent {

enum class CheckStatus { pass, fail, skip };

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::pass;
  std::string note;
};

/// Runs the identity battery on a Laplacian: eigenprojection conditions,
/// forest/resolvent/exponential cross-methods, the conforming-pair
/// identities, every closed form against its assembled matrix, method
/// agreement, hub-weight constancy and the orthogonal-projection checks.
/// Every tolerance is multiplied by `tol_multiplier`.
std::vector<CheckResult> run_identity_battery(const LaplacianMatrix& l, double tol_multiplier = 1.0);

bool all_passed(const std::vector<CheckResult>& checks);

const char* to_string(CheckStatus status);

}  // namespace latent
