#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "latent/matrix.hpp"

namespace latent {

/// Outcome of a latent-consensus evaluation.
///
/// `weights` covers the agents and, for hub methods, the hub as the last
/// entry. `value` is weights . x0 and is only set when the limiting
/// projection is a genuine consensus (all rows equal).
struct ConsensusReport {
  std::string method;
  Vector weights;
  std::optional<double> value;
  std::map<std::string, double> diagnostics;
  std::optional<double> delta_used;
};

// {"method":..., "weights":[...], "value":number|null,
//  "diagnostics":{name:number}, "delta_used":number|null}
std::string to_json(const ConsensusReport& report);
ConsensusReport parse_consensus_report(std::string_view text);

}  // namespace latent
