#include "latent/report.hpp"

#include <cmath>

#include <json.hpp>

#include "latent/error.hpp"

namespace latent {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_json(const ConsensusReport& report) {
  ordered_json doc;
  doc["method"] = report.method;
  ordered_json weights = ordered_json::array();
  for (Index i = 0; i < report.weights.size(); ++i) weights.push_back(report.weights(i));
  doc["weights"] = std::move(weights);
  doc["value"] = report.value ? ordered_json(*report.value) : ordered_json(nullptr);
  ordered_json diag = ordered_json::object();
  for (const auto& [name, v] : report.diagnostics) {
    diag[name] = std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
  }
  doc["diagnostics"] = std::move(diag);
  doc["delta_used"] = report.delta_used ? ordered_json(*report.delta_used) : ordered_json(nullptr);
  return doc.dump();
}

ConsensusReport parse_consensus_report(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  auto require = [&](bool ok, const char* what) {
    if (!ok) throw ParseError(std::string("report JSON: ") + what);
  };
  require(doc.is_object(), "top level must be an object");
  require(doc.contains("method") && doc["method"].is_string(), "\"method\" must be a string");
  require(doc.contains("weights") && doc["weights"].is_array(), "\"weights\" must be an array");
  require(doc.contains("value") && (doc["value"].is_null() || doc["value"].is_number()),
          "\"value\" must be a number or null");
  require(doc.contains("diagnostics") && doc["diagnostics"].is_object(),
          "\"diagnostics\" must be an object");
  require(doc.contains("delta_used") &&
              (doc["delta_used"].is_null() || doc["delta_used"].is_number()),
          "\"delta_used\" must be a number or null");

  ConsensusReport report;
  report.method = doc["method"].get<std::string>();
  const json& w = doc["weights"];
  report.weights.resize(static_cast<Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) {
    require(w[i].is_number(), "weights must be numbers");
    report.weights(static_cast<Index>(i)) = w[i].get<double>();
  }
  if (doc["value"].is_number()) report.value = doc["value"].get<double>();
  for (const auto& [name, v] : doc["diagnostics"].items()) {
    if (v.is_number()) {
      report.diagnostics[name] = v.get<double>();
    } else {
      require(v.is_null(), "diagnostics values must be numbers or null");
      report.diagnostics[name] = std::nan("");
    }
  }
  if (doc["delta_used"].is_number()) report.delta_used = doc["delta_used"].get<double>();
  return report;
}

}  // namespace latent
