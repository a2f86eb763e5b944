#pragma once

#include "dooc/sim.hpp"

#include <json.hpp>

#include <string>

namespace dooc {

inline constexpr const char* kVersion = "0.1.0";

/// Parse a scenario document. Unknown keys anywhere are rejected, every
/// section is validated against its module's invariants, and seeded
/// uncertainties are resolved so the returned Scenario is fully concrete.
Scenario load_scenario(const nlohmann::json& doc);

Scenario load_scenario_file(const std::string& path);

/// Resolved scenario back to JSON (uncertainties as explicit arrays).
nlohmann::json scenario_to_json(const Scenario& scn);

/// Apply one `path.to.key=value` override in place. The path must reference
/// an existing key (numeric segments index arrays); the value is parsed as
/// JSON with a plain-string fallback.
void apply_set_override(nlohmann::json& doc, const std::string& assignment);

nlohmann::json metrics_to_json(const MetricsReport& report);

/// Benchmark documents: the five-agent closed loop over the unbalanced
/// seven-edge digraph, and its coordinator-only companion.
nlohmann::json default_closed_loop_json();
nlohmann::json default_coordinator_json();

}  // namespace dooc
