#pragma once

#include "dooc/config.hpp"
#include "dooc/sim.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dooc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct AcceptanceOutcome {
    std::vector<CriterionResult> criteria;
    Trajectory coordinator_run;
    Trajectory closed_loop_run;

    bool all_passed() const;
};

/// Run the full verification suite against a coordinator-only document and a
/// closed-loop document (normally the shipped benchmark pair). Every
/// threshold is fixed here; callers only choose the scenarios.
AcceptanceOutcome run_acceptance_suite(const nlohmann::json& coordinator_doc,
                                       const nlohmann::json& closed_loop_doc);

std::string format_criteria_table(const std::vector<CriterionResult>& criteria);

}  // namespace dooc
