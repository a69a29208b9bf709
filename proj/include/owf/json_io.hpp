#pragma once

#include <json.hpp>

#include <string>

#include "owf/branch_and_bound.hpp"
#include "owf/candidates.hpp"
#include "owf/farm.hpp"
#include "owf/plan.hpp"

namespace owf {

using Json = nlohmann::json;

// Documents. Every writer has a matching reader that restores the value exactly;
// infinities are written as null.
Json instance_to_json(const WindFarmInstance& instance);
WindFarmInstance instance_from_json(const Json& doc);

Json graph_to_json(const CandidateGraph& graph);
CandidateGraph graph_from_json(const Json& doc);

Json plan_to_json(const Plan& plan, const SolveStats* stats = nullptr);
Plan plan_from_json(const Json& doc);

Json stats_to_json(const SolveStats& stats);
SolveStats stats_from_json(const Json& doc);

Json report_to_json(const CostReport& report);
CostReport report_from_json(const Json& doc);

/// Missing keys keep their defaults.
Json planning_to_json(const PlanningConfig& config);
PlanningConfig planning_from_json(const Json& doc);
Json cost_to_json(const CostModel& cost);
CostModel cost_from_json(const Json& doc);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

}  // namespace owf
