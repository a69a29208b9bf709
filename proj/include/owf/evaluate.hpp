#pragma once

#include <span>
#include <string>
#include <vector>

#include "owf/candidates.hpp"
#include "owf/plan.hpp"

namespace owf {

struct PowerFlow {
  std::vector<int> parent;          // per node, -1 for roots and stranded nodes
  std::vector<int> parent_edge;     // per node
  std::vector<double> flows;        // per plan edge, positive child -> parent
  std::vector<double> voltages;     // per node
  std::vector<double> losses;       // per plan edge, r f^2 in p.u.
  std::vector<double> curtailment;  // per node
  double total_loss = 0.0;
};

/// Exact flows on a substation-rooted forest: KCL accumulated leaf to root,
/// v_child = v_parent + f r from the roots at v_ref, losses r f^2.
/// Throws StructureError on cycles, substation-to-substation paths or (unless
/// `allow_stranded`, which curtails them) turbines cut off from every substation.
PowerFlow tree_power_flow(std::span<const int> edges, const CandidateGraph& graph, double v_ref,
                          bool allow_stranded = false);
PowerFlow tree_power_flow(const Plan& plan, const CandidateGraph& graph, double v_ref);

/// Plan for an edge set with flows and voltages filled in.
Plan make_plan(std::vector<int> edges, const CandidateGraph& graph, const PlanningConfig& config,
               bool allow_stranded = false);

/// Lifetime value of a loss, million CNY.
double operation_cost(double loss_mw, const CostModel& cost);

CostReport cost_breakdown(const Plan& plan, const CandidateGraph& graph, const CostModel& cost);

/// Objective the MILP assigns to this plan (losses through the tangent envelope).
double envelope_objective(const Plan& plan, const CandidateGraph& graph, const PlanningConfig& config,
                          const CostModel& cost);

struct PlanViolation {
  enum class Kind { Radiality, Orientation, Capacity, Voltage, Crossing, Curtailment, Balance };
  Kind kind;
  int edge = -1;
  int node = -1;
  std::string detail;
};

const char* to_string(PlanViolation::Kind kind);

std::vector<PlanViolation> check_feasibility(const Plan& plan, const CandidateGraph& graph,
                                             const PlanningConfig& config);

struct OracleResult {
  Plan plan;
  double objective = 0.0;  // exact total cost, million CNY
  long forests = 0;
  long feasible = 0;
};

/// Exhaustive search over every substation-rooted spanning forest of the
/// candidate graph. Refuses instances with more than `node_limit` nodes.
OracleResult brute_force_optimal(const CandidateGraph& graph, const CostModel& cost, const PlanningConfig& config,
                                 int node_limit = 9);

struct BaselineLayout {
  CandidateGraph graph;  // holds only the built cables
  Plan plan;
};

/// Rows strung west to east, each eastmost turbine cabled straight to the substation.
BaselineLayout baseline_string_layout(const WindFarmInstance& instance, const Point& substation,
                                      const PlanningConfig& config);

/// Minimum-cost spanning forest rooted at the substations, blind to capacity and losses.
Plan mst_baseline(const CandidateGraph& graph, const PlanningConfig& config);

}  // namespace owf
