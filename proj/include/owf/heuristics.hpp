#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "owf/evaluate.hpp"
#include "owf/milp.hpp"

namespace owf {

/// Kruskal-style forest from LP values: edges by descending x, ties by cost and
/// then a seeded shuffle. An edge is skipped when it closes a cycle, joins two
/// substation trees, or would overload a cable on the way to the substation.
/// Falls back to growing the substation trees, then to a sweep, when the merge order gets stuck.
/// Returns the exactly evaluated plan, or nothing if it breaks a constraint.
std::optional<Plan> rounding_heuristic(std::span<const double> lp_values, const VarMap& vars,
                                       const CandidateGraph& graph, const PlanningConfig& config,
                                       std::uint64_t seed = 0);

enum class GreedyRule {
  Kruskal,  // merge components in edge order
  Prim,     // one feeder per substation neighbour, then grow the trees a turbine at a time
};

/// Forest builder driven by one weight per candidate edge (larger first).
std::optional<Plan> greedy_forest(std::span<const double> edge_weight, const CandidateGraph& graph,
                                  const PlanningConfig& config, std::uint64_t seed = 0,
                                  GreedyRule rule = GreedyRule::Kruskal);

/// Sweep construction: turbines go to their nearest substation, are sorted by
/// angle around it (starting `offset` places in) and cut into groups that one
/// cable can carry; each group gets a spanning tree through its substation,
/// edges taken in weight order.
std::optional<Plan> sweep_forest(std::span<const double> edge_weight, const CandidateGraph& graph,
                                 const PlanningConfig& config, int offset);

/// Branch exchange: moves a turbine's parent cable to another candidate while
/// the envelope objective drops and the plan stays feasible.
Plan improve_plan(Plan plan, const CandidateGraph& graph, const PlanningConfig& config, const CostModel& cost,
                  int max_passes = 20);

}  // namespace owf
