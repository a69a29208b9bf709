#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "owf/evaluate.hpp"
#include "owf/milp.hpp"
#include "owf/plan.hpp"

namespace owf {

enum class SolveStatus {
  Optimal,     // tree exhausted or gap within tolerance
  Feasible,    // limit reached with an incumbent
  Infeasible,  // tree exhausted without an integer point
  Unsolved,    // limit reached without an incumbent
};

const char* to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::Unsolved;
  Plan plan;
  SolveStats stats;
  std::vector<double> bound_trace;      // global bound after each node
  std::vector<double> incumbent_trace;  // incumbent after each node (inf before the first)
};

using ProgressCallback = std::function<void(const SolveStats&)>;

/// Most fractional column of `primary`, then of `secondary`; ties go to the
/// lowest column index. Nothing when every listed column is within `tol` of an integer.
std::optional<int> branch_select(std::span<const double> values, std::span<const int> primary,
                                 std::span<const int> secondary, double tol);

/// Best-bound branch-and-bound (depth-first until the first incumbent) over the
/// dual simplex relaxation. Objective values are in million CNY with losses
/// priced through the tangent envelope.
SolveResult solve_milp(const BuiltModel& built, const CandidateGraph& graph, const PlanningConfig& config,
                       const CostModel& cost, const ProgressCallback& progress = {});

}  // namespace owf
