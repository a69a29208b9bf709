#pragma once

#include <optional>
#include <string>
#include <vector>

namespace owf {

/// A built topology. Flows are per chosen edge (parallel to `edges`), positive
/// from child to parent.
struct Plan {
  std::vector<int> edges;           // candidate ids, ascending
  std::vector<int> parent;          // per node, -1 for substations
  std::vector<double> flows;        // p.u.
  std::vector<double> voltages;     // per node, p.u.
  std::vector<double> curtailment;  // per node, p.u.
  bool declared_curtailment = false;

  bool empty() const { return edges.empty(); }
};

/// Branch-and-bound progress, in objective units (million CNY).
struct SolveStats {
  double incumbent = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  long nodes_explored = 0;
  double wall_time = 0.0;
  long lp_iterations = 0;
  std::string status;
};

/// Plan costs in million CNY, lengths in km, loss rate in percent.
struct CostReport {
  double investment = 0.0;
  double operation = 0.0;
  double curtailment_value = 0.0;
  double total = 0.0;
  double cable_length = 0.0;
  double loss_rate = 0.0;
  double loss_mw = 0.0;
  double generation_mw = 0.0;
  int cables = 0;
  int candidate_count = 0;
  std::string farm;  // turbine layout digest
  std::string label;
  std::optional<SolveStats> stats;
};

}  // namespace owf
