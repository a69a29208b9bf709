#pragma once

#include <utility>
#include <vector>

#include "owf/farm.hpp"
#include "owf/geometry.hpp"

namespace owf {

struct CandidateCable {
  int id = 0;
  int i = 0;  // smaller node id
  int j = 0;
  double length_km = 0.0;
  int type_index = 0;
  double cost = 0.0;        // million CNY
  double resistance = 0.0;  // p.u.
  double capacity = 0.0;    // p.u. power
};

struct CandidateGraph {
  WindFarmInstance instance;
  std::vector<CandidateCable> edges;
  std::vector<std::vector<int>> adjacency;  // node -> incident edge ids
  std::vector<std::pair<int, int>> crossings;

  int num_edges() const { return static_cast<int>(edges.size()); }
  const CandidateCable& edge(int id) const { return edges.at(static_cast<std::size_t>(id)); }
  int other_end(int edge_id, int node) const {
    const auto& e = edge(edge_id);
    return e.i == node ? e.j : e.i;
  }
  Segment<double> segment(int edge_id) const {
    const auto& e = edge(edge_id);
    return {instance.node(e.i).coord, instance.node(e.j).coord};
  }
  /// Rebuilds adjacency from edges.
  void index();
};

/// One candidate per node pair within range and per cable type, plus any
/// configured substation links. Crossings are left empty; see find_crossings.
CandidateGraph enumerate_candidates(const WindFarmInstance& instance, const PlanningConfig& config);

/// Canonical (smaller id first), sorted list of crossing candidate pairs that share no node.
std::vector<std::pair<int, int>> find_crossings(const CandidateGraph& graph);

/// Cable built from a type between two nodes of an instance.
CandidateCable make_cable(const WindFarmInstance& instance, int id, int a, int b, int type_index,
                          const CableType& type);

}  // namespace owf
