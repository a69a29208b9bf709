#include "owf/candidates.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <set>

namespace owf {

void CandidateGraph::index() {
  adjacency.assign(instance.nodes.size(), {});
  for (const auto& e : edges) {
    adjacency[static_cast<std::size_t>(e.i)].push_back(e.id);
    adjacency[static_cast<std::size_t>(e.j)].push_back(e.id);
  }
}

CandidateCable make_cable(const WindFarmInstance& instance, int id, int a, int b, int type_index,
                          const CableType& type) {
  CandidateCable e;
  e.id = id;
  e.i = std::min(a, b);
  e.j = std::max(a, b);
  e.length_km = (instance.node(a).coord - instance.node(b).coord).norm();
  e.type_index = type_index;
  e.cost = type.cost_per_km * e.length_km;
  e.resistance = resistance_to_pu(type.resistance_ohm_per_km, e.length_km, instance.base);
  e.capacity = power_to_pu(type.capacity_mw, instance.base);
  return e;
}

CandidateGraph enumerate_candidates(const WindFarmInstance& instance, const PlanningConfig& config) {
  config.validate();
  if (const auto v = validate_instance(instance); !v.empty())
    throw InvalidArgument("invalid instance: " + v.front().rule);

  std::set<std::pair<int, int>> pairs;
  const int n = instance.size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if ((instance.node(a).coord - instance.node(b).coord).norm() <= config.max_range_km + 1e-9)
        pairs.emplace(a, b);
  for (auto [s, t] : config.substation_links) {
    if (s < 0 || t < 0 || s >= n || t >= n || s == t)
      throw InvalidArgument("substation link references an unknown node");
    if (!instance.node(s).is_substation() && !instance.node(t).is_substation())
      throw InvalidArgument("substation link must touch a substation");
    pairs.emplace(std::min(s, t), std::max(s, t));
  }

  CandidateGraph g;
  g.instance = instance;
  for (auto [a, b] : pairs)
    for (std::size_t t = 0; t < config.cable_types.size(); ++t)
      g.edges.push_back(make_cable(instance, g.num_edges(), a, b, static_cast<int>(t), config.cable_types[t]));
  g.index();

  for (const auto& node : instance.nodes)
    if (!node.is_substation() && g.adjacency[static_cast<std::size_t>(node.id)].empty())
      throw IsolatedNodeError(node.id);
  return g;
}

std::vector<std::pair<int, int>> find_crossings(const CandidateGraph& graph) {
  std::vector<std::pair<int, int>> out;
  const int m = graph.num_edges();
  std::vector<Segment<double>> segs;
  std::vector<Eigen::AlignedBox2d> boxes;
  segs.reserve(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e) {
    segs.push_back(graph.segment(e));
    Eigen::AlignedBox2d box(segs.back().a);
    box.extend(segs.back().b);
    boxes.push_back(box);
  }
  for (int a = 0; a < m; ++a) {
    const auto& ea = graph.edge(a);
    for (int b = a + 1; b < m; ++b) {
      const auto& eb = graph.edge(b);
      if (ea.i == eb.i || ea.i == eb.j || ea.j == eb.i || ea.j == eb.j) continue;
      const auto& ba = boxes[static_cast<std::size_t>(a)];
      const auto& bb = boxes[static_cast<std::size_t>(b)];
      if ((ba.min().array() > bb.max().array() + 1e-9).any() || (bb.min().array() > ba.max().array() + 1e-9).any())
        continue;
      if (segments_cross(segs[static_cast<std::size_t>(a)], segs[static_cast<std::size_t>(b)]))
        out.emplace_back(a, b);
    }
  }
  return out;
}

}  // namespace owf
