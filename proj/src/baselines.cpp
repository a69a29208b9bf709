#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "owf/evaluate.hpp"

namespace owf {
namespace {

constexpr double kGridTol = 1e-6;

// Turbine ids grouped by row (south to north), each row sorted west to east.
std::vector<std::vector<int>> grid_rows(const WindFarmInstance& instance) {
  std::vector<int> ids = instance.turbine_ids();
  if (ids.empty()) throw InvalidArgument("baseline needs at least one turbine");
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    const auto& pa = instance.node(a).coord;
    const auto& pb = instance.node(b).coord;
    if (std::abs(pa.y() - pb.y()) > kGridTol) return pa.y() < pb.y();
    return pa.x() < pb.x();
  });
  std::vector<std::vector<int>> rows;
  double y = 0.0;
  for (int id : ids) {
    const double yi = instance.node(id).coord.y();
    if (rows.empty() || std::abs(yi - y) > kGridTol) {
      rows.emplace_back();
      y = yi;
    }
    rows.back().push_back(id);
  }
  for (const auto& row : rows) {
    if (row.size() != rows.front().size()) throw InvalidArgument("not a grid: rows have different lengths");
    for (std::size_t c = 0; c < row.size(); ++c)
      if (std::abs(instance.node(row[c]).coord.x() - instance.node(rows.front()[c]).coord.x()) > kGridTol)
        throw InvalidArgument("not a grid: columns are not aligned");
  }
  return rows;
}

}  // namespace

BaselineLayout baseline_string_layout(const WindFarmInstance& instance, const Point& substation,
                                      const PlanningConfig& config) {
  config.validate();
  const auto rows = grid_rows(instance);

  BaselineLayout out;
  auto& inst = out.graph.instance;
  inst.base = instance.base;
  std::map<int, int> renumber;
  for (const auto& node : instance.nodes) {
    if (node.is_substation()) continue;
    Node copy = node;
    copy.id = inst.size();
    renumber[node.id] = copy.id;
    inst.nodes.push_back(copy);
  }
  const int sub = inst.size();
  inst.nodes.push_back(Node{sub, NodeKind::Substation, substation, 0.0});

  const CableType& type = config.cable_types.front();
  auto add = [&](int a, int b) {
    out.graph.edges.push_back(make_cable(inst, out.graph.num_edges(), a, b, 0, type));
  };
  for (const auto& row : rows) {
    for (std::size_t c = 0; c + 1 < row.size(); ++c) add(renumber.at(row[c]), renumber.at(row[c + 1]));
    add(renumber.at(row.back()), sub);
  }
  out.graph.index();

  std::vector<int> all(static_cast<std::size_t>(out.graph.num_edges()));
  std::iota(all.begin(), all.end(), 0);
  out.plan = make_plan(std::move(all), out.graph, config);
  return out;
}

Plan mst_baseline(const CandidateGraph& graph, const PlanningConfig& config) {
  const auto& inst = graph.instance;
  if (inst.num_substations() == 0) throw StructureError("no substation to root the forest", {});
  std::vector<int> order(static_cast<std::size_t>(graph.num_edges()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return graph.edge(a).cost < graph.edge(b).cost; });

  // every substation starts in one shared super-root component
  std::vector<int> comp(static_cast<std::size_t>(inst.size()));
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](int u) {
    while (comp[static_cast<std::size_t>(u)] != u) {
      comp[static_cast<std::size_t>(u)] = comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(u)])];
      u = comp[static_cast<std::size_t>(u)];
    }
    return u;
  };
  const auto subs = inst.substation_ids();
  for (int s : subs) comp[static_cast<std::size_t>(find(s))] = find(subs.front());

  std::vector<int> chosen;
  for (int e : order) {
    const int a = find(graph.edge(e).i), b = find(graph.edge(e).j);
    if (a == b) continue;
    comp[static_cast<std::size_t>(a)] = b;
    chosen.push_back(e);
  }
  std::vector<int> stranded;
  for (const auto& node : inst.nodes)
    if (find(node.id) != find(subs.front())) stranded.push_back(node.id);
  if (!stranded.empty()) throw StructureError("candidate graph is disconnected", stranded);
  return make_plan(std::move(chosen), graph, config);
}

}  // namespace owf
