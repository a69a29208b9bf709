#include "owf/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "owf/pwl.hpp"

namespace owf {
namespace {

struct Traversal {
  std::vector<int> parent, parent_edge, order;  // order: BFS from the roots
  std::vector<char> reached;
  std::vector<std::vector<int>> problems;       // offending components
  std::vector<std::string> reasons;
};

std::vector<std::vector<int>> plan_adjacency(std::span<const int> edges, const CandidateGraph& graph) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(graph.instance.size()));
  for (int e : edges) {
    const auto& c = graph.edge(e);
    adj[static_cast<std::size_t>(c.i)].push_back(e);
    adj[static_cast<std::size_t>(c.j)].push_back(e);
  }
  return adj;
}

std::vector<int> component_of(int start, const std::vector<std::vector<int>>& adj, const CandidateGraph& graph) {
  std::vector<int> comp{start};
  std::vector<char> seen(adj.size(), 0);
  seen[static_cast<std::size_t>(start)] = 1;
  for (std::size_t k = 0; k < comp.size(); ++k)
    for (int e : adj[static_cast<std::size_t>(comp[k])]) {
      const int w = graph.other_end(e, comp[k]);
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        comp.push_back(w);
      }
    }
  std::sort(comp.begin(), comp.end());
  return comp;
}

// BFS from every substation at once; stranded components are rooted at their
// smallest node so they can still be oriented.
Traversal traverse(std::span<const int> edges, const CandidateGraph& graph) {
  const auto n = static_cast<std::size_t>(graph.instance.size());
  const auto adj = plan_adjacency(edges, graph);
  Traversal t;
  t.parent.assign(n, -1);
  t.parent_edge.assign(n, -1);
  t.reached.assign(n, 0);
  std::vector<char> root_is_sub(n, 0), used_edge(static_cast<std::size_t>(graph.num_edges()), 0);
  std::vector<int> root(n, -1);

  auto grow = [&](std::deque<int>& queue) {
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      t.order.push_back(u);
      for (int e : adj[static_cast<std::size_t>(u)]) {
        if (used_edge[static_cast<std::size_t>(e)]) continue;
        used_edge[static_cast<std::size_t>(e)] = 1;
        const int w = graph.other_end(e, u);
        const auto uw = static_cast<std::size_t>(w);
        if (t.reached[uw]) {
          t.problems.push_back(component_of(w, adj, graph));
          t.reasons.push_back(root[uw] != root[static_cast<std::size_t>(u)]
                                  ? "path joins two substations"
                                  : "cycle through node " + std::to_string(w));
          continue;
        }
        t.reached[uw] = 1;
        root[uw] = root[static_cast<std::size_t>(u)];
        t.parent[uw] = u;
        t.parent_edge[uw] = e;
        queue.push_back(w);
      }
    }
  };

  std::deque<int> queue;
  for (const auto& node : graph.instance.nodes)
    if (node.is_substation()) {
      t.reached[static_cast<std::size_t>(node.id)] = 1;
      root[static_cast<std::size_t>(node.id)] = node.id;
      queue.push_back(node.id);
    }
  grow(queue);
  const std::size_t rooted = t.order.size();
  for (std::size_t u = 0; u < n; ++u) {
    if (t.reached[u]) continue;
    t.reached[u] = 1;
    root[u] = static_cast<int>(u);
    queue.push_back(static_cast<int>(u));
    const std::size_t before = t.order.size();
    grow(queue);
    if (!graph.instance.nodes[u].is_substation()) {
      std::vector<int> comp(t.order.begin() + static_cast<std::ptrdiff_t>(before), t.order.end());
      std::sort(comp.begin(), comp.end());
      t.problems.push_back(comp);
      t.reasons.push_back("turbine " + std::to_string(u) + " is not connected to a substation");
    }
  }
  // reached[] now means "connected to a substation"
  std::fill(t.reached.begin(), t.reached.end(), 0);
  for (std::size_t k = 0; k < rooted; ++k) t.reached[static_cast<std::size_t>(t.order[k])] = 1;
  return t;
}

}  // namespace

PowerFlow tree_power_flow(std::span<const int> edges, const CandidateGraph& graph, double v_ref,
                          bool allow_stranded) {
  const auto& inst = graph.instance;
  const auto n = static_cast<std::size_t>(inst.size());
  for (int e : edges)
    if (e < 0 || e >= graph.num_edges()) throw InvalidArgument("plan references unknown edge " + std::to_string(e));

  Traversal t = traverse(edges, graph);
  for (std::size_t k = 0; k < t.problems.size(); ++k) {
    const bool stranded = t.reasons[k].find("not connected") != std::string::npos;
    if (!stranded || !allow_stranded) throw StructureError(t.reasons[k], t.problems[k]);
  }

  PowerFlow pf;
  pf.parent = t.parent;
  pf.parent_edge = t.parent_edge;
  pf.curtailment.assign(n, 0.0);
  std::vector<double> net(n, 0.0);
  for (const auto& node : inst.nodes) {
    const auto k = static_cast<std::size_t>(node.id);
    const double g = power_to_pu(node.gen_mw, inst.base);
    if (!t.reached[k]) pf.curtailment[k] = g;
    net[k] = g - pf.curtailment[k];
  }
  std::vector<double> edge_flow(static_cast<std::size_t>(graph.num_edges()), 0.0);
  for (auto it = t.order.rbegin(); it != t.order.rend(); ++it) {
    const auto u = static_cast<std::size_t>(*it);
    if (t.parent[u] < 0) continue;
    edge_flow[static_cast<std::size_t>(t.parent_edge[u])] = net[u];
    net[static_cast<std::size_t>(t.parent[u])] += net[u];
  }
  pf.voltages.assign(n, v_ref);
  for (int u : t.order) {
    const auto k = static_cast<std::size_t>(u);
    if (t.parent[k] < 0) continue;
    const auto& e = graph.edge(t.parent_edge[k]);
    pf.voltages[k] = pf.voltages[static_cast<std::size_t>(t.parent[k])] +
                     edge_flow[static_cast<std::size_t>(e.id)] * e.resistance;
  }
  for (int e : edges) {
    const double f = edge_flow[static_cast<std::size_t>(e)];
    const double loss = graph.edge(e).resistance * f * f;
    pf.flows.push_back(f);
    pf.losses.push_back(loss);
    pf.total_loss += loss;
  }
  return pf;
}

PowerFlow tree_power_flow(const Plan& plan, const CandidateGraph& graph, double v_ref) {
  return tree_power_flow(plan.edges, graph, v_ref, plan.declared_curtailment);
}

Plan make_plan(std::vector<int> edges, const CandidateGraph& graph, const PlanningConfig& config,
               bool allow_stranded) {
  std::sort(edges.begin(), edges.end());
  const PowerFlow pf = tree_power_flow(edges, graph, config.v_ref, allow_stranded);
  Plan plan;
  plan.edges = std::move(edges);
  plan.parent = pf.parent;
  plan.flows = pf.flows;
  plan.voltages = pf.voltages;
  plan.curtailment = pf.curtailment;
  plan.declared_curtailment =
      std::any_of(pf.curtailment.begin(), pf.curtailment.end(), [](double c) { return c > 0.0; });
  return plan;
}

double operation_cost(double loss_mw, const CostModel& cost) {
  return cost.eta_hours * cost.energy_price * loss_mw * 1000.0 / 1e6;
}

CostReport cost_breakdown(const Plan& plan, const CandidateGraph& graph, const CostModel& cost) {
  const auto& base = graph.instance.base;
  CostReport rep;
  double loss_pu = 0.0;
  for (std::size_t k = 0; k < plan.edges.size(); ++k) {
    const auto& e = graph.edge(plan.edges[k]);
    rep.investment += e.cost;
    rep.cable_length += e.length_km;
    const double f = k < plan.flows.size() ? plan.flows[k] : 0.0;
    loss_pu += e.resistance * f * f;
  }
  rep.loss_mw = power_from_pu(loss_pu, base);
  rep.generation_mw = graph.instance.total_generation_mw();
  rep.operation = operation_cost(rep.loss_mw, cost);
  const double curtailed = std::accumulate(plan.curtailment.begin(), plan.curtailment.end(), 0.0);
  rep.curtailment_value = cost.curtail_penalty * curtailed;
  rep.total = rep.investment + rep.operation + rep.curtailment_value;
  rep.loss_rate = rep.generation_mw > 0.0 ? 100.0 * rep.loss_mw / rep.generation_mw : 0.0;
  rep.cables = static_cast<int>(plan.edges.size());
  rep.candidate_count = graph.num_edges();
  rep.farm = farm_digest(graph.instance);
  return rep;
}

double envelope_objective(const Plan& plan, const CandidateGraph& graph, const PlanningConfig& config,
                          const CostModel& cost) {
  const double eta = cost.loss_value_per_pu(graph.instance.base);
  double total = 0.0;
  for (std::size_t k = 0; k < plan.edges.size(); ++k) {
    const auto& e = graph.edge(plan.edges[k]);
    const auto cuts = pwl_loss_cuts(e.capacity, config.pwl_segments);
    const double s = std::min(std::abs(plan.flows[k]), e.capacity);
    total += e.cost + eta * e.resistance * tangent_envelope(cuts, s);
  }
  for (double c : plan.curtailment) total += cost.curtail_penalty * c;
  return total;
}

const char* to_string(PlanViolation::Kind kind) {
  switch (kind) {
    case PlanViolation::Kind::Radiality: return "radiality";
    case PlanViolation::Kind::Orientation: return "orientation";
    case PlanViolation::Kind::Capacity: return "capacity";
    case PlanViolation::Kind::Voltage: return "voltage";
    case PlanViolation::Kind::Crossing: return "crossing";
    case PlanViolation::Kind::Curtailment: return "curtailment";
    case PlanViolation::Kind::Balance: return "balance";
  }
  return "?";
}

std::vector<PlanViolation> check_feasibility(const Plan& plan, const CandidateGraph& graph,
                                             const PlanningConfig& config) {
  using Kind = PlanViolation::Kind;
  std::vector<PlanViolation> out;
  const auto& inst = graph.instance;
  const auto n = static_cast<std::size_t>(inst.size());

  for (int e : plan.edges)
    if (e < 0 || e >= graph.num_edges()) {
      out.push_back({Kind::Radiality, e, -1, "unknown edge"});
      return out;
    }
  std::vector<int> sorted = plan.edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    out.push_back({Kind::Radiality, -1, -1, "edge listed twice"});

  const int expected = inst.size() - inst.num_substations();
  if (static_cast<int>(plan.edges.size()) != expected)
    out.push_back({Kind::Radiality, -1, -1,
                   "plan has " + std::to_string(plan.edges.size()) + " cables, radial forest needs " +
                       std::to_string(expected)});

  const Traversal t = traverse(plan.edges, graph);
  for (std::size_t k = 0; k < t.problems.size(); ++k) {
    const bool stranded = t.reasons[k].find("not connected") != std::string::npos;
    if (stranded && plan.declared_curtailment) continue;
    out.push_back({Kind::Radiality, -1, t.problems[k].empty() ? -1 : t.problems[k].front(), t.reasons[k]});
  }
  if (!plan.parent.empty()) {
    for (std::size_t u = 0; u < n; ++u) {
      const int expect = inst.nodes[u].is_substation() ? -1 : t.parent[u];
      if (u < plan.parent.size() && plan.parent[u] != expect)
        out.push_back({Kind::Orientation, -1, static_cast<int>(u), "parent does not match the rooted forest"});
    }
  }

  if (plan.flows.size() != plan.edges.size()) {
    out.push_back({Kind::Balance, -1, -1, "one flow per chosen edge required"});
  } else {
    for (std::size_t k = 0; k < plan.edges.size(); ++k) {
      const auto& e = graph.edge(plan.edges[k]);
      if (std::abs(plan.flows[k]) > e.capacity + 1e-6)
        out.push_back({Kind::Capacity, e.id, -1,
                       "flow " + std::to_string(power_from_pu(std::abs(plan.flows[k]), inst.base)) +
                           " MW exceeds " + std::to_string(power_from_pu(e.capacity, inst.base)) + " MW"});
    }
    // KCL against the plan's own flows
    if (out.empty() || std::none_of(out.begin(), out.end(), [](const auto& v) { return v.kind == Kind::Radiality; })) {
      std::vector<double> injection(n, 0.0);
      for (std::size_t k = 0; k < plan.edges.size(); ++k) {
        const int child = t.parent_edge[static_cast<std::size_t>(graph.edge(plan.edges[k]).i)] == plan.edges[k]
                              ? graph.edge(plan.edges[k]).i
                              : graph.edge(plan.edges[k]).j;
        injection[static_cast<std::size_t>(child)] += plan.flows[k];
        injection[static_cast<std::size_t>(graph.other_end(plan.edges[k], child))] -= plan.flows[k];
      }
      for (const auto& node : inst.nodes) {
        if (node.is_substation()) continue;
        const auto k = static_cast<std::size_t>(node.id);
        const double curt = k < plan.curtailment.size() ? plan.curtailment[k] : 0.0;
        if (std::abs(injection[k] - (power_to_pu(node.gen_mw, inst.base) - curt)) > 1e-6)
          out.push_back({Kind::Balance, -1, node.id, "flow balance broken"});
      }
    }
  }

  for (std::size_t u = 0; u < n && u < plan.voltages.size(); ++u) {
    const double v = plan.voltages[u];
    if (inst.nodes[u].is_substation()) {
      if (std::abs(v - config.v_ref) > 1e-7)
        out.push_back({Kind::Voltage, -1, static_cast<int>(u), "substation voltage differs from v_ref"});
    } else if (v < config.v_lo - 1e-7 || v > config.v_hi + 1e-7) {
      out.push_back({Kind::Voltage, -1, static_cast<int>(u), "voltage " + std::to_string(v) + " p.u. out of bounds"});
    }
  }

  if (config.forbid_crossings) {
    std::vector<char> chosen(static_cast<std::size_t>(graph.num_edges()), 0);
    for (int e : plan.edges) chosen[static_cast<std::size_t>(e)] = 1;
    for (auto [a, b] : graph.crossings)
      if (chosen[static_cast<std::size_t>(a)] && chosen[static_cast<std::size_t>(b)])
        out.push_back({Kind::Crossing, a, -1, "crosses edge " + std::to_string(b)});
  }

  if (!plan.declared_curtailment)
    for (std::size_t u = 0; u < plan.curtailment.size(); ++u)
      if (plan.curtailment[u] > 1e-9)
        out.push_back({Kind::Curtailment, -1, static_cast<int>(u), "undeclared curtailment"});
  return out;
}

OracleResult brute_force_optimal(const CandidateGraph& graph, const CostModel& cost, const PlanningConfig& config,
                                 int node_limit) {
  const auto& inst = graph.instance;
  if (inst.size() > node_limit)
    throw InvalidArgument("brute force refused: " + std::to_string(inst.size()) + " nodes exceed limit " +
                          std::to_string(node_limit));
  const int needed = inst.size() - inst.num_substations();
  const int m = graph.num_edges();

  std::vector<char> crosses(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), 0);
  if (config.forbid_crossings)
    for (auto [a, b] : graph.crossings) {
      crosses[static_cast<std::size_t>(a) * static_cast<std::size_t>(m) + static_cast<std::size_t>(b)] = 1;
      crosses[static_cast<std::size_t>(b) * static_cast<std::size_t>(m) + static_cast<std::size_t>(a)] = 1;
    }

  OracleResult best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<int> chosen;
  std::vector<int> comp(static_cast<std::size_t>(inst.size()));
  std::vector<char> has_sub(static_cast<std::size_t>(inst.size()));

  auto find = [&](auto&& self, int u) -> int {
    return comp[static_cast<std::size_t>(u)] == u ? u : self(self, comp[static_cast<std::size_t>(u)]);
  };

  auto evaluate = [&] {
    ++best.forests;
    Plan plan = make_plan(chosen, graph, config);
    bool ok = true;
    for (std::size_t k = 0; k < plan.edges.size() && ok; ++k)
      ok = std::abs(plan.flows[k]) <= graph.edge(plan.edges[k]).capacity + 1e-9;
    for (std::size_t u = 0; u < plan.voltages.size() && ok; ++u)
      ok = plan.voltages[u] >= config.v_lo - 1e-9 && plan.voltages[u] <= config.v_hi + 1e-9;
    if (!ok) return;
    ++best.feasible;
    const double total = cost_breakdown(plan, graph, cost).total;
    if (total < best.objective) {
      best.objective = total;
      best.plan = std::move(plan);
    }
  };

  // union-find without path compression so that a union can be undone
  auto search = [&](auto&& self, int next, double partial) -> void {
    if (static_cast<int>(chosen.size()) == needed) {
      evaluate();
      return;
    }
    if (m - next < needed - static_cast<int>(chosen.size())) return;
    if (partial >= best.objective) return;
    for (int e = next; e < m; ++e) {
      if (m - e < needed - static_cast<int>(chosen.size())) break;
      const auto& c = graph.edge(e);
      const int ra = find(find, c.i), rb = find(find, c.j);
      if (ra == rb || (has_sub[static_cast<std::size_t>(ra)] && has_sub[static_cast<std::size_t>(rb)])) continue;
      bool blocked = false;
      for (int o : chosen)
        if (crosses[static_cast<std::size_t>(e) * static_cast<std::size_t>(m) + static_cast<std::size_t>(o)]) {
          blocked = true;
          break;
        }
      if (blocked) continue;
      comp[static_cast<std::size_t>(rb)] = ra;
      const char sub_before = has_sub[static_cast<std::size_t>(ra)];
      has_sub[static_cast<std::size_t>(ra)] = static_cast<char>(sub_before || has_sub[static_cast<std::size_t>(rb)]);
      chosen.push_back(e);
      self(self, e + 1, partial + c.cost);
      chosen.pop_back();
      has_sub[static_cast<std::size_t>(ra)] = sub_before;
      comp[static_cast<std::size_t>(rb)] = rb;
    }
  };

  for (const auto& node : inst.nodes) {
    comp[static_cast<std::size_t>(node.id)] = node.id;
    has_sub[static_cast<std::size_t>(node.id)] = node.is_substation() ? 1 : 0;
  }
  search(search, 0, 0.0);
  if (best.plan.empty() && needed > 0) throw StructureError("no feasible radial forest exists", {});
  return best;
}

}  // namespace owf
