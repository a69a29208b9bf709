#include "owf/heuristics.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace owf {
namespace {

// Partial forest with exact loads on substation trees.
class ForestBuilder {
 public:
  ForestBuilder(const CandidateGraph& graph, const PlanningConfig& config)
      : g_(graph), n_(static_cast<std::size_t>(graph.instance.size())) {
    comp_.resize(n_);
    std::iota(comp_.begin(), comp_.end(), 0);
    rooted_.assign(n_, 0);
    load_.assign(n_, 0.0);
    parent_.assign(n_, -1);
    parent_edge_.assign(n_, -1);
    edge_flow_.assign(static_cast<std::size_t>(graph.num_edges()), 0.0);
    adj_.resize(n_);
    for (const auto& node : graph.instance.nodes) {
      const auto k = static_cast<std::size_t>(node.id);
      rooted_[k] = node.is_substation() ? 1 : 0;
      load_[k] = power_to_pu(node.gen_mw, graph.instance.base);
    }
    for (const auto& c : config.cable_types) max_cap_ = std::max(max_cap_, power_to_pu(c.capacity_mw, graph.instance.base));
  }

  int find(int u) {
    while (comp_[static_cast<std::size_t>(u)] != u) {
      comp_[static_cast<std::size_t>(u)] = comp_[static_cast<std::size_t>(comp_[static_cast<std::size_t>(u)])];
      u = comp_[static_cast<std::size_t>(u)];
    }
    return u;
  }

  bool can_add(int e) {
    const auto& c = g_.edge(e);
    const int a = find(c.i), b = find(c.j);
    if (a == b) return false;
    const bool ra = rooted_[static_cast<std::size_t>(a)], rb = rooted_[static_cast<std::size_t>(b)];
    if (ra && rb) return false;
    const double la = load_[static_cast<std::size_t>(a)], lb = load_[static_cast<std::size_t>(b)];
    if (!ra && !rb) return la + lb <= max_cap_ + 1e-12;
    const int attach = ra ? c.i : c.j;
    const double extra = ra ? lb : la;
    if (extra > c.capacity + 1e-12) return false;
    for (int u = attach; parent_[static_cast<std::size_t>(u)] >= 0; u = parent_[static_cast<std::size_t>(u)]) {
      const int pe = parent_edge_[static_cast<std::size_t>(u)];
      if (edge_flow_[static_cast<std::size_t>(pe)] + extra > g_.edge(pe).capacity + 1e-12) return false;
    }
    return true;
  }

  /// Caller has checked can_add(e).
  void add(int e) {
    const auto& c = g_.edge(e);
    const int a = find(c.i), b = find(c.j);
    const bool ra = rooted_[static_cast<std::size_t>(a)], rb = rooted_[static_cast<std::size_t>(b)];
    const double la = load_[static_cast<std::size_t>(a)], lb = load_[static_cast<std::size_t>(b)];
    if (ra || rb) {
      // the unrooted side hangs below `attach`
      const int attach = ra ? c.i : c.j;
      const double extra = ra ? lb : la;
      for (int u = attach; parent_[static_cast<std::size_t>(u)] >= 0; u = parent_[static_cast<std::size_t>(u)])
        edge_flow_[static_cast<std::size_t>(parent_edge_[static_cast<std::size_t>(u)])] += extra;
      hang_below(ra ? c.j : c.i, attach, e);
    }
    adj_[static_cast<std::size_t>(c.i)].push_back(e);
    adj_[static_cast<std::size_t>(c.j)].push_back(e);
    comp_[static_cast<std::size_t>(b)] = a;
    rooted_[static_cast<std::size_t>(a)] = static_cast<char>(ra || rb);
    load_[static_cast<std::size_t>(a)] = la + lb;
    edges_.push_back(e);
  }

  bool rooted(int u) { return rooted_[static_cast<std::size_t>(find(u))] != 0; }

  const std::vector<int>& edges() const { return edges_; }

 private:
  // Orients the component of `hang` below `attach` and fills its edge flows.
  void hang_below(int hang, int attach, int via) {
    std::vector<int> order{hang};
    parent_[static_cast<std::size_t>(hang)] = attach;
    parent_edge_[static_cast<std::size_t>(hang)] = via;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const int u = order[k];
      for (int e : adj_[static_cast<std::size_t>(u)]) {
        if (e == parent_edge_[static_cast<std::size_t>(u)]) continue;
        const int w = g_.other_end(e, u);
        parent_[static_cast<std::size_t>(w)] = u;
        parent_edge_[static_cast<std::size_t>(w)] = e;
        order.push_back(w);
      }
    }
    std::vector<double> sub(n_, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto u = static_cast<std::size_t>(*it);
      sub[u] += power_to_pu(g_.instance.nodes[u].gen_mw, g_.instance.base);
      edge_flow_[static_cast<std::size_t>(parent_edge_[u])] = sub[u];
      if (parent_[u] != attach) sub[static_cast<std::size_t>(parent_[u])] += sub[u];
    }
  }

  const CandidateGraph& g_;
  std::size_t n_;
  std::vector<int> comp_;
  std::vector<char> rooted_;
  std::vector<double> load_;
  std::vector<int> parent_, parent_edge_;
  std::vector<double> edge_flow_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> edges_;
  double max_cap_ = 0.0;
};

bool feasible(const Plan& plan, const CandidateGraph& graph, const PlanningConfig& config) {
  return check_feasibility(plan, graph, config).empty();
}

bool crosses_chosen(int e, const std::vector<char>& chosen, const std::vector<std::vector<int>>& crossing_adj) {
  if (crossing_adj.empty()) return false;
  for (int o : crossing_adj[static_cast<std::size_t>(e)])
    if (chosen[static_cast<std::size_t>(o)]) return true;
  return false;
}

std::vector<std::vector<int>> crossing_lists(const CandidateGraph& graph, const PlanningConfig& config) {
  std::vector<std::vector<int>> out;
  if (!config.forbid_crossings) return out;
  out.resize(static_cast<std::size_t>(graph.num_edges()));
  for (auto [a, b] : graph.crossings) {
    out[static_cast<std::size_t>(a)].push_back(b);
    out[static_cast<std::size_t>(b)].push_back(a);
  }
  return out;
}

}  // namespace

std::optional<Plan> greedy_forest(std::span<const double> edge_weight, const CandidateGraph& graph,
                                  const PlanningConfig& config, std::uint64_t seed, GreedyRule rule) {
  const int m = graph.num_edges();
  std::vector<std::uint64_t> jitter(static_cast<std::size_t>(m));
  std::mt19937_64 rng(seed);
  for (auto& j : jitter) j = rng();
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double wa = edge_weight[static_cast<std::size_t>(a)], wb = edge_weight[static_cast<std::size_t>(b)];
    if (wa != wb) return wa > wb;
    const double ca = graph.edge(a).cost, cb = graph.edge(b).cost;
    if (ca != cb) return ca < cb;
    if (jitter[static_cast<std::size_t>(a)] != jitter[static_cast<std::size_t>(b)])
      return jitter[static_cast<std::size_t>(a)] < jitter[static_cast<std::size_t>(b)];
    return a < b;
  });

  const auto crossing_adj = crossing_lists(graph, config);
  std::vector<char> chosen(static_cast<std::size_t>(m), 0);
  ForestBuilder forest(graph, config);
  const std::size_t needed = static_cast<std::size_t>(graph.instance.num_turbines());
  auto usable = [&](int e) { return !crosses_chosen(e, chosen, crossing_adj) && forest.can_add(e); };
  if (rule == GreedyRule::Kruskal) {
    for (int e : order) {
      if (forest.edges().size() == needed) break;
      if (!usable(e)) continue;
      forest.add(e);
      chosen[static_cast<std::size_t>(e)] = 1;
    }
  } else {
    // every turbine next to a substation heads its own feeder, then the trees
    // grow one turbine at a time, best edge in `order` first
    for (int e : order) {
      const auto& c = graph.edge(e);
      if (graph.instance.node(c.i).is_substation() == graph.instance.node(c.j).is_substation()) continue;
      if (!usable(e)) continue;
      forest.add(e);
      chosen[static_cast<std::size_t>(e)] = 1;
    }
    while (forest.edges().size() < needed) {
      int pick = -1;
      for (int e : order) {
        const auto& c = graph.edge(e);
        if (forest.rooted(c.i) == forest.rooted(c.j) || !usable(e)) continue;
        pick = e;
        break;
      }
      if (pick < 0) break;
      forest.add(pick);
      chosen[static_cast<std::size_t>(pick)] = 1;
    }
  }
  if (forest.edges().size() != needed) return std::nullopt;
  Plan plan;
  try {
    plan = make_plan(forest.edges(), graph, config);
  } catch (const StructureError&) {
    return std::nullopt;
  }
  if (!feasible(plan, graph, config)) return std::nullopt;
  return plan;
}

std::optional<Plan> rounding_heuristic(std::span<const double> lp_values, const VarMap& vars,
                                       const CandidateGraph& graph, const PlanningConfig& config,
                                       std::uint64_t seed) {
  std::vector<double> w(static_cast<std::size_t>(graph.num_edges()));
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = lp_values[static_cast<std::size_t>(vars.x[e])];
  if (auto plan = greedy_forest(w, graph, config, seed, GreedyRule::Kruskal)) return plan;
  if (auto plan = greedy_forest(w, graph, config, seed, GreedyRule::Prim)) return plan;
  return sweep_forest(w, graph, config, static_cast<int>(seed % 64));
}

std::optional<Plan> sweep_forest(std::span<const double> edge_weight, const CandidateGraph& graph,
                                 const PlanningConfig& config, int offset) {
  const auto& inst = graph.instance;
  const auto subs = inst.substation_ids();
  if (subs.empty()) return std::nullopt;
  double max_cap = 0.0;
  for (const auto& c : config.cable_types) max_cap = std::max(max_cap, power_to_pu(c.capacity_mw, inst.base));

  std::vector<std::vector<int>> members(subs.size());
  for (int t : inst.turbine_ids()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < subs.size(); ++k)
      if ((inst.node(t).coord - inst.node(subs[k]).coord).norm() <
          (inst.node(t).coord - inst.node(subs[best]).coord).norm())
        best = k;
    members[best].push_back(t);
  }

  std::vector<int> order(static_cast<std::size_t>(graph.num_edges()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double wa = edge_weight[static_cast<std::size_t>(a)], wb = edge_weight[static_cast<std::size_t>(b)];
    if (wa != wb) return wa > wb;
    return graph.edge(a).cost < graph.edge(b).cost;
  });

  std::vector<int> group_of(static_cast<std::size_t>(inst.size()), -1);
  std::vector<int> group_sub;
  for (std::size_t k = 0; k < subs.size(); ++k) {
    auto& ids = members[k];
    if (ids.empty()) continue;
    const Point centre = inst.node(subs[k]).coord;
    auto angle = [&](int t) {
      const Point d = inst.node(t).coord - centre;
      return std::atan2(d.y(), d.x());
    };
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      const double aa = angle(a), ab = angle(b);
      if (aa != ab) return aa < ab;
      return a < b;
    });
    std::rotate(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(offset) % ids.size()),
                ids.end());
    double load = kInf;
    for (int t : ids) {
      const double g = power_to_pu(inst.node(t).gen_mw, inst.base);
      if (load + g > max_cap + 1e-12) {
        group_sub.push_back(subs[k]);
        load = 0.0;
      }
      load += g;
      group_of[static_cast<std::size_t>(t)] = static_cast<int>(group_sub.size()) - 1;
    }
  }

  // one spanning tree per group, substation included
  std::vector<int> comp(static_cast<std::size_t>(inst.size()));
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](int u) {
    while (comp[static_cast<std::size_t>(u)] != u) u = comp[static_cast<std::size_t>(u)];
    return u;
  };
  const auto crossing_adj = crossing_lists(graph, config);
  std::vector<char> chosen(static_cast<std::size_t>(graph.num_edges()), 0);
  std::vector<char> group_rooted(group_sub.size(), 0);
  std::vector<int> edges;
  for (int e : order) {
    const auto& c = graph.edge(e);
    const int gi = group_of[static_cast<std::size_t>(c.i)], gj = group_of[static_cast<std::size_t>(c.j)];
    int group = -1;
    if (gi >= 0 && gi == gj) group = gi;
    else if (gi < 0 && gj >= 0 && group_sub[static_cast<std::size_t>(gj)] == c.i) group = gj;
    else if (gj < 0 && gi >= 0 && group_sub[static_cast<std::size_t>(gi)] == c.j) group = gi;
    if (group < 0) continue;
    const bool via_sub = gi < 0 || gj < 0;
    // the substation belongs to several groups; each may use it once
    if (via_sub) {
      if (group_rooted[static_cast<std::size_t>(group)] || crosses_chosen(e, chosen, crossing_adj)) continue;
      group_rooted[static_cast<std::size_t>(group)] = 1;
      edges.push_back(e);
      chosen[static_cast<std::size_t>(e)] = 1;
      continue;
    }
    const int a = find(c.i), b = find(c.j);
    if (a == b || crosses_chosen(e, chosen, crossing_adj)) continue;
    comp[static_cast<std::size_t>(a)] = b;
    edges.push_back(e);
    chosen[static_cast<std::size_t>(e)] = 1;
  }
  if (static_cast<int>(edges.size()) != inst.num_turbines()) return std::nullopt;
  Plan plan;
  try {
    plan = make_plan(std::move(edges), graph, config);
  } catch (const StructureError&) {
    return std::nullopt;
  }
  if (!feasible(plan, graph, config)) return std::nullopt;
  return plan;
}

Plan improve_plan(Plan plan, const CandidateGraph& graph, const PlanningConfig& config, const CostModel& cost,
                  int max_passes) {
  const auto& inst = graph.instance;
  const auto crossing_adj = crossing_lists(graph, config);
  double best = envelope_objective(plan, graph, config, cost);
  for (int pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (const auto& node : inst.nodes) {
      if (node.is_substation()) continue;
      const int v = node.id;
      // current parent edge of v
      int cur = -1;
      for (int e : plan.edges)
        if ((graph.edge(e).i == v || graph.edge(e).j == v) && graph.other_end(e, v) == plan.parent[static_cast<std::size_t>(v)]) {
          cur = e;
          break;
        }
      if (cur < 0) continue;
      // nodes below v cannot become its parent
      std::vector<char> below(static_cast<std::size_t>(inst.size()), 0);
      below[static_cast<std::size_t>(v)] = 1;
      bool grew = true;
      while (grew) {
        grew = false;
        for (const auto& u : inst.nodes) {
          const int p = plan.parent[static_cast<std::size_t>(u.id)];
          if (p >= 0 && below[static_cast<std::size_t>(p)] && !below[static_cast<std::size_t>(u.id)]) {
            below[static_cast<std::size_t>(u.id)] = 1;
            grew = true;
          }
        }
      }
      std::vector<char> chosen(static_cast<std::size_t>(graph.num_edges()), 0);
      for (int e : plan.edges) chosen[static_cast<std::size_t>(e)] = 1;
      chosen[static_cast<std::size_t>(cur)] = 0;
      for (int e : graph.adjacency[static_cast<std::size_t>(v)]) {
        if (e == cur || chosen[static_cast<std::size_t>(e)]) continue;
        if (below[static_cast<std::size_t>(graph.other_end(e, v))]) continue;
        if (crosses_chosen(e, chosen, crossing_adj)) continue;
        std::vector<int> edges = plan.edges;
        std::replace(edges.begin(), edges.end(), cur, e);
        Plan trial;
        try {
          trial = make_plan(std::move(edges), graph, config);
        } catch (const StructureError&) {
          continue;
        }
        if (!feasible(trial, graph, config)) continue;
        const double obj = envelope_objective(trial, graph, config, cost);
        if (obj < best - 1e-9 * std::max(1.0, std::abs(best))) {
          best = obj;
          plan = std::move(trial);
          moved = true;
          break;
        }
      }
    }
    if (!moved) break;
  }
  return plan;
}

}  // namespace owf
