#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "owf/candidates.hpp"
#include "owf/farm.hpp"

namespace fx {

using owf::CandidateGraph;
using owf::CostModel;
using owf::NodeKind;
using owf::PlanningConfig;
using owf::WindFarmInstance;

inline WindFarmInstance with_substation(WindFarmInstance inst, double x, double y) {
  owf::Node s;
  s.id = inst.size();
  s.kind = NodeKind::Substation;
  s.coord = owf::Point(x, y);
  inst.nodes.push_back(s);
  return inst;
}

inline WindFarmInstance from_points(const std::vector<owf::Point>& turbines, const owf::Point& sub,
                                    double mw = 8.0) {
  WindFarmInstance inst;
  for (const auto& p : turbines) {
    owf::Node n;
    n.id = inst.size();
    n.coord = p;
    n.gen_mw = mw;
    inst.nodes.push_back(n);
  }
  return with_substation(inst, sub.x(), sub.y());
}

// 2x3 grid, spacing 1.3 x 1.0, substation at the centroid
inline WindFarmInstance grid23() { return with_substation(owf::generate_grid(2, 3, 1.0, 1.3, 8.0), 1.3, 0.5); }

// substation and two turbines on an equilateral triangle of side 1
inline WindFarmInstance triangle() {
  return from_points({{1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}, {0.0, 0.0});
}

// substation then three turbines at unit spacing along x
inline WindFarmInstance path3() { return from_points({{1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}}, {0.0, 0.0}); }

inline WindFarmInstance single() { return from_points({{1.0, 0.0}}, {0.0, 0.0}); }

inline PlanningConfig config(double range) {
  PlanningConfig c;
  c.max_range_km = range;
  c.solver.time_limit_s = 60.0;
  c.solver.gap_tol = 0.0;
  return c;
}

inline CostModel losses_off() {
  CostModel c;
  c.eta_hours = 0.0;
  return c;
}

inline CandidateGraph graph(const WindFarmInstance& inst, const PlanningConfig& cfg) {
  auto g = owf::enumerate_candidates(inst, cfg);
  g.crossings = owf::find_crossings(g);
  return g;
}

struct Fixture {
  const char* name;
  WindFarmInstance instance;
  double range;
};

inline std::vector<Fixture> oracle_suite() {
  return {{"grid23", grid23(), 1.5}, {"triangle", triangle(), 1.1}, {"path3", path3(), 1.05}};
}

// --- independent reference evaluation -------------------------------------
// Written against the problem statement only: subset enumeration over edge
// bitmasks, BFS orientation, subtree sums for flows.

struct RefEval {
  bool radial = false;
  bool feasible = false;
  double investment = 0.0;
  double loss_pu = 0.0;  // sum r f^2
  double total = 0.0;
  std::vector<double> voltage;
};

inline RefEval ref_evaluate(const CandidateGraph& g, const std::vector<int>& edges, const PlanningConfig& cfg,
                            const CostModel& cost) {
  const int n = g.instance.size();
  RefEval out;
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
  for (int e : edges) {
    const auto& c = g.edge(e);
    adj[static_cast<std::size_t>(c.i)].push_back({c.j, e});
    adj[static_cast<std::size_t>(c.j)].push_back({c.i, e});
    out.investment += c.cost;
  }
  std::vector<int> par(static_cast<std::size_t>(n), -2), pedge(static_cast<std::size_t>(n), -1), order;
  for (const auto& node : g.instance.nodes) {
    if (!node.is_substation()) continue;
    par[static_cast<std::size_t>(node.id)] = -1;
    std::vector<int> stack{node.id};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      order.push_back(u);
      for (auto [w, e] : adj[static_cast<std::size_t>(u)]) {
        if (e == pedge[static_cast<std::size_t>(u)]) continue;
        if (par[static_cast<std::size_t>(w)] != -2 || g.instance.node(w).is_substation())
          return out;  // cycle, or two substations joined
        par[static_cast<std::size_t>(w)] = u;
        pedge[static_cast<std::size_t>(w)] = e;
        stack.push_back(w);
      }
    }
  }
  if (static_cast<int>(order.size()) != n) return out;
  out.radial = true;

  std::vector<double> sub(static_cast<std::size_t>(n), 0.0);
  for (const auto& node : g.instance.nodes) sub[static_cast<std::size_t>(node.id)] = node.gen_mw / g.instance.base.s_base_mva;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (par[static_cast<std::size_t>(*it)] >= 0) sub[static_cast<std::size_t>(par[static_cast<std::size_t>(*it)])] += sub[static_cast<std::size_t>(*it)];

  out.voltage.assign(static_cast<std::size_t>(n), cfg.v_ref);
  out.feasible = true;
  for (int u : order) {
    const int p = par[static_cast<std::size_t>(u)];
    if (p < 0) continue;
    const auto& c = g.edge(pedge[static_cast<std::size_t>(u)]);
    const double f = sub[static_cast<std::size_t>(u)];
    out.loss_pu += c.resistance * f * f;
    out.voltage[static_cast<std::size_t>(u)] = out.voltage[static_cast<std::size_t>(p)] + f * c.resistance;
    if (f > c.capacity + 1e-9) out.feasible = false;
    if (out.voltage[static_cast<std::size_t>(u)] > cfg.v_hi + 1e-9 || out.voltage[static_cast<std::size_t>(u)] < cfg.v_lo - 1e-9)
      out.feasible = false;
  }
  const double eta = cost.eta_hours * cost.energy_price * g.instance.base.s_base_mva * 1000.0 / 1e6;
  out.total = out.investment + eta * out.loss_pu;
  return out;
}

struct RefOptimum {
  double total = std::numeric_limits<double>::infinity();
  double investment = 0.0;
  std::vector<int> edges;
  int feasible = 0;
};

inline bool crossing_pair(const CandidateGraph& g, const std::vector<int>& edges) {
  for (auto [a, b] : g.crossings)
    if (std::find(edges.begin(), edges.end(), a) != edges.end() &&
        std::find(edges.begin(), edges.end(), b) != edges.end())
      return true;
  return false;
}

inline RefOptimum ref_optimum(const CandidateGraph& g, const PlanningConfig& cfg, const CostModel& cost) {
  const int m = g.num_edges();
  const int need = g.instance.num_turbines();
  RefOptimum best;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) != need) continue;
    std::vector<int> edges;
    for (int e = 0; e < m; ++e)
      if (mask >> e & 1u) edges.push_back(e);
    if (cfg.forbid_crossings && crossing_pair(g, edges)) continue;
    const auto r = ref_evaluate(g, edges, cfg, cost);
    if (!r.feasible) continue;
    ++best.feasible;
    if (r.total < best.total) {
      best.total = r.total;
      best.investment = r.investment;
      best.edges = edges;
    }
  }
  return best;
}

// --- generators ------------------------------------------------------------

// Random turbine cloud on a jittered lattice (no coincident points), one or two substations.
inline WindFarmInstance random_farm(std::mt19937_64& rng, int turbines, int substations) {
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::uniform_real_distribution<double> mw(3.0, 10.0);
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(turbines))));
  WindFarmInstance inst;
  for (int k = 0; k < turbines; ++k) {
    owf::Node n;
    n.id = k;
    n.coord = owf::Point((k % cols) + jitter(rng), (k / cols) + jitter(rng));
    n.gen_mw = mw(rng);
    inst.nodes.push_back(n);
  }
  const double span = cols - 1;
  for (int s = 0; s < substations; ++s)
    inst = with_substation(inst, span * (s + 1) / (substations + 1) + 0.5, span / 2.0 + 0.5);
  return inst;
}

// Random substation-rooted spanning forest over the candidate graph (random-order Kruskal).
inline std::optional<std::vector<int>> random_forest(std::mt19937_64& rng, const CandidateGraph& g) {
  const int n = g.instance.size();
  std::vector<int> comp(static_cast<std::size_t>(n));
  std::vector<char> sub(static_cast<std::size_t>(n));
  for (const auto& node : g.instance.nodes) {
    comp[static_cast<std::size_t>(node.id)] = node.id;
    sub[static_cast<std::size_t>(node.id)] = node.is_substation();
  }
  auto find = [&](int u) {
    while (comp[static_cast<std::size_t>(u)] != u) u = comp[static_cast<std::size_t>(u)];
    return u;
  };
  std::vector<int> order(static_cast<std::size_t>(g.num_edges()));
  for (int e = 0; e < g.num_edges(); ++e) order[static_cast<std::size_t>(e)] = e;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> out;
  for (int e : order) {
    const int a = find(g.edge(e).i), b = find(g.edge(e).j);
    if (a == b || (sub[static_cast<std::size_t>(a)] && sub[static_cast<std::size_t>(b)])) continue;
    comp[static_cast<std::size_t>(b)] = a;
    sub[static_cast<std::size_t>(a)] = static_cast<char>(sub[static_cast<std::size_t>(a)] || sub[static_cast<std::size_t>(b)]);
    out.push_back(e);
  }
  if (static_cast<int>(out.size()) != g.instance.num_turbines()) return std::nullopt;
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fx
