#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "owf/branch_and_bound.hpp"
#include "owf/evaluate.hpp"
#include "owf/milp.hpp"

using namespace owf;

namespace {

int edge_between(const CandidateGraph& g, int a, int b) {
  for (const auto& e : g.edges)
    if ((e.i == a && e.j == b) || (e.i == b && e.j == a)) return e.id;
  return -1;
}

bool has_kind(const std::vector<PlanViolation>& v, PlanViolation::Kind k) {
  return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.kind == k; });
}

}  // namespace

TEST_CASE("tree_power_flow: string accumulates toward the substation") {
  const auto cfg = fx::config(1.05);
  const auto g = fx::graph(fx::path3(), cfg);  // sub 3 - 0 - 1 - 2
  std::vector<int> all{0, 1, 2};
  const auto pf = tree_power_flow(all, g, 1.0);
  const int e30 = edge_between(g, 3, 0), e01 = edge_between(g, 0, 1), e12 = edge_between(g, 1, 2);
  CHECK(pf.flows[static_cast<std::size_t>(e30)] == doctest::Approx(0.24));
  CHECK(pf.flows[static_cast<std::size_t>(e01)] == doctest::Approx(0.16));
  CHECK(pf.flows[static_cast<std::size_t>(e12)] == doctest::Approx(0.08));
  CHECK(pf.parent[0] == 3);
  CHECK(pf.parent[2] == 1);
  CHECK(pf.parent[3] == -1);
  // voltage rises toward the far end
  CHECK(pf.voltages[3] == 1.0);
  CHECK(pf.voltages[0] > 1.0);
  CHECK(pf.voltages[2] > pf.voltages[1]);
  double loss = 0;
  for (int e : all) loss += g.edge(e).resistance * pf.flows[static_cast<std::size_t>(e)] * pf.flows[static_cast<std::size_t>(e)];
  CHECK(pf.total_loss == doctest::Approx(loss).epsilon(1e-14));
}

TEST_CASE("tree_power_flow: zero generation") {
  CandidateGraph g;
  g.instance.nodes = {Node{0, NodeKind::WindTurbine, Point(1, 0), 0.0}, Node{1, NodeKind::Substation, Point(0, 0), 0.0}};
  g.edges.push_back(make_cable(g.instance, 0, 0, 1, 0, CableType{}));
  g.index();
  const std::vector<int> e{0};
  const auto pf = tree_power_flow(e, g, 1.0);
  CHECK(pf.flows[0] == 0.0);
  CHECK(pf.total_loss == 0.0);
  CHECK(pf.voltages[0] == 1.0);
  CHECK(pf.voltages[1] == 1.0);
}

TEST_CASE("tree_power_flow: structure errors") {
  const auto cfg = fx::config(1.5);
  const auto g = fx::graph(fx::grid23(), cfg);
  const std::vector<int> cycle{edge_between(g, 0, 1), edge_between(g, 1, 4), edge_between(g, 4, 3),
                               edge_between(g, 3, 0), edge_between(g, 6, 2), edge_between(g, 6, 5)};
  CHECK_THROWS_AS(tree_power_flow(cycle, g, 1.0), StructureError);

  const std::vector<int> stranded{edge_between(g, 0, 1), edge_between(g, 6, 2)};
  CHECK_THROWS_AS(tree_power_flow(stranded, g, 1.0), StructureError);
  const auto pf = tree_power_flow(stranded, g, 1.0, true);
  CHECK(pf.curtailment[0] == doctest::Approx(0.08));
  CHECK(pf.curtailment[2] == 0.0);

  try {
    (void)tree_power_flow(stranded, g, 1.0);
  } catch (const StructureError& e) {
    CHECK_FALSE(e.component().empty());
  }
}

TEST_CASE("tree_power_flow: 2x3 optimum, independent loss recomputation") {
  CostModel cost;
  const auto cfg = fx::config(1.5);
  const auto g = fx::graph(fx::grid23(), cfg);
  const auto ref = fx::ref_optimum(g, cfg, cost);
  const auto pf = tree_power_flow(ref.edges, g, cfg.v_ref);
  const auto ind = fx::ref_evaluate(g, ref.edges, cfg, cost);
  CHECK(pf.total_loss == doctest::Approx(ind.loss_pu).epsilon(1e-12));
  for (int n = 0; n < g.instance.size(); ++n)
    CHECK(pf.voltages[static_cast<std::size_t>(n)] == doctest::Approx(ind.voltage[static_cast<std::size_t>(n)]).epsilon(1e-12));
}

TEST_CASE("cost_breakdown: Table III arithmetic") {
  CostModel cost;
  PlanningConfig cfg;
  SUBCASE("94.5 km at 4.0 per km") {
    CandidateGraph g;
    g.instance = fx::from_points({{94.5, 0.0}}, {0.0, 0.0});
    g.edges.push_back(make_cable(g.instance, 0, 0, 1, 0, cfg.cable_types[0]));
    g.index();
    const auto plan = make_plan({0}, g, cfg);
    const auto rep = cost_breakdown(plan, g, cost);
    CHECK(rep.investment == doctest::Approx(378.01 / 94.50 * 94.5).epsilon(1e-3));
    CHECK(rep.investment == doctest::Approx(378.0).epsilon(1e-12));
    CHECK(rep.cable_length == doctest::Approx(94.5));
  }
  SUBCASE("operation from a loss rate") {
    const double loss_mw = 0.256 / 100.0 * 504.0;
    // lifetime energy (kWh) x price (CNY/kWh), in million CNY
    const double oracle = loss_mw * 1000.0 * 50000.0 * 0.8513 / 1e6;
    CHECK(operation_cost(loss_mw, cost) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(operation_cost(loss_mw, cost) == doctest::Approx(54.92).epsilon(1e-3));
  }
  SUBCASE("zero loss") {
    CHECK(operation_cost(0.0, cost) == 0.0);
  }
  SUBCASE("total is the sum of its parts") {
    const auto g = fx::graph(fx::grid23(), fx::config(1.5));
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
      const auto edges = fx::random_forest(rng, g);
      REQUIRE(edges);
      const auto rep = cost_breakdown(make_plan(*edges, g, fx::config(1.5)), g, cost);
      CHECK(std::abs(rep.total - rep.investment - rep.operation - rep.curtailment_value) < 1e-6);
      CHECK(rep.loss_rate >= 0.0);
      CHECK(rep.loss_rate == doctest::Approx(100.0 * rep.loss_mw / 48.0));
    }
  }
}

TEST_CASE("check_feasibility") {
  const auto cfg = fx::config(1.5);
  const auto g = fx::graph(fx::grid23(), cfg);
  CostModel cost;

  SUBCASE("solver plan is clean") {
    const auto res = solve_milp(build_milp(g, cfg, cost), g, cfg, cost);
    CHECK(check_feasibility(res.plan, g, cfg).empty());
  }
  SUBCASE("3-cycle among turbines") {
    // 4-cycle 0-1-4-3 plus two feeders
    Plan p;
    p.edges = {edge_between(g, 0, 1), edge_between(g, 1, 4), edge_between(g, 4, 3), edge_between(g, 3, 0),
               edge_between(g, 6, 2), edge_between(g, 6, 5)};
    std::sort(p.edges.begin(), p.edges.end());
    p.flows.assign(p.edges.size(), 0.0);
    CHECK(has_kind(check_feasibility(p, g, cfg), PlanViolation::Kind::Radiality));

    const auto tri = fx::graph(fx::from_points({{1, 0}, {1.5, 0.8}, {2, 0}}, {0, 0}), fx::config(1.05));
    Plan q;
    q.edges = {edge_between(tri, 0, 1), edge_between(tri, 1, 2), edge_between(tri, 0, 2)};
    std::sort(q.edges.begin(), q.edges.end());
    q.flows.assign(3, 0.0);
    CHECK(has_kind(check_feasibility(q, tri, fx::config(1.05)), PlanViolation::Kind::Radiality));
  }
  SUBCASE("eleven 8 MW turbines on one 80 MW string") {
    const auto inst = fx::with_substation(generate_grid(1, 11, 1.0, 1.0, 8.0), 11.0, 0.0);
    const auto base = baseline_string_layout(inst, Point(11.0, 0.0), cfg);
    const auto v = check_feasibility(base.plan, base.graph, cfg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == PlanViolation::Kind::Capacity);
    const auto& root = base.graph.edge(v[0].edge);
    CHECK((base.graph.instance.node(root.i).is_substation() || base.graph.instance.node(root.j).is_substation()));
    const auto k = std::find(base.plan.edges.begin(), base.plan.edges.end(), root.id) - base.plan.edges.begin();
    CHECK(power_from_pu(base.plan.flows[static_cast<std::size_t>(k)], base.graph.instance.base) == doctest::Approx(88.0));
  }
  SUBCASE("voltage, crossing, curtailment, orientation") {
    const auto ref = fx::ref_optimum(g, cfg, cost);
    Plan p = make_plan(ref.edges, g, cfg);
    auto tight = cfg;
    tight.v_hi = 1.0 + 1e-6;
    CHECK(has_kind(check_feasibility(p, g, tight), PlanViolation::Kind::Voltage));

    Plan bad = p;
    bad.curtailment[0] = 0.01;
    CHECK(has_kind(check_feasibility(bad, g, cfg), PlanViolation::Kind::Curtailment));

    bad = p;
    for (int u = 0; u < 6; ++u)
      if (bad.parent[static_cast<std::size_t>(u)] != 6) {
        bad.parent[static_cast<std::size_t>(u)] = 6;
        break;
      }
    CHECK(has_kind(check_feasibility(bad, g, cfg), PlanViolation::Kind::Orientation));

    bad = p;
    bad.flows[0] += 0.01;
    CHECK(has_kind(check_feasibility(bad, g, cfg), PlanViolation::Kind::Balance));

    auto nox = fx::config(1.5);
    nox.forbid_crossings = true;
    const auto sq = fx::graph(fx::with_substation(generate_grid(2, 2, 1.0, 1.0, 8.0), 0.5, -0.6), nox);
    REQUIRE(sq.crossings.size() == 1);
    const auto [a, b] = sq.crossings[0];
    // the two diagonals plus one side reach all four turbines; add the feeder
    std::vector<int> e{a, b};
    for (const auto& c : sq.edges)
      if (std::abs(c.length_km - 1.0) < 1e-12 && e.size() < 3) {
        e.push_back(c.id);
        break;
      }
    for (const auto& c : sq.edges)
      if ((c.i == 0 || c.j == 0) && (c.i == 4 || c.j == 4)) e.push_back(c.id);
    std::sort(e.begin(), e.end());
    const Plan xp = make_plan(e, sq, nox);
    CHECK(has_kind(check_feasibility(xp, sq, nox), PlanViolation::Kind::Crossing));
  }
}

TEST_CASE("brute force oracle") {
  CostModel cost;
  SUBCASE("triangle with losses: star from the substation") {
    const auto cfg = fx::config(1.1);
    const auto g = fx::graph(fx::triangle(), cfg);
    REQUIRE(g.num_edges() == 3);
    const auto r = brute_force_optimal(g, cost, cfg);
    CHECK(r.forests == 3);
    for (int e : r.plan.edges) CHECK((g.edge(e).i == 2 || g.edge(e).j == 2));
    CHECK(r.objective == doctest::Approx(fx::ref_optimum(g, cfg, cost).total).epsilon(1e-12));
  }
  SUBCASE("triangle without losses: twice the edge cost") {
    const auto cfg = fx::config(1.1);
    const auto g = fx::graph(fx::triangle(), cfg);
    const auto r = brute_force_optimal(g, fx::losses_off(), cfg);
    CHECK(r.objective == doctest::Approx(2 * g.edge(0).cost));
  }
  SUBCASE("suite agrees with the independent enumeration") {
    for (const auto& f : fx::oracle_suite()) {
      CAPTURE(f.name);
      const auto cfg = fx::config(f.range);
      const auto g = fx::graph(f.instance, cfg);
      for (const auto& c : {cost, fx::losses_off()}) {
        const auto r = brute_force_optimal(g, c, cfg);
        const auto ref = fx::ref_optimum(g, cfg, c);
        CHECK(r.objective == doctest::Approx(ref.total).epsilon(1e-12));
        CHECK(check_feasibility(r.plan, g, cfg).empty());
      }
    }
  }
  SUBCASE("dominates random feasible forests") {
    const auto cfg = fx::config(1.5);
    const auto g = fx::graph(fx::grid23(), cfg);
    const auto r = brute_force_optimal(g, cost, cfg);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 100; ++t) {
      const auto e = fx::random_forest(rng, g);
      REQUIRE(e);
      const Plan p = make_plan(*e, g, cfg);
      if (!check_feasibility(p, g, cfg).empty()) continue;
      CHECK(r.objective <= cost_breakdown(p, g, cost).total + 1e-12);
    }
  }
  SUBCASE("refusals") {
    const auto g = fx::graph(fx::with_substation(generate_grid(3, 3, 1, 1, 8), 0.5, 0.5), fx::config(1.05));
    CHECK_THROWS_AS(brute_force_optimal(g, cost, fx::config(1.05)), InvalidArgument);
    auto cfg = fx::config(1.05);
    cfg.cable_types[0].capacity_mw = 20.0;
    const auto p = fx::graph(fx::path3(), cfg);
    CHECK_THROWS_AS(brute_force_optimal(p, cost, cfg), StructureError);
  }
}

TEST_CASE("string baseline") {
  PlanningConfig cfg;
  SUBCASE("Table II grid") {
    const auto inst = generate_grid(7, 9, 1.0, 1.3, 8.0);
    const auto b = baseline_string_layout(inst, Point(11.05, 0.0), cfg);
    CHECK(b.plan.edges.size() == 63u);
    double intra = 0, home = 0;
    int home_runs = 0;
    const int sub = b.graph.instance.size() - 1;
    for (int e : b.plan.edges) {
      const auto& c = b.graph.edge(e);
      if (c.j == sub || c.i == sub) {
        home += c.length_km;
        ++home_runs;
      } else {
        intra += c.length_km;
      }
    }
    CHECK(intra == doctest::Approx(72.8).epsilon(1e-12));
    CHECK(home_runs == 7);
    CHECK(std::abs(intra + home - 94.5) / 94.5 < 0.05);
    CHECK(check_feasibility(b.plan, b.graph, cfg).empty());
  }
  SUBCASE("1x3 with the substation east") {
    const auto b = baseline_string_layout(generate_grid(1, 3, 1.0, 1.0, 8.0), Point(3.0, 0.0), cfg);
    CHECK(b.plan.edges.size() == 3u);
    CHECK(check_feasibility(b.plan, b.graph, cfg).empty());
  }
  SUBCASE("non-grid instance") {
    auto inst = generate_grid(2, 3, 1.0, 1.0, 8.0);
    inst.nodes[4].coord.y() += 0.3;
    CHECK_THROWS_AS(baseline_string_layout(inst, Point(5.0, 0.0), cfg), InvalidArgument);
  }
}

TEST_CASE("mst baseline") {
  CostModel cost;
  SUBCASE("path graph") {
    const auto cfg = fx::config(1.05);
    const auto g = fx::graph(fx::path3(), cfg);
    const auto p = mst_baseline(g, cfg);
    CHECK(p.edges == std::vector<int>{0, 1, 2});
  }
  SUBCASE("3x3 grid with a central substation") {
    const auto cfg = fx::config(1.05);
    const auto g = fx::graph(fx::with_substation(generate_grid(3, 3, 1.0, 1.0, 8.0), 0.5, 0.5), cfg);
    const auto p = mst_baseline(g, cfg);
    CHECK(p.edges.size() == 9u);
    const auto ref = fx::ref_optimum(g, cfg, fx::losses_off());
    CHECK(cost_breakdown(p, g, cost).investment == doctest::Approx(ref.investment).epsilon(1e-12));
    CHECK(cost_breakdown(p, g, cost).cable_length == doctest::Approx(5.0 + 4.0 * std::sqrt(0.5)));
  }
  SUBCASE("investment never above the solver's") {
    for (const auto& f : fx::oracle_suite()) {
      const auto cfg = fx::config(f.range);
      const auto g = fx::graph(f.instance, cfg);
      const auto res = solve_milp(build_milp(g, cfg, cost), g, cfg, cost);
      CHECK(cost_breakdown(mst_baseline(g, cfg), g, cost).investment <=
            cost_breakdown(res.plan, g, cost).investment + 1e-9);
    }
  }
  SUBCASE("disconnected") {
    CandidateGraph g;
    g.instance = fx::from_points({{1, 0}, {5, 0}}, {0, 0});
    g.edges.push_back(make_cable(g.instance, 0, 0, 2, 0, CableType{}));
    g.index();
    CHECK_THROWS_AS(mst_baseline(g, fx::config(1.5)), StructureError);
  }
}
