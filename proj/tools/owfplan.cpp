// owfplan: command line front end for the collector system planner.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "owf/mps.hpp"
#include "owf/pipeline.hpp"
#include "owf/siting.hpp"

using namespace owf;

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kError = 2;

void print_progress(const SolveStats& s) {
  std::fprintf(stderr, "nodes=%ld bound=%.6f incumbent=%.6f gap=%.6f\n", s.nodes_explored, s.bound, s.incumbent,
               s.gap);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

void report_violations(const std::vector<PlanViolation>& v) {
  for (const auto& x : v)
    std::fprintf(stderr, "violation: %s edge=%d node=%d %s\n", to_string(x.kind), x.edge, x.node, x.detail.c_str());
}

std::string summary(const CostReport& r) {
  std::ostringstream out;
  out.precision(6);
  out << "investment=" << r.investment << " operation=" << r.operation << " total=" << r.total
      << " length_km=" << r.cable_length << " loss_rate=" << r.loss_rate << "% cables=" << r.cables;
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offshore wind farm collector system planner"};
  app.require_subcommand(1);

  // Shared settings. A --config document is read first; flags given on the
  // command line override it.
  std::string config_path;
  RunConfig rc;
  auto load_config = [&] {
    if (!config_path.empty()) rc = run_config_from_json(read_json_file(config_path));
  };

  // generate-grid
  auto* gen = app.add_subcommand("generate-grid", "Write a rectangular turbine layout");
  gen->add_option("--config", config_path, "Run configuration document");
  std::optional<int> g_rows, g_cols;
  std::optional<double> g_rsp, g_csp, g_pow, g_sbase, g_vbase;
  std::string gen_out = "-";
  gen->add_option("--rows", g_rows, "Turbine rows (grid.rows)");
  gen->add_option("--cols", g_cols, "Turbine columns (grid.cols)");
  gen->add_option("--row-spacing", g_rsp, "km between rows (grid.row_spacing_km)");
  gen->add_option("--col-spacing", g_csp, "km between columns (grid.col_spacing_km)");
  gen->add_option("--power", g_pow, "MW per turbine (grid.wt_power_mw)");
  gen->add_option("--s-base", g_sbase, "MVA base (base.s_base_mva)");
  gen->add_option("--v-base", g_vbase, "kV base (base.v_base_kv)");
  gen->add_option("--out", gen_out, "Instance document");

  // site-substations
  auto* site = app.add_subcommand("site-substations", "Place substations by fuzzy c-means");
  site->add_option("--config", config_path, "Run configuration document");
  std::string site_in, site_out = "-";
  std::optional<int> s_count;
  std::optional<double> s_m;
  std::optional<std::uint64_t> s_seed;
  site->add_option("--instance", site_in, "Instance document")->required();
  site->add_option("--count", s_count, "Number of substations (substations)");
  site->add_option("--fuzzifier", s_m, "FCM exponent (planning.siting.fuzzifier)");
  site->add_option("--seed", s_seed, "Seeding RNG (planning.siting.seed)");
  site->add_option("--out", site_out, "Instance document with substations");

  // build-candidates
  auto* cand = app.add_subcommand("build-candidates", "Enumerate candidate cables and their crossings");
  cand->add_option("--config", config_path, "Run configuration document");
  std::string cand_in, cand_out = "-";
  std::optional<double> c_range;
  cand->add_option("--instance", cand_in, "Instance document")->required();
  cand->add_option("--range", c_range, "Maximum cable length in km (planning.max_range_km)");
  cand->add_option("--out", cand_out, "Candidate graph document");

  // plan
  auto* plan = app.add_subcommand("plan", "Solve the planning MILP");
  plan->add_option("--config", config_path, "Run configuration document");
  std::string plan_graph, plan_out = "-";
  std::optional<double> p_time, p_gap;
  std::optional<int> p_workers, p_segments;
  std::optional<long> p_nodes;
  std::optional<std::uint64_t> p_seed;
  bool p_forbid = false;
  plan->add_option("--graph", plan_graph, "Candidate graph document")->required();
  plan->add_option("--time-limit", p_time, "Seconds (planning.solver.time_limit_s)");
  plan->add_option("--gap", p_gap, "Relative gap tolerance (planning.solver.gap_tol)");
  plan->add_option("--workers", p_workers, "Worker threads (planning.solver.workers)");
  plan->add_option("--max-nodes", p_nodes, "Node limit (planning.solver.max_nodes)");
  plan->add_option("--seed", p_seed, "Tie-break seed (planning.solver.seed)");
  plan->add_option("--segments", p_segments, "Tangent cuts per cable (planning.pwl_segments)");
  plan->add_flag("--forbid-crossings", p_forbid, "Forbid crossing cables (planning.forbid_crossings)");
  plan->add_option("--out", plan_out, "Plan document");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Exact costs and feasibility of a plan");
  eval->add_option("--config", config_path, "Run configuration document");
  std::string eval_plan, eval_graph, eval_out = "-", eval_label;
  eval->add_option("--plan", eval_plan, "Plan document")->required();
  eval->add_option("--graph", eval_graph, "Candidate graph document")->required();
  eval->add_option("--label", eval_label, "Report label");
  eval->add_option("--out", eval_out, "Report document");

  // baseline
  auto* base = app.add_subcommand("baseline", "Conventional layouts for comparison");
  base->add_option("--config", config_path, "Run configuration document");
  std::string b_case = "string", b_instance, b_graph, b_out = "-", b_report, b_graph_out;
  std::vector<double> b_sub;
  base->add_option("--case", b_case, "string or mst")->check(CLI::IsMember({"string", "mst"}));
  base->add_option("--instance", b_instance, "Turbine grid (string case)");
  base->add_option("--graph", b_graph, "Candidate graph (mst case)");
  base->add_option("--substation", b_sub, "Substation x y in km (baseline_substation)")->expected(2);
  base->add_option("--out", b_out, "Plan document");
  base->add_option("--graph-out", b_graph_out, "Graph of the built cables (string case)");
  base->add_option("--report", b_report, "Report document");

  // compare
  auto* cmp = app.add_subcommand("compare", "Tabulate reports against the first one");
  std::vector<std::string> cmp_in;
  std::string cmp_out = "-";
  cmp->add_option("reports", cmp_in, "Report documents")->required()->expected(2, -1);
  cmp->add_option("--out", cmp_out, "Comparison document");

  // export
  auto* exp = app.add_subcommand("export", "GeoJSON, DOT or MPS output");
  exp->add_option("--config", config_path, "Run configuration document");
  std::string e_fmt, e_plan, e_graph, e_out = "-";
  exp->add_option("format", e_fmt, "geojson, dot or mps")->required()->check(CLI::IsMember({"geojson", "dot", "mps"}));
  exp->add_option("--plan", e_plan, "Plan document (geojson, dot)");
  exp->add_option("--graph", e_graph, "Candidate graph document")->required();
  exp->add_option("--out", e_out, "Output file");

  // run
  auto* run = app.add_subcommand("run", "Whole pipeline from one configuration document");
  std::string run_out;
  run->add_option("--config", config_path, "Run configuration document");
  run->add_option("--out-dir", run_out, "Artifact directory (out_dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    load_config();
    auto& pc = rc.planning;

    if (*gen) {
      if (g_rows) rc.grid.rows = *g_rows;
      if (g_cols) rc.grid.cols = *g_cols;
      if (g_rsp) rc.grid.row_spacing_km = *g_rsp;
      if (g_csp) rc.grid.col_spacing_km = *g_csp;
      if (g_pow) rc.grid.wt_power_mw = *g_pow;
      if (g_sbase) rc.base.s_base_mva = *g_sbase;
      if (g_vbase) rc.base.v_base_kv = *g_vbase;
      const auto inst = generate_grid(rc.grid.rows, rc.grid.cols, rc.grid.row_spacing_km, rc.grid.col_spacing_km,
                                      rc.grid.wt_power_mw, rc.base);
      write_text(gen_out, document_text(instance_to_json(inst)));
      return kOk;
    }

    if (*site) {
      if (s_count) rc.substations = *s_count;
      if (s_m) pc.siting.fuzzifier = *s_m;
      if (s_seed) pc.siting.seed = *s_seed;
      const auto inst = place_substations(instance_from_json(read_json_file(site_in)), rc.substations, pc.siting);
      write_text(site_out, document_text(instance_to_json(inst)));
      return kOk;
    }

    if (*cand) {
      if (c_range) pc.max_range_km = *c_range;
      auto graph = enumerate_candidates(instance_from_json(read_json_file(cand_in)), pc);
      graph.crossings = find_crossings(graph);
      std::fprintf(stderr, "candidates=%d crossings=%zu\n", graph.num_edges(), graph.crossings.size());
      write_text(cand_out, document_text(graph_to_json(graph)));
      return kOk;
    }

    if (*plan) {
      if (p_time) pc.solver.time_limit_s = *p_time;
      if (p_gap) pc.solver.gap_tol = *p_gap;
      if (p_workers) pc.solver.workers = *p_workers;
      if (p_nodes) pc.solver.max_nodes = *p_nodes;
      if (p_seed) pc.solver.seed = *p_seed;
      if (p_segments) pc.pwl_segments = *p_segments;
      if (p_forbid) pc.forbid_crossings = true;
      const auto graph = graph_from_json(read_json_file(plan_graph));
      const auto built = build_milp(graph, pc, rc.cost);
      const auto result = solve_milp(built, graph, pc, rc.cost, print_progress);
      std::fprintf(stderr, "status=%s\n", to_string(result.status));
      if (result.status == SolveStatus::Infeasible || result.status == SolveStatus::Unsolved) return kViolations;
      write_text(plan_out, document_text(plan_to_json(result.plan, &result.stats)));
      const auto violations = check_feasibility(result.plan, graph, pc);
      report_violations(violations);
      return violations.empty() ? kOk : kViolations;
    }

    if (*eval) {
      const auto doc = read_json_file(eval_plan);
      const auto graph = graph_from_json(read_json_file(eval_graph));
      Plan p = plan_from_json(doc);
      const auto violations = check_feasibility(p, graph, pc);
      report_violations(violations);
      // flows and voltages are recomputed so that hand-written plans can be costed
      Plan exact = p;
      try {
        exact = make_plan(p.edges, graph, pc, p.declared_curtailment);
      } catch (const StructureError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kViolations;
      }
      CostReport r = cost_breakdown(exact, graph, rc.cost);
      r.label = eval_label;
      if (doc.contains("stats")) r.stats = stats_from_json(doc["stats"]);
      std::fprintf(stderr, "%s\n", summary(r).c_str());
      write_text(eval_out, document_text(report_to_json(r)));
      return violations.empty() ? kOk : kViolations;
    }

    if (*base) {
      if (b_sub.size() == 2) rc.baseline_substation = Point(b_sub[0], b_sub[1]);
      Plan p;
      CandidateGraph graph;
      if (b_case == "string") {
        if (b_instance.empty()) throw InvalidArgument("--instance is required for the string case");
        auto layout = baseline_string_layout(instance_from_json(read_json_file(b_instance)), rc.baseline_substation, pc);
        graph = std::move(layout.graph);
        p = std::move(layout.plan);
        if (!b_graph_out.empty()) write_text(b_graph_out, document_text(graph_to_json(graph)));
      } else {
        if (b_graph.empty()) throw InvalidArgument("--graph is required for the mst case");
        graph = graph_from_json(read_json_file(b_graph));
        p = mst_baseline(graph, pc);
      }
      write_text(b_out, document_text(plan_to_json(p)));
      CostReport r = cost_breakdown(p, graph, rc.cost);
      r.label = b_case;
      std::fprintf(stderr, "%s\n", summary(r).c_str());
      if (!b_report.empty()) write_text(b_report, document_text(report_to_json(r)));
      const auto violations = check_feasibility(p, graph, pc);
      report_violations(violations);
      return violations.empty() ? kOk : kViolations;
    }

    if (*cmp) {
      std::vector<CostReport> reports;
      for (const auto& path : cmp_in) reports.push_back(report_from_json(read_json_file(path)));
      const auto doc = compare_reports(reports);
      if (!doc["warning"].is_null()) std::fprintf(stderr, "warning: %s\n", doc["warning"].get<std::string>().c_str());
      write_text(cmp_out, document_text(doc));
      return kOk;
    }

    if (*exp) {
      const auto graph = graph_from_json(read_json_file(e_graph));
      if (e_fmt == "mps") {
        write_text(e_out, export_mps(build_milp(graph, pc, rc.cost).model));
        return kOk;
      }
      if (e_plan.empty()) throw InvalidArgument("--plan is required for " + e_fmt);
      const Plan p = plan_from_json(read_json_file(e_plan));
      write_text(e_out, e_fmt == "geojson" ? document_text(export_geojson(p, graph)) : export_dot(p, graph));
      return kOk;
    }

    if (*run) {
      if (!run_out.empty()) rc.out_dir = run_out;
      const auto outcome = run_pipeline(rc, print_progress);
      std::fprintf(stderr, "status=%s %s\n", to_string(outcome.solve.status), summary(outcome.report).c_str());
      report_violations(outcome.violations);
      if (outcome.solve.status == SolveStatus::Infeasible) return kViolations;
      return outcome.violations.empty() ? kOk : kViolations;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kError;
  }
  return kOk;
}
