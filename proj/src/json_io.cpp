#include "owf/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace owf {
namespace {

const Json& need(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw InvalidArgument(std::string("missing key \"") + key + "\"");
  return doc.at(key);
}

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double num_from(const Json& v, double when_null = std::numeric_limits<double>::infinity()) {
  return v.is_null() ? when_null : v.get<double>();
}

template <typename T>
void opt(const Json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

const char* kind_name(NodeKind k) { return k == NodeKind::Substation ? "substation" : "turbine"; }

NodeKind kind_from(const std::string& s) {
  if (s == "substation") return NodeKind::Substation;
  if (s == "turbine") return NodeKind::WindTurbine;
  throw InvalidArgument("unknown node kind \"" + s + "\"");
}

}  // namespace

Json instance_to_json(const WindFarmInstance& instance) {
  Json nodes = Json::array();
  for (const auto& n : instance.nodes)
    nodes.push_back({{"id", n.id}, {"kind", kind_name(n.kind)}, {"x_km", n.coord.x()}, {"y_km", n.coord.y()},
                     {"gen_mw", n.gen_mw}});
  return {{"nodes", nodes}, {"base", {{"s_base_mva", instance.base.s_base_mva}, {"v_base_kv", instance.base.v_base_kv}}}};
}

WindFarmInstance instance_from_json(const Json& doc) {
  WindFarmInstance inst;
  for (const auto& n : need(doc, "nodes")) {
    Node node;
    node.id = need(n, "id").get<int>();
    node.kind = kind_from(need(n, "kind").get<std::string>());
    node.coord = Point(need(n, "x_km").get<double>(), need(n, "y_km").get<double>());
    node.gen_mw = n.value("gen_mw", 0.0);
    inst.nodes.push_back(node);
  }
  if (doc.contains("base")) {
    opt(doc["base"], "s_base_mva", inst.base.s_base_mva);
    opt(doc["base"], "v_base_kv", inst.base.v_base_kv);
  }
  for (std::size_t k = 0; k < inst.nodes.size(); ++k)
    if (inst.nodes[k].id != static_cast<int>(k)) throw InvalidArgument("node ids must be 0..n-1 in order");
  return inst;
}

Json graph_to_json(const CandidateGraph& graph) {
  Json edges = Json::array();
  for (const auto& e : graph.edges)
    edges.push_back({{"id", e.id}, {"i", e.i}, {"j", e.j}, {"length_km", e.length_km}, {"type_index", e.type_index},
                     {"cost", e.cost}, {"resistance_pu", e.resistance}, {"capacity_pu", e.capacity}});
  Json crossings = Json::array();
  for (auto [a, b] : graph.crossings) crossings.push_back({a, b});
  return {{"instance", instance_to_json(graph.instance)}, {"edges", edges}, {"crossings", crossings}};
}

CandidateGraph graph_from_json(const Json& doc) {
  CandidateGraph g;
  g.instance = instance_from_json(need(doc, "instance"));
  for (const auto& e : need(doc, "edges")) {
    CandidateCable c;
    c.id = need(e, "id").get<int>();
    c.i = need(e, "i").get<int>();
    c.j = need(e, "j").get<int>();
    c.length_km = need(e, "length_km").get<double>();
    c.type_index = e.value("type_index", 0);
    c.cost = need(e, "cost").get<double>();
    c.resistance = need(e, "resistance_pu").get<double>();
    c.capacity = need(e, "capacity_pu").get<double>();
    if (c.id != g.num_edges()) throw InvalidArgument("edge ids must be 0..m-1 in order");
    if (c.i < 0 || c.j >= g.instance.size() || c.i >= c.j) throw InvalidArgument("bad endpoints on edge " + std::to_string(c.id));
    g.edges.push_back(c);
  }
  if (doc.contains("crossings"))
    for (const auto& p : doc["crossings"]) g.crossings.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  g.index();
  return g;
}

Json stats_to_json(const SolveStats& s) {
  return {{"incumbent", num(s.incumbent)}, {"bound", num(s.bound)},     {"gap", num(s.gap)},
          {"nodes_explored", s.nodes_explored}, {"wall_time", s.wall_time}, {"lp_iterations", s.lp_iterations},
          {"status", s.status}};
}

SolveStats stats_from_json(const Json& doc) {
  SolveStats s;
  s.incumbent = num_from(doc.value("incumbent", Json(nullptr)));
  s.bound = num_from(doc.value("bound", Json(nullptr)), -std::numeric_limits<double>::infinity());
  s.gap = num_from(doc.value("gap", Json(nullptr)));
  opt(doc, "nodes_explored", s.nodes_explored);
  opt(doc, "wall_time", s.wall_time);
  opt(doc, "lp_iterations", s.lp_iterations);
  opt(doc, "status", s.status);
  return s;
}

Json plan_to_json(const Plan& plan, const SolveStats* stats) {
  Json doc = {{"edges", plan.edges},
              {"parent", plan.parent},
              {"flows_pu", plan.flows},
              {"voltages_pu", plan.voltages},
              {"curtailment_pu", plan.curtailment},
              {"declared_curtailment", plan.declared_curtailment}};
  if (stats) doc["stats"] = stats_to_json(*stats);
  return doc;
}

Plan plan_from_json(const Json& doc) {
  Plan p;
  p.edges = need(doc, "edges").get<std::vector<int>>();
  opt(doc, "parent", p.parent);
  opt(doc, "flows_pu", p.flows);
  opt(doc, "voltages_pu", p.voltages);
  opt(doc, "curtailment_pu", p.curtailment);
  opt(doc, "declared_curtailment", p.declared_curtailment);
  return p;
}

Json report_to_json(const CostReport& r) {
  Json doc = {{"label", r.label},
              {"farm", r.farm},
              {"investment", r.investment},
              {"operation", r.operation},
              {"curtailment_value", r.curtailment_value},
              {"total", r.total},
              {"cable_length", r.cable_length},
              {"loss_rate", r.loss_rate},
              {"loss_mw", r.loss_mw},
              {"generation_mw", r.generation_mw},
              {"cables", r.cables},
              {"candidate_count", r.candidate_count}};
  if (r.stats) doc["stats"] = stats_to_json(*r.stats);
  return doc;
}

CostReport report_from_json(const Json& doc) {
  CostReport r;
  opt(doc, "label", r.label);
  opt(doc, "farm", r.farm);
  r.investment = need(doc, "investment").get<double>();
  r.operation = need(doc, "operation").get<double>();
  opt(doc, "curtailment_value", r.curtailment_value);
  r.total = need(doc, "total").get<double>();
  opt(doc, "cable_length", r.cable_length);
  opt(doc, "loss_rate", r.loss_rate);
  opt(doc, "loss_mw", r.loss_mw);
  opt(doc, "generation_mw", r.generation_mw);
  opt(doc, "cables", r.cables);
  opt(doc, "candidate_count", r.candidate_count);
  if (doc.contains("stats")) r.stats = stats_from_json(doc["stats"]);
  return r;
}

Json planning_to_json(const PlanningConfig& c) {
  Json types = Json::array();
  for (const auto& t : c.cable_types)
    types.push_back({{"cost_per_km", t.cost_per_km},
                     {"resistance_ohm_per_km", t.resistance_ohm_per_km},
                     {"capacity_mw", t.capacity_mw}});
  Json links = Json::array();
  for (auto [s, t] : c.substation_links) links.push_back({s, t});
  return {{"max_range_km", c.max_range_km},
          {"cable_types", types},
          {"v_lo", c.v_lo},
          {"v_hi", c.v_hi},
          {"v_ref", c.v_ref},
          {"pwl_segments", c.pwl_segments},
          {"loss_form", c.loss_form == LossForm::Segments ? "segments" : "tangent_rows"},
          {"forbid_crossings", c.forbid_crossings},
          {"substation_links", links},
          {"siting",
           {{"fuzzifier", c.siting.fuzzifier},
            {"tol_km", c.siting.tol_km},
            {"max_iter", c.siting.max_iter},
            {"seed", c.siting.seed},
            {"weight_by_generation", c.siting.weight_by_generation}}},
          {"solver",
           {{"time_limit_s", c.solver.time_limit_s},
            {"gap_tol", c.solver.gap_tol},
            {"max_nodes", c.solver.max_nodes},
            {"workers", c.solver.workers},
            {"seed", c.solver.seed},
            {"integrality_tol", c.solver.integrality_tol},
            {"progress_interval_s", c.solver.progress_interval_s}}}};
}

PlanningConfig planning_from_json(const Json& doc) {
  PlanningConfig c;
  opt(doc, "max_range_km", c.max_range_km);
  if (doc.contains("cable_types")) {
    c.cable_types.clear();
    for (const auto& t : doc["cable_types"]) {
      CableType type;
      opt(t, "cost_per_km", type.cost_per_km);
      opt(t, "resistance_ohm_per_km", type.resistance_ohm_per_km);
      opt(t, "capacity_mw", type.capacity_mw);
      c.cable_types.push_back(type);
    }
  }
  opt(doc, "v_lo", c.v_lo);
  opt(doc, "v_hi", c.v_hi);
  opt(doc, "v_ref", c.v_ref);
  opt(doc, "pwl_segments", c.pwl_segments);
  if (doc.contains("loss_form")) {
    const auto s = doc["loss_form"].get<std::string>();
    if (s == "segments") c.loss_form = LossForm::Segments;
    else if (s == "tangent_rows") c.loss_form = LossForm::TangentRows;
    else throw InvalidArgument("unknown loss_form \"" + s + "\"");
  }
  opt(doc, "forbid_crossings", c.forbid_crossings);
  if (doc.contains("substation_links"))
    for (const auto& p : doc["substation_links"]) c.substation_links.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  if (doc.contains("siting")) {
    const auto& s = doc["siting"];
    opt(s, "fuzzifier", c.siting.fuzzifier);
    opt(s, "tol_km", c.siting.tol_km);
    opt(s, "max_iter", c.siting.max_iter);
    opt(s, "seed", c.siting.seed);
    opt(s, "weight_by_generation", c.siting.weight_by_generation);
  }
  if (doc.contains("solver")) {
    const auto& s = doc["solver"];
    opt(s, "time_limit_s", c.solver.time_limit_s);
    opt(s, "gap_tol", c.solver.gap_tol);
    opt(s, "max_nodes", c.solver.max_nodes);
    opt(s, "workers", c.solver.workers);
    opt(s, "seed", c.solver.seed);
    opt(s, "integrality_tol", c.solver.integrality_tol);
    opt(s, "progress_interval_s", c.solver.progress_interval_s);
  }
  return c;
}

Json cost_to_json(const CostModel& cost) {
  return {{"energy_price", cost.energy_price}, {"eta_hours", cost.eta_hours}, {"curtail_penalty", cost.curtail_penalty}};
}

CostModel cost_from_json(const Json& doc) {
  CostModel cost;
  opt(doc, "energy_price", cost.energy_price);
  opt(doc, "eta_hours", cost.eta_hours);
  opt(doc, "curtail_penalty", cost.curtail_penalty);
  return cost;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace owf
