#include "owf/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "owf/mps.hpp"
#include "owf/siting.hpp"

namespace owf {

std::uint64_t derive_seed(std::uint64_t seed, const std::string& stage) {
  // splitmix64 over the seed folded with an FNV-1a hash of the stage name
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : stage) h = (h ^ ch) * 1099511628211ull;
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Json run_config_to_json(const RunConfig& c) {
  return {{"grid",
           {{"rows", c.grid.rows},
            {"cols", c.grid.cols},
            {"row_spacing_km", c.grid.row_spacing_km},
            {"col_spacing_km", c.grid.col_spacing_km},
            {"wt_power_mw", c.grid.wt_power_mw}}},
          {"base", {{"s_base_mva", c.base.s_base_mva}, {"v_base_kv", c.base.v_base_kv}}},
          {"instance_path", c.instance_path},
          {"substations", c.substations},
          {"baseline_substation", {c.baseline_substation.x(), c.baseline_substation.y()}},
          {"planning", planning_to_json(c.planning)},
          {"cost", cost_to_json(c.cost)},
          {"seed", c.seed},
          {"out_dir", c.out_dir},
          {"write_mps", c.write_mps}};
}

RunConfig run_config_from_json(const Json& doc) {
  RunConfig c;
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    c.grid.rows = g.value("rows", c.grid.rows);
    c.grid.cols = g.value("cols", c.grid.cols);
    c.grid.row_spacing_km = g.value("row_spacing_km", c.grid.row_spacing_km);
    c.grid.col_spacing_km = g.value("col_spacing_km", c.grid.col_spacing_km);
    c.grid.wt_power_mw = g.value("wt_power_mw", c.grid.wt_power_mw);
  }
  if (doc.contains("base")) {
    c.base.s_base_mva = doc["base"].value("s_base_mva", c.base.s_base_mva);
    c.base.v_base_kv = doc["base"].value("v_base_kv", c.base.v_base_kv);
  }
  c.instance_path = doc.value("instance_path", c.instance_path);
  c.substations = doc.value("substations", c.substations);
  if (doc.contains("baseline_substation"))
    c.baseline_substation = Point(doc["baseline_substation"].at(0).get<double>(), doc["baseline_substation"].at(1).get<double>());
  if (doc.contains("planning")) c.planning = planning_from_json(doc["planning"]);
  if (doc.contains("cost")) c.cost = cost_from_json(doc["cost"]);
  c.seed = doc.value("seed", c.seed);
  c.out_dir = doc.value("out_dir", c.out_dir);
  c.write_mps = doc.value("write_mps", c.write_mps);
  return c;
}

Json manifest_to_json(const RunManifest& m) {
  Json timings = Json::array();
  for (const auto& t : m.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  Json doc = {{"config", m.config},   {"digests", m.digests},     {"version", m.version},
              {"timings", timings},   {"seed", m.seed},           {"sub_seeds", m.sub_seeds}};
  if (!m.failed_stage.empty()) {
    doc["partial"] = true;
    doc["failed_stage"] = m.failed_stage;
  }
  return doc;
}

RunManifest manifest_from_json(const Json& doc) {
  RunManifest m;
  m.config = doc.value("config", Json::object());
  m.digests = doc.value("digests", std::map<std::string, std::string>{});
  m.version = doc.value("version", m.version);
  for (const auto& t : doc.value("timings", Json::array()))
    m.timings.push_back({t.at("stage").get<std::string>(), t.at("seconds").get<double>()});
  m.seed = doc.value("seed", m.seed);
  m.sub_seeds = doc.value("sub_seeds", std::map<std::string, std::uint64_t>{});
  m.failed_stage = doc.value("failed_stage", std::string{});
  return m;
}

std::string document_text(const Json& doc) { return doc.dump(2) + "\n"; }

namespace {

class Recorder {
 public:
  Recorder(RunManifest& manifest, std::filesystem::path dir) : m_(manifest), dir_(std::move(dir)) {}

  template <typename F>
  auto stage(const std::string& name, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        done(name, t0);
      } else {
        auto out = body();
        done(name, t0);
        return out;
      }
    } catch (const std::exception& e) {
      m_.failed_stage = name;
      write("manifest.json", manifest_to_json(m_), false);
      throw StageError(name, e.what());
    }
  }

  void write(const std::string& file, const Json& doc, bool digest = true) {
    const std::string text = document_text(doc);
    std::ofstream out(dir_ / file);
    if (!out) throw InvalidArgument("cannot write " + (dir_ / file).string());
    out << text;
    if (digest) m_.digests[file] = sha256_hex(text);
  }

  void write_text(const std::string& file, const std::string& text) {
    std::ofstream out(dir_ / file);
    if (!out) throw InvalidArgument("cannot write " + (dir_ / file).string());
    out << text;
    m_.digests[file] = sha256_hex(text);
  }

 private:
  void done(const std::string& name, std::chrono::steady_clock::time_point t0) {
    m_.timings.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  }

  RunManifest& m_;
  std::filesystem::path dir_;
};

}  // namespace

RunOutcome run_pipeline(const RunConfig& input, const ProgressCallback& progress) {
  RunConfig config = input;
  RunOutcome out;
  auto& manifest = out.manifest;
  manifest.seed = config.seed;
  manifest.sub_seeds["siting"] = config.planning.siting.seed = derive_seed(config.seed, "siting");
  manifest.sub_seeds["solver"] = config.planning.solver.seed = derive_seed(config.seed, "solver");
  manifest.config = run_config_to_json(config);

  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  Recorder rec(manifest, dir);

  out.instance = rec.stage("load", [&] {
    config.planning.validate();
    config.cost.validate(config.base);
    if (!config.instance_path.empty()) {
      const std::string text = [&] {
        std::ifstream in(config.instance_path);
        if (!in) throw InvalidArgument("cannot open " + config.instance_path);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
      }();
      manifest.digests["input_instance"] = sha256_hex(text);
      return instance_from_json(Json::parse(text));
    }
    return generate_grid(config.grid.rows, config.grid.cols, config.grid.row_spacing_km, config.grid.col_spacing_km,
                         config.grid.wt_power_mw, config.base);
  });
  out.instance = rec.stage("site", [&] {
    if (out.instance.num_substations() > 0) return out.instance;
    return place_substations(out.instance, config.substations, config.planning.siting);
  });
  rec.write("instance.json", instance_to_json(out.instance));

  out.graph = rec.stage("candidates", [&] { return enumerate_candidates(out.instance, config.planning); });
  rec.stage("crossings", [&] { out.graph.crossings = find_crossings(out.graph); });
  rec.write("graph.json", graph_to_json(out.graph));

  const BuiltModel built = rec.stage("build", [&] { return build_milp(out.graph, config.planning, config.cost); });
  if (config.write_mps) rec.write_text("model.mps", export_mps(built.model));

  out.solve = rec.stage("solve", [&] {
    SolveResult r = solve_milp(built, out.graph, config.planning, config.cost, progress);
    if (r.plan.empty() && out.instance.num_turbines() > 0)
      throw std::runtime_error(std::string("no feasible plan (") + to_string(r.status) + ")");
    return r;
  });
  rec.write("plan.json", plan_to_json(out.solve.plan, &out.solve.stats));

  rec.stage("evaluate", [&] {
    out.violations = check_feasibility(out.solve.plan, out.graph, config.planning);
    out.report = cost_breakdown(out.solve.plan, out.graph, config.cost);
    out.report.label = "planned";
    out.report.stats = out.solve.stats;
  });
  rec.write("report.json", report_to_json(out.report));
  rec.write("manifest.json", manifest_to_json(manifest), false);
  return out;
}

Json export_geojson(const Plan& plan, const CandidateGraph& graph) {
  const auto& inst = graph.instance;
  Json features = Json::array();
  for (const auto& n : inst.nodes)
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {n.coord.x(), n.coord.y()}}}},
                        {"properties",
                         {{"id", n.id}, {"kind", n.is_substation() ? "substation" : "turbine"}, {"gen_mw", n.gen_mw}}}});
  for (std::size_t k = 0; k < plan.edges.size(); ++k) {
    const auto& e = graph.edge(plan.edges[k]);
    const double f = k < plan.flows.size() ? plan.flows[k] : 0.0;
    const auto& a = inst.node(e.i).coord;
    const auto& b = inst.node(e.j).coord;
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", {{a.x(), a.y()}, {b.x(), b.y()}}}}},
                        {"properties",
                         {{"edge", e.id},
                          {"from", e.i},
                          {"to", e.j},
                          {"flow_mw", power_from_pu(std::abs(f), inst.base)},
                          {"loss_mw", power_from_pu(e.resistance * f * f, inst.base)},
                          {"length_km", e.length_km}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

std::string export_dot(const Plan& plan, const CandidateGraph& graph) {
  std::ostringstream out;
  out << "graph ecs {\n";
  for (const auto& n : graph.instance.nodes)
    out << "  " << n.id << " [label=\"" << n.id << "\"" << (n.is_substation() ? ", shape=box" : "") << "];\n";
  for (std::size_t k = 0; k < plan.edges.size(); ++k) {
    const auto& e = graph.edge(plan.edges[k]);
    const double f = k < plan.flows.size() ? plan.flows[k] : 0.0;
    out << "  " << e.i << " -- " << e.j << " [label=\"" << power_from_pu(std::abs(f), graph.instance.base)
        << " MW\"];\n";
  }
  out << "}\n";
  return out.str();
}

Json compare_reports(const std::vector<CostReport>& reports) {
  if (reports.size() < 2) throw InvalidArgument("comparison needs at least two reports");
  struct Metric {
    const char* name;
    double (*get)(const CostReport&);
  };
  static const Metric metrics[] = {
      {"investment", [](const CostReport& r) { return r.investment; }},
      {"operation", [](const CostReport& r) { return r.operation; }},
      {"total", [](const CostReport& r) { return r.total; }},
      {"cable_length", [](const CostReport& r) { return r.cable_length; }},
      {"loss_rate", [](const CostReport& r) { return r.loss_rate; }},
      {"wall_time", [](const CostReport& r) { return r.stats ? r.stats->wall_time : 0.0; }},
      {"gap", [](const CostReport& r) { return r.stats ? r.stats->gap : 0.0; }},
      {"candidate_count", [](const CostReport& r) { return static_cast<double>(r.candidate_count); }},
  };
  Json labels = Json::array();
  for (std::size_t k = 0; k < reports.size(); ++k)
    labels.push_back(reports[k].label.empty() ? "report " + std::to_string(k) : reports[k].label);
  Json rows = Json::array();
  for (const auto& m : metrics) {
    Json values = Json::array(), deltas = Json::array();
    const double ref = m.get(reports.front());
    for (const auto& r : reports) {
      const double v = m.get(r);
      values.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
      if (!std::isfinite(v) || !std::isfinite(ref)) deltas.push_back(nullptr);
      else if (ref == 0.0) deltas.push_back(v == 0.0 ? Json(0.0) : Json(nullptr));
      else deltas.push_back(100.0 * (v - ref) / ref);
    }
    rows.push_back({{"metric", m.name}, {"values", values}, {"delta_pct", deltas}});
  }
  Json doc = {{"labels", labels}, {"rows", rows}, {"warning", nullptr}};
  for (const auto& r : reports)
    if (r.farm != reports.front().farm) {
      doc["warning"] = "reports describe different wind farms";
      break;
    }
  return doc;
}

}  // namespace owf
