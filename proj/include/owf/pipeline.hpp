#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "owf/branch_and_bound.hpp"
#include "owf/evaluate.hpp"
#include "owf/json_io.hpp"

namespace owf {

inline constexpr const char* kToolVersion = "0.1.0";

struct GridSpec {
  int rows = 7;
  int cols = 9;
  double row_spacing_km = 1.0;
  double col_spacing_km = 1.3;
  double wt_power_mw = 8.0;
};

/// One document drives a whole run.
struct RunConfig {
  GridSpec grid;
  PerUnitBase base;
  std::string instance_path;  // used instead of `grid` when set
  int substations = 1;        // sited by FCM unless the instance already has some
  Point baseline_substation{11.05, 0.0};
  PlanningConfig planning;
  CostModel cost;
  std::uint64_t seed = 7;
  std::string out_dir = "owf-run";
  bool write_mps = false;
};

Json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& doc);

/// Stage seeds are derived from the manifest seed so that one number fixes a run.
std::uint64_t derive_seed(std::uint64_t seed, const std::string& stage);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  Json config;
  std::map<std::string, std::string> digests;  // artifact -> SHA-256 of its text
  std::string version = kToolVersion;
  std::vector<StageTiming> timings;
  std::uint64_t seed = 0;
  std::map<std::string, std::uint64_t> sub_seeds;
  std::string failed_stage;  // empty on success
};

Json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const Json& doc);

struct RunOutcome {
  WindFarmInstance instance;
  CandidateGraph graph;
  SolveResult solve;
  CostReport report;
  std::vector<PlanViolation> violations;
  RunManifest manifest;
};

/// A stage failed; artifacts written so far stay on disk and the manifest names the stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause)
      : std::runtime_error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Site, enumerate, find crossings, build, solve, evaluate; writes instance,
/// graph, plan, report and manifest documents into config.out_dir.
RunOutcome run_pipeline(const RunConfig& config, const ProgressCallback& progress = {});

/// Points per node and one line per chosen cable, coordinates in km.
Json export_geojson(const Plan& plan, const CandidateGraph& graph);

std::string export_dot(const Plan& plan, const CandidateGraph& graph);

/// Table of the reports with percentage deltas against the first one.
Json compare_reports(const std::vector<CostReport>& reports);

/// Text of a JSON document as written to disk.
std::string document_text(const Json& doc);

}  // namespace owf
