#include "owf/farm.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace owf {

int WindFarmInstance::num_substations() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(),
                                        [](const Node& n) { return n.is_substation(); }));
}

std::vector<int> WindFarmInstance::turbine_ids() const {
  std::vector<int> ids;
  for (const auto& n : nodes)
    if (!n.is_substation()) ids.push_back(n.id);
  return ids;
}

std::vector<int> WindFarmInstance::substation_ids() const {
  std::vector<int> ids;
  for (const auto& n : nodes)
    if (n.is_substation()) ids.push_back(n.id);
  return ids;
}

double WindFarmInstance::total_generation_mw() const {
  double total = 0.0;
  for (const auto& n : nodes) total += n.gen_mw;
  return total;
}

void PlanningConfig::validate() const {
  if (!(max_range_km > 0.0)) throw InvalidArgument("max_range_km must be positive");
  if (cable_types.empty()) throw InvalidArgument("at least one cable type is required");
  for (const auto& t : cable_types) {
    if (!(t.cost_per_km > 0.0 && t.resistance_ohm_per_km > 0.0 && t.capacity_mw > 0.0))
      throw InvalidArgument("cable types need positive cost, resistance and capacity");
  }
  if (!(0.0 < v_lo && v_lo < v_ref && v_ref <= v_hi))
    throw InvalidArgument("voltage bounds must satisfy 0 < v_lo < v_ref <= v_hi");
  if (pwl_segments < 1) throw InvalidArgument("pwl_segments must be >= 1");
  if (!(siting.fuzzifier > 1.0)) throw InvalidArgument("fuzzifier must exceed 1");
  if (solver.workers < 1) throw InvalidArgument("workers must be >= 1");
  if (solver.gap_tol < 0.0) throw InvalidArgument("gap_tol must be non-negative");
}

void CostModel::validate(const PerUnitBase& base) const {
  // eta_hours = 0 switches losses off
  if (!(energy_price > 0.0 && eta_hours >= 0.0 && curtail_penalty > 0.0))
    throw InvalidArgument("cost model entries must be positive");
  if (!(curtail_penalty > loss_value_per_pu(base)))
    throw InvalidArgument("curtail_penalty must exceed the lifetime value of a p.u. of loss");
}

WindFarmInstance generate_grid(int rows, int cols, double row_spacing_km, double col_spacing_km,
                               double wt_power_mw, PerUnitBase base) {
  if (rows < 1 || cols < 1) throw InvalidArgument("grid needs at least one row and column");
  if (!(row_spacing_km > 0.0 && col_spacing_km > 0.0))
    throw InvalidArgument("grid spacings must be positive");
  if (!(wt_power_mw > 0.0)) throw InvalidArgument("turbine rating must be positive");
  if (!base.valid()) throw InvalidArgument("per-unit bases must be positive");

  WindFarmInstance farm;
  farm.base = base;
  farm.nodes.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Node n;
      n.id = static_cast<int>(farm.nodes.size());
      n.kind = NodeKind::WindTurbine;
      n.coord = Point(c * col_spacing_km, r * row_spacing_km);
      n.gen_mw = wt_power_mw;
      farm.nodes.push_back(n);
    }
  }
  return farm;
}

std::vector<Violation> validate_instance(const WindFarmInstance& instance) {
  std::vector<Violation> out;
  if (!instance.base.valid()) out.push_back({-1, -1, "per-unit bases must be positive"});

  bool has_sub = false, has_wt = false;
  for (std::size_t k = 0; k < instance.nodes.size(); ++k) {
    const Node& n = instance.nodes[k];
    if (n.id != static_cast<int>(k))
      out.push_back({n.id, -1, "ids must be contiguous from 0 (expected " + std::to_string(k) + ")"});
    if (n.gen_mw < 0.0 || !std::isfinite(n.gen_mw))
      out.push_back({n.id, -1, "generation must be finite and non-negative"});
    if (n.is_substation()) {
      has_sub = true;
      if (n.gen_mw != 0.0) out.push_back({n.id, -1, "substation must have zero generation"});
    } else {
      has_wt = true;
      if (n.gen_mw == 0.0) out.push_back({n.id, -1, "wind turbine must have positive generation"});
    }
  }
  if (!has_sub) out.push_back({-1, -1, "instance needs at least one substation"});
  if (!has_wt) out.push_back({-1, -1, "instance needs at least one wind turbine"});

  std::map<std::pair<double, double>, int> seen;
  for (const auto& n : instance.nodes) {
    auto [it, fresh] = seen.emplace(std::make_pair(n.coord.x(), n.coord.y()), n.id);
    if (!fresh) out.push_back({it->second, n.id, "nodes share identical coordinates"});
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int k = 0; k < len; ++k) {
    std::snprintf(buf, sizeof buf, "%02x", md[k]);
    hex += buf;
  }
  return hex;
}

std::string farm_digest(const WindFarmInstance& instance) {
  std::string text;
  char buf[96];
  for (const auto& n : instance.nodes) {
    if (n.is_substation()) continue;
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g\n", n.id, n.coord.x(), n.coord.y(), n.gen_mw);
    text += buf;
  }
  return sha256_hex(text).substr(0, 16);
}

}  // namespace owf
