#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "owf/error.hpp"

namespace owf {

/// Planar position in kilometres.
using Point = Eigen::Vector2d;

enum class NodeKind { WindTurbine, Substation };

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::WindTurbine;
  Point coord = Point::Zero();
  double gen_mw = 0.0;  // rated output; zero for substations

  bool is_substation() const { return kind == NodeKind::Substation; }
};

struct PerUnitBase {
  double s_base_mva = 100.0;
  double v_base_kv = 66.0;

  bool valid() const { return s_base_mva > 0.0 && v_base_kv > 0.0; }
};

struct WindFarmInstance {
  std::vector<Node> nodes;
  PerUnitBase base;

  int size() const { return static_cast<int>(nodes.size()); }
  int num_substations() const;
  int num_turbines() const { return size() - num_substations(); }
  std::vector<int> turbine_ids() const;
  std::vector<int> substation_ids() const;
  double total_generation_mw() const;
  const Node& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
};

// --- per-unit conversions -------------------------------------------------

template <typename Scalar>
Scalar power_to_pu(Scalar mw, const PerUnitBase& base) {
  return mw / static_cast<Scalar>(base.s_base_mva);
}

template <typename Scalar>
Scalar power_from_pu(Scalar pu, const PerUnitBase& base) {
  return pu * static_cast<Scalar>(base.s_base_mva);
}

/// Z_base = V_base^2 / S_base, so R_pu = R_ohm * S_base / V_base^2.
template <typename Scalar>
Scalar resistance_to_pu(Scalar ohm_per_km, Scalar length_km, const PerUnitBase& base) {
  const auto v = static_cast<Scalar>(base.v_base_kv);
  return ohm_per_km * length_km * static_cast<Scalar>(base.s_base_mva) / (v * v);
}

template <typename Scalar>
Scalar resistance_from_pu(Scalar pu, const PerUnitBase& base) {
  const auto v = static_cast<Scalar>(base.v_base_kv);
  return pu * v * v / static_cast<Scalar>(base.s_base_mva);
}

// --- configuration --------------------------------------------------------

struct CableType {
  double cost_per_km = 4.0;             // million CNY per km
  double resistance_ohm_per_km = 0.0241;
  double capacity_mw = 80.0;
};

struct FcmParams {
  double fuzzifier = 2.0;
  double tol_km = 1e-6;
  int max_iter = 300;
  std::uint64_t seed = 7;
  bool weight_by_generation = false;
};

enum class LossForm {
  Segments,     // incremental segment columns reproducing the tangent envelope
  TangentRows,  // one ell >= slope*|f| + intercept row per tangent
};

struct SolverParams {
  double time_limit_s = 900.0;
  double gap_tol = 1e-4;
  long max_nodes = 1'000'000;
  int workers = 1;
  std::uint64_t seed = 7;
  double integrality_tol = 1e-6;
  double progress_interval_s = 5.0;
};

struct PlanningConfig {
  double max_range_km = 2.0;
  std::vector<CableType> cable_types{CableType{}};
  double v_lo = 0.95;
  double v_hi = 1.05;
  double v_ref = 1.0;
  int pwl_segments = 16;
  LossForm loss_form = LossForm::Segments;
  bool forbid_crossings = false;
  /// Substation-incident cables injected regardless of range, as (substation, turbine).
  std::vector<std::pair<int, int>> substation_links;
  FcmParams siting;
  SolverParams solver;

  /// Throws InvalidArgument on the first broken invariant.
  void validate() const;
};

struct CostModel {
  double energy_price = 0.8513;   // CNY per kWh
  double eta_hours = 50'000.0;    // planning years x yearly full-load hours
  double curtail_penalty = 1e5;   // million CNY per p.u. of curtailed power

  /// Lifetime value of one p.u. of loss, in million CNY.
  double loss_value_per_pu(const PerUnitBase& base) const {
    return eta_hours * energy_price * base.s_base_mva * 1000.0 / 1e6;
  }
  void validate(const PerUnitBase& base) const;
};

// --- operations -----------------------------------------------------------

/// rows x cols turbines at (col*col_spacing, row*row_spacing), ids row-major.
WindFarmInstance generate_grid(int rows, int cols, double row_spacing_km,
                               double col_spacing_km, double wt_power_mw,
                               PerUnitBase base = {});

struct Violation {
  int node = -1;
  int other = -1;
  std::string rule;
};

std::vector<Violation> validate_instance(const WindFarmInstance& instance);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Content digest of the turbine layout only (ids, positions, ratings).
std::string farm_digest(const WindFarmInstance& instance);

}  // namespace owf
