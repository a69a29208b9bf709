#pragma once

#include <Eigen/SparseCore>

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "owf/candidates.hpp"
#include "owf/farm.hpp"

namespace owf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };

struct Column {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  bool integer = false;
  double cost = 0.0;

  bool is_binary() const { return integer && lower >= 0.0 && upper <= 1.0; }
  bool operator==(const Column&) const = default;
};

struct Row {
  std::string name;
  std::vector<std::pair<int, double>> coefs;  // sorted by column, no zeros
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;

  bool operator==(const Row&) const = default;
};

/// Minimisation MILP in row form.
class MilpModel {
 public:
  std::string name = "OWFECS";
  std::vector<Column> columns;
  std::vector<Row> rows;

  int add_column(Column col);
  /// Coefficients are sorted and merged; exact zeros are dropped.
  int add_row(std::string name, std::vector<std::pair<int, double>> coefs, RowSense sense, double rhs);

  int num_columns() const { return static_cast<int>(columns.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  std::size_t num_nonzeros() const;

  /// rows x columns constraint matrix.
  Eigen::SparseMatrix<double> matrix() const;

  /// Empty iff every coefficient references a column and binaries are boxed in [0,1].
  std::vector<std::string> check() const;

  double objective(std::span<const double> values) const;
  double row_activity(int row, std::span<const double> values) const;
  double max_row_violation(std::span<const double> values) const;
  double max_bound_violation(std::span<const double> values) const;

  bool operator==(const MilpModel&) const = default;
};

/// Column indices of every model variable. Per-edge vectors are indexed by
/// candidate id, per-node vectors by node id (-1 where a variable does not exist).
struct VarMap {
  std::vector<int> x;        // build decision
  std::vector<int> beta_ij;  // smaller-id endpoint is the parent
  std::vector<int> beta_ji;  // larger-id endpoint is the parent
  std::vector<int> f_plus;   // flow i -> j
  std::vector<int> f_minus;  // flow j -> i
  std::vector<int> loss;     // epigraph ell (TangentRows only)
  std::vector<std::vector<int>> loss_pieces;  // envelope pieces (Segments only)
  std::vector<std::vector<double>> loss_piece_slopes;
  std::vector<int> voltage;
  std::vector<int> curtail;

  int edge_count_row = -1;
  std::vector<int> kcl_row;     // per node, -1 for substations
  std::vector<int> parent_row;  // per node, -1 for substations

  /// Signed flow on edge e, positive from the smaller-id endpoint to the larger.
  double flow(std::span<const double> values, int e) const;
  /// Linearised loss term (p.u.^2) carried by the model on edge e.
  double envelope_loss(std::span<const double> values, int e) const;

  std::vector<int> x_columns() const { return x; }
  std::vector<int> beta_columns() const;
};

struct BuiltModel {
  MilpModel model;
  VarMap vars;
};

/// Node x edge matrix: +1 at the smaller-id endpoint, -1 at the larger.
Eigen::SparseMatrix<double> incidence_matrix(const CandidateGraph& graph);

/// Planning MILP on the candidate graph, all quantities in p.u. and million CNY.
BuiltModel build_milp(const CandidateGraph& graph, const PlanningConfig& config, const CostModel& cost);

/// Big-M used by the KVL disjunction of an edge.
double kvl_big_m(const CandidateCable& edge, const PlanningConfig& config);

}  // namespace owf
