#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <chrono>
#include <cstdint>
#include <vector>

#include "owf/milp.hpp"

namespace owf {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus s);

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper };

/// Status of every structural column followed by every row logical.
struct Basis {
  std::vector<VarState> state;
  bool empty() const { return state.empty(); }
};

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> values;  // structural columns
  Basis basis;
  long iterations = 0;
};

struct LpOptions {
  long max_iterations = 5'000'000;
  double primal_tol = 1e-7;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  std::chrono::steady_clock::time_point deadline = std::chrono::steady_clock::time_point::max();
};

/// Bounded-variable dual simplex on [A -I](x, s) = 0 with l <= (x, s) <= u,
/// keeping an explicit dense basis inverse with dual steepest-edge pricing.
/// Structural columns with an infinite bound are boxed at +-1e7 internally;
/// an optimum resting on such a box is reported as Unbounded.
class LpEngine {
 public:
  explicit LpEngine(const MilpModel& model, LpOptions options = {});

  int num_columns() const { return n_; }
  int num_rows() const { return m_; }

  /// Changes structural bounds; a warm basis stays dual feasible when bounds only tighten.
  void set_column_bounds(int col, double lower, double upper);
  double column_lower(int col) const { return lo_[static_cast<std::size_t>(col)]; }
  double column_upper(int col) const { return hi_[static_cast<std::size_t>(col)]; }

  void load_basis(const Basis& basis);
  Basis basis() const;
  void reset_to_slack_basis();

  LpResult solve();

  LpOptions& options() { return opts_; }

 private:
  bool refactor();
  void compute_primal();
  void compute_duals();
  bool restore_dual_feasibility();
  int choose_leaving(bool bland) const;
  void compute_pivot_row(int r);
  int ratio_test(int r, bool to_lower, bool bland) const;
  void compute_pivot_column(int q);
  void pivot(int r, int q, bool to_lower);
  LpResult finish(LpStatus status, long iterations);
  double var_lower(int j) const { return lo_[static_cast<std::size_t>(j)]; }
  double var_upper(int j) const { return hi_[static_cast<std::size_t>(j)]; }

  LpOptions opts_;
  int n_ = 0, m_ = 0;
  Eigen::SparseMatrix<double> a_;  // m x n, column major
  std::vector<double> cost_;       // n + m, may carry temporary shifts
  std::vector<double> orig_cost_;
  std::vector<double> lo_, hi_;    // n + m, internal (boxed) bounds
  std::vector<char> boxed_lo_, boxed_hi_;  // internal box replaced an infinite bound

  std::vector<int> basic_;  // row -> variable
  std::vector<int> pos_;    // variable -> row or -1
  std::vector<VarState> state_;
  std::vector<double> x_, d_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> binv_;
  Eigen::VectorXd weight_;  // dual steepest-edge weights, |row r of B^-1|^2

  Eigen::VectorXd rho_;     // pivot row of B^-1
  std::vector<double> alpha_row_;  // rho^T a_j for every variable
  Eigen::VectorXd alpha_col_;      // B^-1 a_q
  bool factored_ = false;
  bool primal_dirty_ = true;
  int since_refactor_ = 0;
};

/// One-shot LP relaxation (integrality ignored).
LpResult solve_lp(const MilpModel& model, const Basis* warm = nullptr, LpOptions options = {});

}  // namespace owf
