#include "owf/simplex.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace owf {
namespace {

constexpr double kBox = 1e7;

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

LpEngine::LpEngine(const MilpModel& model, LpOptions options) : opts_(options) {
  n_ = model.num_columns();
  m_ = model.num_rows();
  a_ = model.matrix();
  const auto total = static_cast<std::size_t>(n_ + m_);
  cost_.assign(total, 0.0);
  orig_cost_.assign(total, 0.0);
  lo_.assign(total, 0.0);
  hi_.assign(total, 0.0);
  boxed_lo_.assign(total, 0);
  boxed_hi_.assign(total, 0);
  for (int j = 0; j < n_; ++j) {
    const auto& c = model.columns[static_cast<std::size_t>(j)];
    cost_[static_cast<std::size_t>(j)] = c.cost;
    set_column_bounds(j, c.lower, c.upper);
  }
  for (int i = 0; i < m_; ++i) {
    const auto& r = model.rows[static_cast<std::size_t>(i)];
    const auto k = static_cast<std::size_t>(n_ + i);
    lo_[k] = r.sense == RowSense::LessEqual ? -kInf : r.rhs;
    hi_[k] = r.sense == RowSense::GreaterEqual ? kInf : r.rhs;
  }
  orig_cost_ = cost_;
  reset_to_slack_basis();
}

void LpEngine::set_column_bounds(int col, double lower, double upper) {
  const auto k = static_cast<std::size_t>(col);
  boxed_lo_[k] = std::isinf(lower) ? 1 : 0;
  boxed_hi_[k] = std::isinf(upper) ? 1 : 0;
  lo_[k] = boxed_lo_[k] ? -kBox : lower;
  hi_[k] = boxed_hi_[k] ? kBox : upper;
  if (!pos_.empty() && pos_[k] < 0) x_[k] = state_[k] == VarState::AtUpper ? hi_[k] : lo_[k];
  primal_dirty_ = true;
}

void LpEngine::reset_to_slack_basis() {
  const auto total = static_cast<std::size_t>(n_ + m_);
  basic_.resize(static_cast<std::size_t>(m_));
  pos_.assign(total, -1);
  state_.assign(total, VarState::AtLower);
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) {
    const auto k = static_cast<std::size_t>(j);
    state_[k] = cost_[k] >= 0.0 ? VarState::AtLower : VarState::AtUpper;
    x_[k] = state_[k] == VarState::AtLower ? lo_[k] : hi_[k];
  }
  for (int i = 0; i < m_; ++i) {
    const auto k = static_cast<std::size_t>(n_ + i);
    basic_[static_cast<std::size_t>(i)] = n_ + i;
    pos_[k] = i;
    state_[k] = VarState::Basic;
  }
  binv_ = -Eigen::MatrixXd::Identity(m_, m_);
  weight_ = Eigen::VectorXd::Ones(m_);
  factored_ = true;
  primal_dirty_ = true;
  since_refactor_ = 0;
}

Basis LpEngine::basis() const { return Basis{state_}; }

void LpEngine::load_basis(const Basis& basis) {
  const auto total = static_cast<std::size_t>(n_ + m_);
  if (basis.state.size() != total ||
      std::count(basis.state.begin(), basis.state.end(), VarState::Basic) != m_) {
    reset_to_slack_basis();
    return;
  }
  bool same_basic_set = factored_;
  for (std::size_t j = 0; j < total && same_basic_set; ++j)
    same_basic_set = (basis.state[j] == VarState::Basic) == (state_[j] == VarState::Basic);
  if (same_basic_set) {
    // the factorisation stays valid; only nonbasic positions change
    for (std::size_t j = 0; j < total; ++j) {
      if (state_[j] == VarState::Basic) continue;
      state_[j] = basis.state[j];
      if (state_[j] == VarState::AtLower && std::isinf(lo_[j])) state_[j] = VarState::AtUpper;
      if (state_[j] == VarState::AtUpper && std::isinf(hi_[j])) state_[j] = VarState::AtLower;
      x_[j] = state_[j] == VarState::AtLower ? lo_[j] : hi_[j];
    }
    primal_dirty_ = true;
    return;
  }
  state_ = basis.state;
  pos_.assign(total, -1);
  int r = 0;
  for (std::size_t j = 0; j < total; ++j) {
    if (state_[j] == VarState::Basic) {
      basic_[static_cast<std::size_t>(r)] = static_cast<int>(j);
      pos_[j] = r++;
      continue;
    }
    if (state_[j] == VarState::AtLower && std::isinf(lo_[j])) state_[j] = VarState::AtUpper;
    if (state_[j] == VarState::AtUpper && std::isinf(hi_[j])) state_[j] = VarState::AtLower;
    x_[j] = state_[j] == VarState::AtLower ? lo_[j] : hi_[j];
  }
  factored_ = false;
  primal_dirty_ = true;
}

// Slack columns are -e_i, so with the rows covered by basic slacks split off
// only the square block A1 of basic structurals on the remaining rows needs an
// LU: x_S = A1^-1 b_N and x_L = A2 x_S - b_L.
bool LpEngine::refactor() {
  std::vector<int> block_row(static_cast<std::size_t>(m_), -1);  // row -> index in A1, -1 if slack-covered
  std::vector<int> slack_pos(static_cast<std::size_t>(m_), -1);  // row -> basis position of its slack
  std::vector<int> structural;                                    // basis positions holding structurals
  for (int r = 0; r < m_; ++r) {
    const int j = basic_[static_cast<std::size_t>(r)];
    if (j < n_) structural.push_back(r);
    else slack_pos[static_cast<std::size_t>(j - n_)] = r;
  }
  std::vector<int> free_rows;
  for (int i = 0; i < m_; ++i)
    if (slack_pos[static_cast<std::size_t>(i)] < 0) {
      block_row[static_cast<std::size_t>(i)] = static_cast<int>(free_rows.size());
      free_rows.push_back(i);
    }
  const auto k = static_cast<Eigen::Index>(structural.size());
  if (static_cast<Eigen::Index>(free_rows.size()) != k) return false;

  Eigen::MatrixXd inv1;
  if (k > 0) {
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index t = 0; t < k; ++t) {
      const int j = basic_[static_cast<std::size_t>(structural[static_cast<std::size_t>(t)])];
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) {
        const int br = block_row[static_cast<std::size_t>(it.row())];
        if (br >= 0) trips.emplace_back(br, t, it.value());
      }
    }
    Eigen::SparseMatrix<double> a1(k, k);
    a1.setFromTriplets(trips.begin(), trips.end());
    a1.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(a1);
    lu.factorize(a1);
    if (lu.info() != Eigen::Success) return false;
    inv1 = lu.solve(Eigen::MatrixXd::Identity(k, k));
    if (!inv1.allFinite()) return false;
  }

  binv_.setZero(m_, m_);
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(m_, k);  // rows of A2 A1^-1 at slack positions
  for (Eigen::Index t = 0; t < k; ++t) {
    const int j = basic_[static_cast<std::size_t>(structural[static_cast<std::size_t>(t)])];
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) {
      const int p = slack_pos[static_cast<std::size_t>(it.row())];
      if (p >= 0) coupling.row(p).noalias() += it.value() * inv1.row(t);
    }
  }
  for (Eigen::Index t = 0; t < k; ++t) {
    const int p = structural[static_cast<std::size_t>(t)];
    for (Eigen::Index c = 0; c < k; ++c) binv_(p, free_rows[static_cast<std::size_t>(c)]) = inv1(t, c);
  }
  for (int i = 0; i < m_; ++i) {
    const int p = slack_pos[static_cast<std::size_t>(i)];
    if (p < 0) continue;
    for (Eigen::Index c = 0; c < k; ++c) binv_(p, free_rows[static_cast<std::size_t>(c)]) = coupling(p, c);
    binv_(p, i) = -1.0;
  }
  weight_ = binv_.rowwise().squaredNorm();
  factored_ = true;
  since_refactor_ = 0;
  primal_dirty_ = true;
  return true;
}

void LpEngine::compute_primal() {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < n_; ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (pos_[k] >= 0 || x_[k] == 0.0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) rhs(it.row()) += it.value() * x_[k];
  }
  for (int i = 0; i < m_; ++i) {
    const auto k = static_cast<std::size_t>(n_ + i);
    if (pos_[k] < 0) rhs(i) -= x_[k];
  }
  const Eigen::VectorXd xb = -(binv_ * rhs);
  for (int r = 0; r < m_; ++r) x_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(r)])] = xb(r);
  primal_dirty_ = false;
}

void LpEngine::compute_duals() {
  Eigen::VectorXd cb(m_);
  for (int r = 0; r < m_; ++r) cb(r) = cost_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(r)])];
  const Eigen::VectorXd y = binv_.transpose() * cb;
  for (int j = 0; j < n_; ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (pos_[k] >= 0) {
      d_[k] = 0.0;
      continue;
    }
    double dot = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) dot += it.value() * y(it.row());
    d_[k] = cost_[k] - dot;
  }
  for (int i = 0; i < m_; ++i) {
    const auto k = static_cast<std::size_t>(n_ + i);
    d_[k] = pos_[k] >= 0 ? 0.0 : cost_[k] + y(i);
  }
}

bool LpEngine::restore_dual_feasibility() {
  bool moved = false;
  for (std::size_t k = 0; k < state_.size(); ++k) {
    if (state_[k] == VarState::Basic || lo_[k] == hi_[k]) continue;
    if (state_[k] == VarState::AtLower && d_[k] < -opts_.dual_tol) {
      if (!std::isinf(hi_[k])) {
        state_[k] = VarState::AtUpper;
        x_[k] = hi_[k];
        moved = true;
      } else {
        cost_[k] -= d_[k];
        d_[k] = 0.0;
      }
    } else if (state_[k] == VarState::AtUpper && d_[k] > opts_.dual_tol) {
      if (!std::isinf(lo_[k])) {
        state_[k] = VarState::AtLower;
        x_[k] = lo_[k];
        moved = true;
      } else {
        cost_[k] -= d_[k];
        d_[k] = 0.0;
      }
    }
  }
  if (moved) primal_dirty_ = true;
  return moved;
}

int LpEngine::choose_leaving(bool bland) const {
  int best = -1;
  double best_score = 0.0;
  int best_var = n_ + m_;
  for (int r = 0; r < m_; ++r) {
    const auto j = static_cast<std::size_t>(basic_[static_cast<std::size_t>(r)]);
    const double x = x_[j];
    double infeas = 0.0;
    if (x < lo_[j] - opts_.primal_tol)
      infeas = lo_[j] - x;
    else if (x > hi_[j] + opts_.primal_tol)
      infeas = x - hi_[j];
    else
      continue;
    if (bland) {
      if (static_cast<int>(j) < best_var) {
        best_var = static_cast<int>(j);
        best = r;
      }
    } else {
      const double score = infeas * infeas / std::max(weight_(r), 1e-12);
      if (score > best_score) {
        best_score = score;
        best = r;
      }
    }
  }
  return best;
}

void LpEngine::compute_pivot_row(int r) {
  rho_ = binv_.row(r).transpose();
  alpha_row_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
  for (int j = 0; j < n_; ++j) {
    if (pos_[static_cast<std::size_t>(j)] >= 0) continue;
    double dot = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it) dot += it.value() * rho_(it.row());
    alpha_row_[static_cast<std::size_t>(j)] = dot;
  }
  for (int i = 0; i < m_; ++i) {
    const auto k = static_cast<std::size_t>(n_ + i);
    if (pos_[k] < 0) alpha_row_[k] = -rho_(i);
  }
}

int LpEngine::ratio_test(int /*r*/, bool to_lower, bool bland) const {
  const double s = to_lower ? 1.0 : -1.0;
  const auto total = static_cast<std::size_t>(n_ + m_);
  // candidates: nonbasic, not fixed, moving in the direction that repairs row r
  auto slack_of = [&](std::size_t j, double& dj, double& mag) {
    if (state_[j] == VarState::Basic || lo_[j] == hi_[j]) return false;
    const double a = alpha_row_[j];
    const double t = s * a;
    if (std::abs(a) <= opts_.pivot_tol) return false;
    if (state_[j] == VarState::AtLower) {
      if (t >= 0.0) return false;
      dj = std::max(d_[j], 0.0);
    } else {
      if (t <= 0.0) return false;
      dj = std::max(-d_[j], 0.0);
    }
    mag = std::abs(a);
    return true;
  };

  int best = -1;
  if (bland) {
    double best_ratio = kInf;
    for (std::size_t j = 0; j < total; ++j) {
      double dj, mag;
      if (!slack_of(j, dj, mag)) continue;
      const double ratio = dj / mag;
      if (ratio < best_ratio - 1e-12) {
        best_ratio = ratio;
        best = static_cast<int>(j);
      }
    }
    return best;
  }

  double theta_max = kInf;
  for (std::size_t j = 0; j < total; ++j) {
    double dj, mag;
    if (!slack_of(j, dj, mag)) continue;
    theta_max = std::min(theta_max, (dj + opts_.dual_tol) / mag);
  }
  if (std::isinf(theta_max)) return -1;
  double best_mag = 0.0;
  for (std::size_t j = 0; j < total; ++j) {
    double dj, mag;
    if (!slack_of(j, dj, mag)) continue;
    if (dj / mag <= theta_max && mag > best_mag) {
      best_mag = mag;
      best = static_cast<int>(j);
    }
  }
  return best;
}

void LpEngine::compute_pivot_column(int q) {
  alpha_col_ = Eigen::VectorXd::Zero(m_);
  if (q < n_) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, q); it; ++it)
      alpha_col_.noalias() += it.value() * binv_.col(it.row());
  } else {
    alpha_col_ = -binv_.col(q - n_);
  }
}

void LpEngine::pivot(int r, int q, bool to_lower) {
  const auto ur = static_cast<std::size_t>(r);
  const auto uq = static_cast<std::size_t>(q);
  const int leave = basic_[ur];
  const auto ul = static_cast<std::size_t>(leave);
  const double bound = to_lower ? lo_[ul] : hi_[ul];
  const double p = alpha_col_(r);

  const double theta_d = d_[uq] / alpha_row_[uq];
  for (std::size_t j = 0; j < d_.size(); ++j)
    if (state_[j] != VarState::Basic && alpha_row_[j] != 0.0) d_[j] -= theta_d * alpha_row_[j];
  d_[ul] = -theta_d;
  d_[uq] = 0.0;

  const double t = (x_[ul] - bound) / p;
  for (int i = 0; i < m_; ++i) {
    const double a = alpha_col_(i);
    if (a != 0.0) x_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])] -= t * a;
  }
  x_[uq] += t;
  x_[ul] = bound;

  basic_[ur] = q;
  pos_[uq] = r;
  pos_[ul] = -1;
  state_[ul] = to_lower ? VarState::AtLower : VarState::AtUpper;
  state_[uq] = VarState::Basic;

  binv_.row(r) /= p;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    const double a = alpha_col_(i);
    if (a == 0.0) continue;
    binv_.row(i) -= a * binv_.row(r);
    weight_(i) = binv_.row(i).squaredNorm();
  }
  weight_(r) = binv_.row(r).squaredNorm();
}

LpResult LpEngine::finish(LpStatus status, long iterations) {
  LpResult res;
  res.status = status;
  res.iterations = iterations;
  res.values.assign(x_.begin(), x_.begin() + n_);
  res.objective = 0.0;
  for (int j = 0; j < n_; ++j) res.objective += orig_cost_[static_cast<std::size_t>(j)] * res.values[static_cast<std::size_t>(j)];
  if (status == LpStatus::Optimal) {
    for (int j = 0; j < n_; ++j) {
      const auto k = static_cast<std::size_t>(j);
      const bool on_box = (boxed_lo_[k] && x_[k] <= -kBox + 1e-6) || (boxed_hi_[k] && x_[k] >= kBox - 1e-6);
      if (on_box) {
        res.status = LpStatus::Unbounded;
        break;
      }
    }
  }
  res.basis = basis();
  return res;
}

LpResult LpEngine::solve() {
  for (int j = 0; j < n_ + m_; ++j)
    if (lo_[static_cast<std::size_t>(j)] > hi_[static_cast<std::size_t>(j)] + opts_.primal_tol)
      return finish(LpStatus::Infeasible, 0);

  // recompute x and d from the current inverse
  auto refresh = [&] {
    compute_primal();
    compute_duals();
    if (restore_dual_feasibility()) compute_primal();
  };
  auto fresh_start = [&] {
    if (!refactor()) {
      reset_to_slack_basis();
      refactor();
    }
    refresh();
  };
  if (!factored_ || since_refactor_ >= opts_.refactor_interval) fresh_start();
  else refresh();

  long iterations = 0;
  int degenerate_run = 0;
  int shift_rounds = 0;
  for (;;) {
    if (iterations >= opts_.max_iterations) return finish(LpStatus::IterationLimit, iterations);
    if ((iterations & 63) == 0 && std::chrono::steady_clock::now() > opts_.deadline)
      return finish(LpStatus::IterationLimit, iterations);
    if (since_refactor_ >= opts_.refactor_interval) fresh_start();

    const bool bland = degenerate_run > 200;
    const int r = choose_leaving(bland);
    if (r < 0) {
      if (since_refactor_ > 0) {
        refresh();
        if (choose_leaving(false) >= 0) continue;
      }
      if (cost_ != orig_cost_ && shift_rounds < 3) {
        ++shift_rounds;
        cost_ = orig_cost_;
        compute_duals();
        if (restore_dual_feasibility()) compute_primal();
        if (cost_ != orig_cost_ || choose_leaving(false) >= 0) continue;
      }
      return finish(LpStatus::Optimal, iterations);
    }

    const auto leave = static_cast<std::size_t>(basic_[static_cast<std::size_t>(r)]);
    const bool to_lower = x_[leave] < lo_[leave];
    compute_pivot_row(r);
    const int q = ratio_test(r, to_lower, bland);
    if (q < 0) {
      if (since_refactor_ > 0) {
        fresh_start();
        continue;
      }
      return finish(LpStatus::Infeasible, iterations);
    }
    compute_pivot_column(q);
    const double a_row = alpha_row_[static_cast<std::size_t>(q)];
    if (std::abs(alpha_col_(r) - a_row) > 1e-7 * (1.0 + std::abs(a_row)) && since_refactor_ > 0) {
      fresh_start();
      continue;
    }
    if (std::abs(d_[static_cast<std::size_t>(q)]) <= opts_.dual_tol)
      ++degenerate_run;
    else
      degenerate_run = 0;
    pivot(r, q, to_lower);
    ++iterations;
    ++since_refactor_;
  }
}

LpResult solve_lp(const MilpModel& model, const Basis* warm, LpOptions options) {
  LpEngine engine(model, options);
  if (warm != nullptr) engine.load_basis(*warm);
  return engine.solve();
}

}  // namespace owf
