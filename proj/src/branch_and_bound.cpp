#include "owf/branch_and_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "owf/heuristics.hpp"
#include "owf/simplex.hpp"

namespace owf {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unsolved: return "Unsolved";
  }
  return "?";
}

std::optional<int> branch_select(std::span<const double> values, std::span<const int> primary,
                                 std::span<const int> secondary, double tol) {
  for (auto cols : {primary, secondary}) {
    int best = -1;
    double best_frac = tol;
    for (int c : cols) {
      const double v = values[static_cast<std::size_t>(c)];
      const double frac = std::abs(v - std::round(v));
      if (frac > best_frac || (frac == best_frac && best >= 0 && c < best)) {
        best = c;
        best_frac = frac;
      }
    }
    if (best >= 0) return best;
  }
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNoValue = std::numeric_limits<double>::infinity();

struct Fix {
  int col;
  double lower, upper;
};

struct Node {
  double bound = -kNoValue;
  int depth = 0;
  long seq = 0;
  std::vector<Fix> fixes;
  std::shared_ptr<const Basis> basis;
};

class Search {
 public:
  Search(const BuiltModel& built, const CandidateGraph& graph, const PlanningConfig& config, const CostModel& cost,
         const ProgressCallback& progress)
      : built_(built), graph_(graph), config_(config), cost_(cost), progress_(progress),
        params_(config.solver), start_(Clock::now()) {
    const auto limit = std::chrono::duration<double>(params_.time_limit_s);
    deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(limit);
    x_cols_ = built.vars.x_columns();
    beta_cols_ = built.vars.beta_columns();
    last_progress_ = start_;
  }

  SolveResult run() {
    seed_incumbent();
    push(Node{});
    const int workers = std::max(1, params_.workers);
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back([this] { worker(); });
      for (auto& t : pool) t.join();
    }
    if (error_) std::rethrow_exception(error_);
    return finish();
  }

 private:
  // --- queue (guarded by mu_) ---------------------------------------------

  void push(Node node) {
    node.seq = next_seq_++;
    by_bound_.emplace(node.bound, node.seq);
    by_depth_.emplace(-node.depth, -node.seq);
    open_.emplace(node.seq, std::move(node));
  }

  Node take(long seq) {
    auto it = open_.find(seq);
    Node node = std::move(it->second);
    open_.erase(it);
    by_bound_.erase({node.bound, node.seq});
    by_depth_.erase({-node.depth, -node.seq});
    return node;
  }

  double global_bound() const {
    double b = std::min(tol_pruned_, incumbent_);
    if (!by_bound_.empty()) b = std::min(b, by_bound_.begin()->first);
    for (double a : active_) b = std::min(b, a);
    return b;
  }

  double gap_of(double bound) const {
    if (!std::isfinite(incumbent_)) return kNoValue;
    return std::max(0.0, (incumbent_ - bound) / std::max(std::abs(incumbent_), 1e-9));
  }

  double prune_slack() const {
    if (!std::isfinite(incumbent_)) return 0.0;
    return std::max(params_.gap_tol, 1e-9) * std::max(std::abs(incumbent_), 1e-9);
  }

  bool should_stop_locked() {
    if (stop_) return true;
    if (Clock::now() >= deadline_) {
      limit_hit_ = true;
      stop_ = true;
    } else if (nodes_ >= params_.max_nodes) {
      limit_hit_ = true;
      stop_ = true;
    } else if (std::isfinite(incumbent_) && gap_of(global_bound()) <= params_.gap_tol) {
      stop_ = true;
    }
    return stop_;
  }

  void offer(Plan plan, double value) {
    if (!std::isfinite(incumbent_) || value < incumbent_ - 1e-12 * std::max(1.0, std::abs(incumbent_))) {
      incumbent_ = value;
      best_ = std::move(plan);
    }
  }

  void record_locked() {
    double b = global_bound();
    if (!std::isfinite(b)) b = bound_floor_;
    bound_floor_ = std::max(bound_floor_, b);
    bound_trace_.push_back(b);
    incumbent_trace_.push_back(incumbent_);
    if (progress_) {
      const auto now = Clock::now();
      if (std::chrono::duration<double>(now - last_progress_).count() >= params_.progress_interval_s) {
        last_progress_ = now;
        progress_(stats_locked());
      }
    }
  }

  SolveStats stats_locked() const {
    SolveStats s;
    s.incumbent = incumbent_;
    s.bound = bound_floor_;
    s.gap = gap_of(bound_floor_);
    s.nodes_explored = nodes_;
    s.wall_time = std::chrono::duration<double>(Clock::now() - start_).count();
    s.lp_iterations = lp_iterations_;
    return s;
  }

  // --- heuristics ---------------------------------------------------------

  double value_of(const Plan& plan) const { return envelope_objective(plan, graph_, config_, cost_); }

  void seed_incumbent() {
    const std::vector<double> zero(static_cast<std::size_t>(graph_.num_edges()), 0.0);
    std::vector<std::pair<double, Plan>> starts;
    for (auto rule : {GreedyRule::Kruskal, GreedyRule::Prim})
      if (auto plan = greedy_forest(zero, graph_, config_, params_.seed, rule)) starts.emplace_back(value_of(*plan), std::move(*plan));
    for (int offset = 0; offset < graph_.instance.num_turbines(); ++offset)
      if (auto plan = sweep_forest(zero, graph_, config_, offset)) starts.emplace_back(value_of(*plan), std::move(*plan));
    std::stable_sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    if (starts.size() > 4) starts.resize(4);
    for (auto& [v0, plan] : starts) {
      Plan better = improve_plan(std::move(plan), graph_, config_, cost_);
      const double v = value_of(better);
      offer(std::move(better), v);
    }
  }

  std::optional<std::pair<Plan, double>> node_heuristic(const std::vector<double>& values, long seq) const {
    auto plan = rounding_heuristic(values, built_.vars, graph_, config_, params_.seed ^ static_cast<std::uint64_t>(seq));
    if (!plan) return std::nullopt;
    double v = value_of(*plan);
    return std::make_pair(std::move(*plan), v);
  }

  std::optional<Plan> integral_plan(const std::vector<double>& values) const {
    std::vector<int> edges;
    for (int e = 0; e < graph_.num_edges(); ++e)
      if (values[static_cast<std::size_t>(built_.vars.x[static_cast<std::size_t>(e)])] > 0.5) edges.push_back(e);
    try {
      Plan plan = make_plan(std::move(edges), graph_, config_);
      if (!check_feasibility(plan, graph_, config_).empty()) return std::nullopt;
      return plan;
    } catch (const StructureError&) {
      return std::nullopt;
    }
  }

  // --- worker -------------------------------------------------------------

  void worker() {
    try {
      work();
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
      stop_ = true;
      cv_.notify_all();
    }
  }

  void work() {
    LpOptions opts;
    opts.deadline = deadline_;
    LpEngine engine(built_.model, opts);
    std::vector<Fix> applied;
    long dive = -1;

    while (true) {
      Node node;
      {
        std::unique_lock lock(mu_);
        while (true) {
          if (should_stop_locked()) {
            cv_.notify_all();
            return;
          }
          if (!open_.empty()) break;
          if (active_.empty()) {
            stop_ = true;
            cv_.notify_all();
            return;
          }
          cv_.wait(lock);
        }
        long pick = -1;
        if (dive >= 0 && open_.count(dive)) {
          const Node& child = open_.at(dive);
          const double lb = global_bound();
          if (!std::isfinite(incumbent_) || child.bound <= lb + 0.3 * (incumbent_ - lb)) pick = dive;
        }
        if (pick < 0) pick = std::isfinite(incumbent_) ? by_bound_.begin()->second : -by_depth_.begin()->second;
        node = take(pick);
        if (node.bound >= incumbent_ - prune_slack()) {
          tol_pruned_ = std::min(tol_pruned_, node.bound);
          dive = -1;
          continue;
        }
        active_.insert(node.bound);
        ++nodes_;
      }

      // bounds for this node
      for (const auto& f : applied) {
        const auto& col = built_.model.columns[static_cast<std::size_t>(f.col)];
        engine.set_column_bounds(f.col, col.lower, col.upper);
      }
      for (const auto& f : node.fixes) engine.set_column_bounds(f.col, f.lower, f.upper);
      applied = node.fixes;
      if (node.basis) engine.load_basis(*node.basis);
      else engine.reset_to_slack_basis();
      LpResult lp = engine.solve();

      std::vector<Node> children;
      std::optional<std::pair<Plan, double>> found;
      double lp_bound = std::max(node.bound, lp.objective);
      bool interrupted = false;
      if (lp.status == LpStatus::IterationLimit) {
        interrupted = true;
      } else if (lp.status == LpStatus::Unbounded) {
        throw std::runtime_error("LP relaxation unbounded at node " + std::to_string(node.seq));
      } else if (lp.status == LpStatus::Optimal) {
        const auto branch = branch_select(lp.values, x_cols_, beta_cols_, params_.integrality_tol);
        if (!branch) {
          if (auto plan = integral_plan(lp.values)) {
            const double v = value_of(*plan);
            found.emplace(std::move(*plan), v);
          }
        } else {
          double inc;
          {
            std::lock_guard lock(mu_);
            inc = incumbent_;
          }
          if (lp_bound < inc) {
            if (auto h = node_heuristic(lp.values, node.seq); h && h->second < inc) {
              Plan better = improve_plan(std::move(h->first), graph_, config_, cost_);
              const double v = value_of(better);
              found.emplace(std::move(better), v);
            }
          }
          const int col = *branch;
          const double v = lp.values[static_cast<std::size_t>(col)];
          auto basis = std::make_shared<const Basis>(lp.basis);
          Node down{lp_bound, node.depth + 1, 0, node.fixes, basis};
          Node up{lp_bound, node.depth + 1, 0, node.fixes, basis};
          const auto& c = built_.model.columns[static_cast<std::size_t>(col)];
          down.fixes.push_back({col, c.lower, std::floor(v)});
          up.fixes.push_back({col, std::ceil(v), c.upper});
          // preferred child last so that it gets the larger sequence number
          if (v >= 0.5) {
            children.push_back(std::move(down));
            children.push_back(std::move(up));
          } else {
            children.push_back(std::move(up));
            children.push_back(std::move(down));
          }
        }
      }

      std::lock_guard lock(mu_);
      lp_iterations_ += lp.iterations;
      active_.erase(active_.find(node.bound));
      if (interrupted) {
        // the node stays open so the reported bound remains valid
        --nodes_;
        push(std::move(node));
        stop_ = true;
        limit_hit_ = true;
        cv_.notify_all();
        return;
      }
      if (found) offer(std::move(found->first), found->second);
      dive = -1;
      for (auto& child : children) {
        if (child.bound >= incumbent_ - prune_slack()) {
          tol_pruned_ = std::min(tol_pruned_, child.bound);
          continue;
        }
        push(std::move(child));
        dive = next_seq_ - 1;
      }
      record_locked();
      cv_.notify_all();
    }
  }

  SolveResult finish() {
    SolveResult r;
    std::lock_guard lock(mu_);
    const double b = global_bound();
    if (std::isfinite(b)) bound_floor_ = std::max(bound_floor_, b);
    if (std::isfinite(incumbent_)) bound_floor_ = std::min(bound_floor_, incumbent_);
    const bool exhausted = open_.empty() && !limit_hit_;
    if (std::isfinite(incumbent_)) {
      r.status = (exhausted || gap_of(bound_floor_) <= params_.gap_tol) ? SolveStatus::Optimal : SolveStatus::Feasible;
      if (open_.empty() && !std::isfinite(tol_pruned_)) bound_floor_ = incumbent_;
    } else {
      r.status = exhausted ? SolveStatus::Infeasible : SolveStatus::Unsolved;
    }
    r.plan = best_;
    r.stats = stats_locked();
    r.stats.status = to_string(r.status);
    r.bound_trace = std::move(bound_trace_);
    r.incumbent_trace = std::move(incumbent_trace_);
    if (progress_) progress_(r.stats);
    return r;
  }

  const BuiltModel& built_;
  const CandidateGraph& graph_;
  const PlanningConfig& config_;
  const CostModel& cost_;
  const ProgressCallback& progress_;
  SolverParams params_;
  Clock::time_point start_, deadline_, last_progress_;
  std::vector<int> x_cols_, beta_cols_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::map<long, Node> open_;
  std::set<std::pair<double, long>> by_bound_;
  std::set<std::pair<int, long>> by_depth_;
  std::multiset<double> active_;
  long next_seq_ = 0;
  long nodes_ = 0;
  long lp_iterations_ = 0;
  double incumbent_ = kNoValue;
  double tol_pruned_ = kNoValue;
  double bound_floor_ = -kNoValue;
  Plan best_;
  bool stop_ = false;
  bool limit_hit_ = false;
  std::exception_ptr error_;
  std::vector<double> bound_trace_, incumbent_trace_;
};

}  // namespace

SolveResult solve_milp(const BuiltModel& built, const CandidateGraph& graph, const PlanningConfig& config,
                       const CostModel& cost, const ProgressCallback& progress) {
  config.validate();
  Search search(built, graph, config, cost, progress);
  return search.run();
}

}  // namespace owf
