#include "owf/milp.hpp"

#include <algorithm>
#include <cmath>

#include "owf/pwl.hpp"

namespace owf {

int MilpModel::add_column(Column col) {
  columns.push_back(std::move(col));
  return num_columns() - 1;
}

int MilpModel::add_row(std::string row_name, std::vector<std::pair<int, double>> coefs, RowSense sense,
                       double rhs) {
  std::sort(coefs.begin(), coefs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> merged;
  merged.reserve(coefs.size());
  for (const auto& [c, v] : coefs) {
    if (!merged.empty() && merged.back().first == c)
      merged.back().second += v;
    else
      merged.emplace_back(c, v);
  }
  std::erase_if(merged, [](const auto& p) { return p.second == 0.0; });
  rows.push_back(Row{std::move(row_name), std::move(merged), sense, rhs});
  return num_rows() - 1;
}

std::size_t MilpModel::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.coefs.size();
  return nnz;
}

Eigen::SparseMatrix<double> MilpModel::matrix() const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(num_nonzeros());
  for (int r = 0; r < num_rows(); ++r)
    for (const auto& [c, v] : rows[static_cast<std::size_t>(r)].coefs) trips.emplace_back(r, c, v);
  Eigen::SparseMatrix<double> a(num_rows(), num_columns());
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

std::vector<std::string> MilpModel::check() const {
  std::vector<std::string> issues;
  for (const auto& r : rows)
    for (const auto& [c, v] : r.coefs)
      if (c < 0 || c >= num_columns()) issues.push_back("row " + r.name + " references missing column");
  for (const auto& c : columns) {
    if (c.lower > c.upper) issues.push_back("column " + c.name + " has crossed bounds");
    if (c.integer && c.lower >= 0.0 && c.upper <= 1.0 && !(c.lower == 0.0 || c.lower == 1.0))
      issues.push_back("binary column " + c.name + " is not boxed in [0,1]");
  }
  return issues;
}

double MilpModel::objective(std::span<const double> values) const {
  double total = 0.0;
  for (std::size_t j = 0; j < columns.size(); ++j) total += columns[j].cost * values[j];
  return total;
}

double MilpModel::row_activity(int row, std::span<const double> values) const {
  double act = 0.0;
  for (const auto& [c, v] : rows[static_cast<std::size_t>(row)].coefs) act += v * values[static_cast<std::size_t>(c)];
  return act;
}

double MilpModel::max_row_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (int r = 0; r < num_rows(); ++r) {
    const double act = row_activity(r, values);
    const auto& row = rows[static_cast<std::size_t>(r)];
    double viol = 0.0;
    if (row.sense != RowSense::GreaterEqual) viol = std::max(viol, act - row.rhs);
    if (row.sense != RowSense::LessEqual) viol = std::max(viol, row.rhs - act);
    worst = std::max(worst, viol);
  }
  return worst;
}

double MilpModel::max_bound_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    worst = std::max(worst, columns[j].lower - values[j]);
    worst = std::max(worst, values[j] - columns[j].upper);
  }
  return worst;
}

double VarMap::flow(std::span<const double> values, int e) const {
  const auto k = static_cast<std::size_t>(e);
  return values[static_cast<std::size_t>(f_plus[k])] - values[static_cast<std::size_t>(f_minus[k])];
}

double VarMap::envelope_loss(std::span<const double> values, int e) const {
  const auto k = static_cast<std::size_t>(e);
  if (!loss.empty() && loss[k] >= 0) return values[static_cast<std::size_t>(loss[k])];
  double total = 0.0;
  for (std::size_t p = 0; p < loss_pieces[k].size(); ++p)
    total += loss_piece_slopes[k][p] * values[static_cast<std::size_t>(loss_pieces[k][p])];
  return total;
}

std::vector<int> VarMap::beta_columns() const {
  std::vector<int> cols;
  cols.reserve(2 * beta_ij.size());
  for (std::size_t e = 0; e < beta_ij.size(); ++e) {
    cols.push_back(beta_ij[e]);
    cols.push_back(beta_ji[e]);
  }
  std::sort(cols.begin(), cols.end());
  return cols;
}

Eigen::SparseMatrix<double> incidence_matrix(const CandidateGraph& graph) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * graph.edges.size());
  for (const auto& e : graph.edges) {
    trips.emplace_back(e.i, e.id, 1.0);
    trips.emplace_back(e.j, e.id, -1.0);
  }
  Eigen::SparseMatrix<double> s(graph.instance.size(), graph.num_edges());
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

double kvl_big_m(const CandidateCable& edge, const PlanningConfig& config) {
  return edge.capacity * edge.resistance + (config.v_hi - config.v_lo);
}

BuiltModel build_milp(const CandidateGraph& graph, const PlanningConfig& config, const CostModel& cost) {
  config.validate();
  const auto& inst = graph.instance;
  cost.validate(inst.base);

  const int n_edges = graph.num_edges();
  const int n_nodes = inst.size();
  const auto ne = static_cast<std::size_t>(n_edges);
  const auto nn = static_cast<std::size_t>(n_nodes);
  const double eta = cost.loss_value_per_pu(inst.base);

  BuiltModel out;
  MilpModel& m = out.model;
  VarMap& v = out.vars;
  v.x.resize(ne);
  v.beta_ij.resize(ne);
  v.beta_ji.resize(ne);
  v.f_plus.resize(ne);
  v.f_minus.resize(ne);
  v.voltage.assign(nn, -1);
  v.curtail.assign(nn, -1);
  v.kcl_row.assign(nn, -1);
  v.parent_row.assign(nn, -1);

  auto tag = [](const CandidateCable& e) {
    return std::to_string(e.i) + "_" + std::to_string(e.j) + "_" + std::to_string(e.type_index);
  };

  for (const auto& e : graph.edges)
    v.x[static_cast<std::size_t>(e.id)] = m.add_column({"x_" + tag(e), 0.0, 1.0, true, e.cost});
  for (const auto& e : graph.edges) {
    const auto k = static_cast<std::size_t>(e.id);
    // a substation is never a child
    const double ij_hi = inst.node(e.j).is_substation() ? 0.0 : 1.0;
    const double ji_hi = inst.node(e.i).is_substation() ? 0.0 : 1.0;
    v.beta_ij[k] = m.add_column({"bij_" + tag(e), 0.0, ij_hi, true, 0.0});
    v.beta_ji[k] = m.add_column({"bji_" + tag(e), 0.0, ji_hi, true, 0.0});
  }
  for (const auto& e : graph.edges) {
    const auto k = static_cast<std::size_t>(e.id);
    v.f_plus[k] = m.add_column({"fp_" + tag(e), 0.0, e.capacity, false, 0.0});
    v.f_minus[k] = m.add_column({"fm_" + tag(e), 0.0, e.capacity, false, 0.0});
  }
  if (config.loss_form == LossForm::TangentRows) {
    v.loss.resize(ne);
    for (const auto& e : graph.edges)
      v.loss[static_cast<std::size_t>(e.id)] =
          m.add_column({"l_" + tag(e), 0.0, e.capacity * e.capacity, false, eta * e.resistance});
  } else {
    v.loss_pieces.resize(ne);
    v.loss_piece_slopes.resize(ne);
    for (const auto& e : graph.edges) {
      const auto pieces = envelope_pieces(e.capacity, config.pwl_segments);
      for (std::size_t p = 0; p < pieces.size(); ++p)
        v.loss_pieces[static_cast<std::size_t>(e.id)].push_back(m.add_column(
            {"d_" + tag(e) + "_" + std::to_string(p), 0.0, pieces[p].width, false,
             eta * e.resistance * pieces[p].slope}));
      for (const auto& piece : pieces) v.loss_piece_slopes[static_cast<std::size_t>(e.id)].push_back(piece.slope);
    }
  }
  for (const auto& node : inst.nodes) {
    const auto k = static_cast<std::size_t>(node.id);
    if (node.is_substation())
      v.voltage[k] = m.add_column({"v_" + std::to_string(node.id), config.v_ref, config.v_ref, false, 0.0});
    else
      v.voltage[k] = m.add_column({"v_" + std::to_string(node.id), config.v_lo, config.v_hi, false, 0.0});
  }
  for (const auto& node : inst.nodes) {
    if (node.is_substation()) continue;
    v.curtail[static_cast<std::size_t>(node.id)] = m.add_column(
        {"gc_" + std::to_string(node.id), 0.0, power_to_pu(node.gen_mw, inst.base), false, cost.curtail_penalty});
  }

  // per-edge rows
  for (const auto& e : graph.edges) {
    const auto k = static_cast<std::size_t>(e.id);
    const int x = v.x[k], fp = v.f_plus[k], fm = v.f_minus[k];
    m.add_row("cap_" + tag(e), {{fp, 1.0}, {fm, 1.0}, {x, -e.capacity}}, RowSense::LessEqual, 0.0);
    if (config.loss_form == LossForm::TangentRows) {
      const auto cuts = pwl_loss_cuts(e.capacity, config.pwl_segments);
      for (std::size_t c = 0; c < cuts.size(); ++c)
        m.add_row("pwl_" + tag(e) + "_" + std::to_string(c),
                  {{v.loss[k], 1.0}, {fp, -cuts[c].slope}, {fm, -cuts[c].slope}}, RowSense::GreaterEqual,
                  cuts[c].intercept);
    } else {
      std::vector<std::pair<int, double>> link{{fp, -1.0}, {fm, -1.0}};
      for (int col : v.loss_pieces[k]) link.emplace_back(col, 1.0);
      m.add_row("lnk_" + tag(e), std::move(link), RowSense::Equal, 0.0);
    }
    const double big_m = kvl_big_m(e, config);
    const int vi = v.voltage[static_cast<std::size_t>(e.i)], vj = v.voltage[static_cast<std::size_t>(e.j)];
    m.add_row("kvlu_" + tag(e), {{fp, e.resistance}, {fm, -e.resistance}, {vi, -1.0}, {vj, 1.0}, {x, big_m}},
              RowSense::LessEqual, big_m);
    m.add_row("kvll_" + tag(e), {{fp, e.resistance}, {fm, -e.resistance}, {vi, -1.0}, {vj, 1.0}, {x, -big_m}},
              RowSense::GreaterEqual, -big_m);
    m.add_row("ori_" + tag(e), {{v.beta_ij[k], 1.0}, {v.beta_ji[k], 1.0}, {x, -1.0}}, RowSense::Equal, 0.0);
  }

  // per-turbine rows
  for (const auto& node : inst.nodes) {
    if (node.is_substation()) continue;
    const auto k = static_cast<std::size_t>(node.id);
    std::vector<std::pair<int, double>> kcl, parent;
    for (int eid : graph.adjacency[k]) {
      const auto& e = graph.edge(eid);
      const auto ek = static_cast<std::size_t>(eid);
      const double sign = e.i == node.id ? 1.0 : -1.0;
      kcl.emplace_back(v.f_plus[ek], sign);
      kcl.emplace_back(v.f_minus[ek], -sign);
      parent.emplace_back(e.i == node.id ? v.beta_ji[ek] : v.beta_ij[ek], 1.0);
    }
    kcl.emplace_back(v.curtail[k], 1.0);
    v.kcl_row[k] = m.add_row("kcl_" + std::to_string(node.id), std::move(kcl), RowSense::Equal,
                             power_to_pu(node.gen_mw, inst.base));
    v.parent_row[k] = m.add_row("par_" + std::to_string(node.id), std::move(parent), RowSense::Equal, 1.0);
  }

  std::vector<std::pair<int, double>> all_x;
  for (int col : v.x) all_x.emplace_back(col, 1.0);
  v.edge_count_row = m.add_row("radial", std::move(all_x), RowSense::Equal,
                               static_cast<double>(n_nodes - inst.num_substations()));

  if (config.forbid_crossings) {
    for (auto [a, b] : graph.crossings)
      m.add_row("crs_" + std::to_string(a) + "_" + std::to_string(b),
                {{v.x[static_cast<std::size_t>(a)], 1.0}, {v.x[static_cast<std::size_t>(b)], 1.0}},
                RowSense::LessEqual, 1.0);
  }
  if (config.cable_types.size() > 1) {
    // parallel candidates between one node pair are consecutive
    for (std::size_t first = 0; first < ne;) {
      std::size_t last = first;
      std::vector<std::pair<int, double>> group;
      while (last < ne && graph.edges[last].i == graph.edges[first].i && graph.edges[last].j == graph.edges[first].j)
        group.emplace_back(v.x[last++], 1.0);
      if (group.size() > 1)
        m.add_row("one_" + std::to_string(graph.edges[first].i) + "_" + std::to_string(graph.edges[first].j),
                  std::move(group), RowSense::LessEqual, 1.0);
      first = last;
    }
  }
  return out;
}

}  // namespace owf
