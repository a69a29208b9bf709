#pragma once

#include <vector>

#include "owf/milp.hpp"
#include "owf/plan.hpp"
#include "owf/pwl.hpp"

namespace fx {

// Column values that put a radial plan into the model: x, orientation, split
// flows, envelope pieces filled in order (or the epigraph at the envelope),
// voltages, zero curtailment.
inline std::vector<double> assignment(const owf::BuiltModel& built, const owf::CandidateGraph& g,
                                      const owf::Plan& plan, const owf::PlanningConfig& cfg) {
  const auto& v = built.vars;
  std::vector<double> out(static_cast<std::size_t>(built.model.num_columns()), 0.0);
  for (std::size_t k = 0; k < plan.edges.size(); ++k) {
    const int e = plan.edges[k];
    const auto& c = g.edge(e);
    const auto ek = static_cast<std::size_t>(e);
    out[static_cast<std::size_t>(v.x[ek])] = 1.0;
    const bool i_is_child = plan.parent[static_cast<std::size_t>(c.i)] == c.j;
    const double f = i_is_child ? plan.flows[k] : -plan.flows[k];
    out[static_cast<std::size_t>(i_is_child ? v.beta_ji[ek] : v.beta_ij[ek])] = 1.0;
    out[static_cast<std::size_t>(v.f_plus[ek])] = std::max(f, 0.0);
    out[static_cast<std::size_t>(v.f_minus[ek])] = std::max(-f, 0.0);
    const double s = std::abs(f);
    if (!v.loss.empty()) {
      out[static_cast<std::size_t>(v.loss[ek])] =
          owf::tangent_envelope(owf::pwl_loss_cuts(c.capacity, cfg.pwl_segments), s);
    } else {
      const auto pieces = owf::envelope_pieces(c.capacity, cfg.pwl_segments);
      double left = s;
      for (std::size_t p = 0; p < pieces.size(); ++p) {
        const double take = std::min(left, pieces[p].width);
        out[static_cast<std::size_t>(v.loss_pieces[ek][p])] = take;
        left -= take;
      }
    }
  }
  for (int n = 0; n < g.instance.size(); ++n)
    out[static_cast<std::size_t>(v.voltage[static_cast<std::size_t>(n)])] = plan.voltages[static_cast<std::size_t>(n)];
  return out;
}

}  // namespace fx
