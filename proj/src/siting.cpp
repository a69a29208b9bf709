#include "owf/siting.hpp"

namespace owf {

Eigen::MatrixX2d turbine_positions(const WindFarmInstance& instance) {
  const auto ids = instance.turbine_ids();
  Eigen::MatrixX2d pts(static_cast<Eigen::Index>(ids.size()), 2);
  for (std::size_t k = 0; k < ids.size(); ++k) pts.row(static_cast<Eigen::Index>(k)) = instance.node(ids[k]).coord;
  return pts;
}

WindFarmInstance place_substations(const WindFarmInstance& instance, int count, const FcmParams& params) {
  if (instance.num_substations() != 0) throw InvalidArgument("instance already has substations");
  const auto ids = instance.turbine_ids();
  const Eigen::MatrixX2d pts = turbine_positions(instance);
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(pts.rows());
  if (params.weight_by_generation)
    for (std::size_t k = 0; k < ids.size(); ++k) weights(static_cast<Eigen::Index>(k)) = instance.node(ids[k]).gen_mw;

  const auto fcm = fcm_cluster(pts, weights, count, params.fuzzifier, params.tol_km, params.max_iter, params.seed);

  WindFarmInstance out = instance;
  for (int j = 0; j < count; ++j) {
    Point p = fcm.centers.row(j).transpose();
    auto occupied = [&](const Point& q) {
      return std::any_of(out.nodes.begin(), out.nodes.end(),
                         [&](const Node& n) { return (n.coord - q).norm() < 1e-9; });
    };
    while (occupied(p)) p.x() += 1e-3;
    Node s;
    s.id = out.size();
    s.kind = NodeKind::Substation;
    s.coord = p;
    s.gen_mw = 0.0;
    out.nodes.push_back(s);
  }
  return out;
}

}  // namespace owf
