#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace owf {

template <typename Scalar>
struct Segment {
  Eigen::Matrix<Scalar, 2, 1> a;
  Eigen::Matrix<Scalar, 2, 1> b;
};

/// Sign of the turn p -> q -> r; zero when r is within `eps` of line pq.
template <typename Scalar>
int orientation(const Eigen::Matrix<Scalar, 2, 1>& p, const Eigen::Matrix<Scalar, 2, 1>& q,
                const Eigen::Matrix<Scalar, 2, 1>& r, Scalar eps) {
  const Eigen::Matrix<Scalar, 2, 1> u = q - p, v = r - p;
  const Scalar cross = u.x() * v.y() - u.y() * v.x();
  const Scalar len = u.norm();
  const Scalar dist = len > Scalar(0) ? std::abs(cross) / len : v.norm();
  if (dist <= eps) return 0;
  return cross > Scalar(0) ? 1 : -1;
}

/// True iff the open interiors meet at a proper crossing, or the segments are
/// collinear with overlapping interiors. Touching at an endpoint is not a crossing.
template <typename Scalar>
bool segments_cross(const Segment<Scalar>& s, const Segment<Scalar>& t, Scalar eps = Scalar(1e-9)) {
  const int o1 = orientation(s.a, s.b, t.a, eps);
  const int o2 = orientation(s.a, s.b, t.b, eps);
  const int o3 = orientation(t.a, t.b, s.a, eps);
  const int o4 = orientation(t.a, t.b, s.b, eps);

  if (o1 == 0 && o2 == 0) {
    // project on the dominant axis of s
    const Eigen::Matrix<Scalar, 2, 1> d = s.b - s.a;
    const int axis = std::abs(d.x()) >= std::abs(d.y()) ? 0 : 1;
    const Scalar s0 = std::min(s.a(axis), s.b(axis)), s1 = std::max(s.a(axis), s.b(axis));
    const Scalar t0 = std::min(t.a(axis), t.b(axis)), t1 = std::max(t.a(axis), t.b(axis));
    return std::min(s1, t1) - std::max(s0, t0) > eps;
  }
  if (o1 == 0 || o2 == 0 || o3 == 0 || o4 == 0) return false;
  return o1 != o2 && o3 != o4;
}

}  // namespace owf
