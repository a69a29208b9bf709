#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "owf/farm.hpp"

namespace owf {

template <typename Scalar>
struct FcmResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> centers;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> membership;  // point x cluster
  int iterations = 0;
  Scalar objective = 0;
  std::vector<Scalar> objective_trace;  // J(U_t, V_t) after every update
};

namespace detail {

// Row k of U: u_kj = d_kj^{-p} / sum_l d_kl^{-p}, p = 2/(m-1). A point sitting on
// a center takes full membership of the first such center.
template <typename Scalar, typename P, typename C>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> fcm_memberships(const P& points, const C& centers,
                                                                      Scalar m) {
  const Eigen::Index n = points.rows(), c = centers.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> u(n, c);
  const Scalar expo = Scalar(-1) / (m - Scalar(1));  // applied to squared distances
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index hit = -1;
    for (Eigen::Index j = 0; j < c; ++j) {
      const Scalar d2 = (points.row(k) - centers.row(j)).squaredNorm();
      if (d2 < Scalar(1e-24)) {
        hit = j;
        break;
      }
      u(k, j) = std::pow(d2, expo);
    }
    if (hit >= 0) {
      u.row(k).setZero();
      u(k, hit) = Scalar(1);
    } else {
      u.row(k) /= u.row(k).sum();
    }
  }
  return u;
}

template <typename Scalar, typename P, typename U, typename W>
Eigen::Matrix<Scalar, Eigen::Dynamic, 2> fcm_centers(const P& points, const U& u, const W& weights,
                                                     Scalar m) {
  const Eigen::Index c = u.cols();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> centers(c, 2);
  for (Eigen::Index j = 0; j < c; ++j) {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w =
        u.col(j).array().pow(m).matrix().cwiseProduct(weights);
    centers.row(j) = (w.transpose() * points) / w.sum();
  }
  return centers;
}

template <typename Scalar, typename P, typename C, typename U, typename W>
Scalar fcm_objective(const P& points, const C& centers, const U& u, const W& weights, Scalar m) {
  Scalar total = 0;
  for (Eigen::Index k = 0; k < points.rows(); ++k)
    for (Eigen::Index j = 0; j < centers.rows(); ++j)
      total += weights(k) * std::pow(u(k, j), m) * (points.row(k) - centers.row(j)).squaredNorm();
  return total;
}

}  // namespace detail

/// Fuzzy c-means on planar points (n x 2) with per-point weights.
/// Seeding is k-means++ style, driven only by `seed`.
template <typename Derived>
FcmResult<typename Derived::Scalar> fcm_cluster(
    const Eigen::MatrixBase<Derived>& points,
    const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>& weights, int c,
    typename Derived::Scalar m, typename Derived::Scalar tol, int max_iter, std::uint64_t seed) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  if (points.cols() != 2) throw InvalidArgument("fcm_cluster expects n x 2 points");
  if (c < 1) throw InvalidArgument("cluster count must be >= 1");
  if (c > n) throw InvalidArgument("cluster count exceeds number of points");
  if (!(m > Scalar(1))) throw InvalidArgument("fuzzifier must exceed 1");
  if (weights.size() != n) throw InvalidArgument("one weight per point required");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> centers(c, 2);
  {
    auto first = static_cast<Eigen::Index>(unit(rng) * static_cast<double>(n));
    first = std::min(first, n - 1);
    centers.row(0) = points.row(first);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d2(n);
    for (int j = 1; j < c; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        Scalar best = std::numeric_limits<Scalar>::max();
        for (int l = 0; l < j; ++l) best = std::min(best, (points.row(k) - centers.row(l)).squaredNorm());
        d2(k) = best;
      }
      const Scalar total = d2.sum();
      Eigen::Index pick = 0;
      if (total > Scalar(0)) {
        const Scalar target = static_cast<Scalar>(unit(rng)) * total;
        Scalar acc = 0;
        for (pick = 0; pick < n - 1; ++pick) {
          acc += d2(pick);
          if (acc > target) break;
        }
      }
      centers.row(j) = points.row(pick);
    }
  }

  FcmResult<Scalar> result;
  for (int it = 0; it < max_iter; ++it) {
    const auto u = detail::fcm_memberships<Scalar>(points.derived(), centers, m);
    const auto next = detail::fcm_centers<Scalar>(points.derived(), u, weights, m);
    const Scalar shift = (next - centers).rowwise().norm().maxCoeff();
    centers = next;
    result.objective_trace.push_back(detail::fcm_objective<Scalar>(points.derived(), centers, u, weights, m));
    result.iterations = it + 1;
    if (shift < tol) break;
  }
  result.membership = detail::fcm_memberships<Scalar>(points.derived(), centers, m);
  result.objective = detail::fcm_objective<Scalar>(points.derived(), centers, result.membership, weights, m);
  result.objective_trace.push_back(result.objective);
  result.centers = centers;
  return result;
}

/// Unweighted overload.
template <typename Derived>
FcmResult<typename Derived::Scalar> fcm_cluster(const Eigen::MatrixBase<Derived>& points, int c,
                                                typename Derived::Scalar m, typename Derived::Scalar tol,
                                                int max_iter, std::uint64_t seed) {
  using Vec = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  return fcm_cluster(points, Vec::Ones(points.rows()).eval(), c, m, tol, max_iter, seed);
}

/// Turbine coordinates as an n x 2 matrix, in turbine-id order.
Eigen::MatrixX2d turbine_positions(const WindFarmInstance& instance);

/// Appends `count` substations at FCM centers of the turbines. A center that
/// lands on an existing node is nudged by 1e-3 km along +x.
WindFarmInstance place_substations(const WindFarmInstance& instance, int count, const FcmParams& params);

}  // namespace owf
