#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "owf/siting.hpp"

using namespace owf;

namespace {

Eigen::MatrixX2d grid_points() { return turbine_positions(generate_grid(7, 9, 1.0, 1.3, 8.0)); }

}  // namespace

TEST_CASE("fcm: one cluster is the centroid") {
  const auto r = fcm_cluster(grid_points(), 1, 2.0, 1e-9, 300, 7);
  CHECK(r.centers(0, 0) == doctest::Approx(5.2).epsilon(1e-9));
  CHECK(r.centers(0, 1) == doctest::Approx(3.0).epsilon(1e-9));

  Eigen::MatrixX2d sq(4, 2);
  sq << 0, 0, 1, 0, 0, 1, 1, 1;
  const auto s = fcm_cluster(sq, 1, 2.0, 1e-9, 300, 3);
  CHECK(s.centers(0, 0) == doctest::Approx(0.5));
  CHECK(s.centers(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("fcm: two clusters on the Table II grid are mirror images about x = 5.2") {
  const double tol = 1e-6;
  const auto r = fcm_cluster(grid_points(), 2, 2.0, 1e-10, 2000, 7);
  const double xa = r.centers(0, 0), xb = r.centers(1, 0);
  CHECK(xa + xb == doctest::Approx(10.4).epsilon(1e-5));
  CHECK(std::abs(r.centers(0, 1) - 3.0) < 10 * tol);
  CHECK(std::abs(r.centers(1, 1) - 3.0) < 10 * tol);
  CHECK(std::abs(xa - xb) > 2.0);  // genuinely split
}

TEST_CASE("fcm: memberships, monotone objective, determinism") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + trial;
    Eigen::MatrixX2d pts(n, 2);
    for (int k = 0; k < n; ++k) pts.row(k) << u(rng), u(rng);
    const int c = 1 + trial % 4;
    const auto r = fcm_cluster(pts, c, 2.0, 1e-8, 200, 100 + trial);
    for (Eigen::Index k = 0; k < r.membership.rows(); ++k) {
      CHECK(std::abs(r.membership.row(k).sum() - 1.0) < 1e-9);
      CHECK(r.membership.row(k).minCoeff() >= 0.0);
      CHECK(r.membership.row(k).maxCoeff() <= 1.0);
    }
    for (std::size_t t = 1; t < r.objective_trace.size(); ++t)
      CHECK(r.objective_trace[t] <= r.objective_trace[t - 1] * (1 + 1e-12) + 1e-12);

    const auto again = fcm_cluster(pts, c, 2.0, 1e-8, 200, 100 + trial);
    CHECK(again.centers == r.centers);
    CHECK(again.membership == r.membership);
    CHECK(again.iterations == r.iterations);

    // translation moves centers, keeps memberships
    const Eigen::RowVector2d t(3.25, -1.5);
    const Eigen::MatrixX2d moved = pts.rowwise() + t;
    const auto tr = fcm_cluster(moved, c, 2.0, 1e-8, 200, 100 + trial);
    CHECK(((tr.centers.rowwise() - t) - r.centers).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((tr.membership - r.membership).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("fcm: a point on a center takes full membership") {
  Eigen::MatrixX2d pts(3, 2);
  pts << 0, 0, 2, 0, 1, 0;
  const auto r = fcm_cluster(pts, 1, 2.0, 1e-12, 50, 1);
  CHECK(r.membership(2, 0) == 1.0);
  const auto u = detail::fcm_memberships<double>(pts, pts.topRows(2).eval(), 2.0);
  CHECK(u(0, 0) == 1.0);
  CHECK(u(0, 1) == 0.0);
  CHECK(u(2, 0) == doctest::Approx(0.5));
}

TEST_CASE("fcm: argument errors") {
  Eigen::MatrixX2d pts(2, 2);
  pts << 0, 0, 1, 1;
  CHECK_THROWS_AS(fcm_cluster(pts, 3, 2.0, 1e-6, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(fcm_cluster(pts, 0, 2.0, 1e-6, 10, 1), InvalidArgument);
  CHECK_THROWS_AS(fcm_cluster(pts, 1, 1.0, 1e-6, 10, 1), InvalidArgument);
}

TEST_CASE("place_substations") {
  FcmParams p;
  SUBCASE("63-WT grid gets substation 63 next to the centre turbine") {
    const auto out = place_substations(generate_grid(7, 9, 1.0, 1.3, 8.0), 1, p);
    REQUIRE(out.size() == 64);
    const auto& s = out.node(63);
    CHECK(s.is_substation());
    CHECK(s.gen_mw == 0.0);
    // (5.2, 3.0) is turbine 31, so the centre is nudged east
    CHECK(s.coord.x() == doctest::Approx(5.201).epsilon(1e-6));
    CHECK(s.coord.y() == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(validate_instance(out).empty());
  }
  SUBCASE("2x2 grid keeps the cell centre") {
    const auto out = place_substations(generate_grid(2, 2, 1.0, 1.0, 8.0), 1, p);
    CHECK(out.node(4).coord.x() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(out.node(4).coord.y() == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("refuses an instance that already has a substation") {
    CHECK_THROWS_AS(place_substations(fx::grid23(), 1, p), InvalidArgument);
  }
}
