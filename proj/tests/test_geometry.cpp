#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <slitlab/geometry.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace slitlab;
using namespace slitlab::geometry;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("elliptical_to_cartesian matches the defining formula") {
  CHECK(elliptical_to_cartesian(1.0, {0.0, 0.0}).x == doctest::Approx(1.0));
  CHECK(elliptical_to_cartesian(1.0, {0.0, 0.0}).y == doctest::Approx(0.0));

  // t = 0 degenerates to polar coordinates
  const Point p = elliptical_to_cartesian(0.0, {2.0, kPi / 2});
  CHECK(p.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(2.0));
}

TEST_CASE("focal sum identity on the r = 1 ellipse") {
  const Point p = elliptical_to_cartesian(1.0, {1.0, kPi / 2});
  CHECK(p.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.y == doctest::Approx(1.0));
  const double sum = std::hypot(p.x - 1.0, p.y) + std::hypot(p.x + 1.0, p.y);
  CHECK(sum == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("cartesian/elliptical round trip, r > 1e-6") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ur(1e-6, 2.0), uth(0.0, 2.0 * kPi),
      ut(0.0, 1.5);
  for (int i = 0; i < 500; ++i) {
    const double t = ut(rng);
    EllipticalPoint e{ur(rng), uth(rng), SlitSide::Top};
    const Point p = elliptical_to_cartesian(t, e);
    const EllipticalPoint back = elliptical_from_cartesian(t, p);
    CHECK(back.r == doctest::Approx(e.r).epsilon(1e-10));
    const double dth =
        std::remainder(back.theta - e.theta, 2.0 * kPi);
    CHECK(std::abs(dth) * std::max(e.r, t) < 1e-10);
  }
}

TEST_CASE("metric weights: closed-form spot values") {
  // polar limit: density = r
  CHECK(metric_weights(0.0, {2.0, 0.37}).density == doctest::Approx(2.0));
  CHECK(metric_weights(1.0, {0.0, kPi / 2}).density == doctest::Approx(1.0));
  CHECK(metric_weights(1.0, {1.0, 0.0}).density ==
        doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(metric_weights(0.0, {0.0, 0.3}), NumericalError);
}

TEST_CASE("measure consistency: density integrates to the ellipse area") {
  // integral of density over {r <= R} equals pi R sqrt(R^2 + t^2)
  const double t = 0.7, R = 1.3;
  const int nr = 2000, nth = 512;
  double total = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * R / nr;
    for (int j = 0; j < nth; ++j) {
      const double th = 2.0 * kPi * j / nth;
      total += metric_weights(t, {r, th}).density;
    }
  }
  total *= (R / nr) * (2.0 * kPi / nth);
  CHECK(total == doctest::Approx(kPi * R * std::sqrt(R * R + t * t))
                     .epsilon(1e-6));
}

TEST_CASE("sigma cutoff: ends, monotonicity, C^1 joins") {
  CHECK(sigma_cutoff(0.3) == 1.0);
  CHECK(sigma_cutoff(1.0) == 1.0);
  CHECK(sigma_cutoff(2.0) == 0.0);
  CHECK(sigma_cutoff(2.7) == 0.0);
  double prev = 1.0;
  for (int i = 1; i <= 100; ++i) {
    const double v = sigma_cutoff(1.0 + i / 100.0);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  CHECK(std::abs(sigma_cutoff_deriv(1.0 + 1e-9)) < 1e-6);
  CHECK(std::abs(sigma_cutoff_deriv(2.0 - 1e-9)) < 1e-6);
  // derivative consistency
  const double u = 1.43, d = 1e-6;
  const double fd = (sigma_cutoff(u + d) - sigma_cutoff(u - d)) / (2 * d);
  CHECK(fd == doctest::Approx(sigma_cutoff_deriv(u)).epsilon(1e-6));
}

TEST_CASE("node_motion_map: identity cases and endpoint transport") {
  const double r0 = 0.25, t_ref = 0.2, t = 0.1;
  // t == t_ref is the identity everywhere
  const Point p1 = node_motion_map({0.13, 0.02}, t_ref, t_ref, r0);
  CHECK(p1.x == 0.13);
  CHECK(p1.y == 0.02);
  // outside radius 2 r0 nothing moves
  const Point p2 = node_motion_map({0.5, 0.1}, t_ref, t, r0);
  CHECK(p2.x == 0.5);
  CHECK(p2.y == 0.1);
  // the slit endpoint travels to the new endpoint
  const Point p3 = node_motion_map({t_ref, 0.0}, t_ref, t, r0);
  CHECK(p3.x == doctest::Approx(t).epsilon(1e-12));
  CHECK(p3.y == 0.0);
  CHECK_THROWS_AS(node_motion_map({0.0, 0.0}, 0.3, 0.1, 0.25), ConfigError);
}

TEST_CASE("node_motion_map is injective and orientation preserving") {
  const double r0 = 0.25, t_ref = 0.2, t = 0.05;
  // push a fine grid through the map; signed areas of its cells stay positive
  const int n = 40;
  const double L = 0.55;
  std::vector<Point> img((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      // offset the grid so no node sits exactly on the slit line
      const Point p{-L / 2 + L * i / n, -L / 2 + L * j / n + 1e-4};
      img[j * (n + 1) + i] = node_motion_map(p, t_ref, t, r0);
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Point& a = img[j * (n + 1) + i];
      const Point& b = img[j * (n + 1) + i + 1];
      const Point& c = img[(j + 1) * (n + 1) + i];
      const double area =
          (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
      CHECK(area > 0.0);
    }
}

TEST_CASE("node_motion_map is consistent with the elliptical chart") {
  // a point on the reference ellipse r = const maps to the same (r, theta)
  // of the new configuration while r < r0 (sigma = 1 there)
  const double r0 = 0.25, t_ref = 0.2, t = 0.08, r = 0.11, th = 1.1;
  const Point ref = elliptical_to_cartesian(t_ref, {r, th});
  const Point got = node_motion_map(ref, t_ref, t, r0);
  const Point want = elliptical_to_cartesian(t, {r, th});
  CHECK(got.x == doctest::Approx(want.x).epsilon(1e-10));
  CHECK(got.y == doctest::Approx(want.y).epsilon(1e-10));
}
