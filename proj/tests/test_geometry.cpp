#include <doctest.h>

#include "wqr/errors.hpp"
#include "wqr/geometry.hpp"
#include "wqr/random.hpp"

#include <cmath>
#include <numbers>

using namespace wqr;

namespace {

Point p3(double x, double y, double z) { return Point{{x, y, z}}; }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("unit ball volumes and sphere areas match closed forms") {
  const double pi = std::numbers::pi;
  CHECK(unit_ball_volume(2) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-14));
  CHECK(unit_ball_volume(4) == doctest::Approx(pi * pi / 2.0).epsilon(1e-14));
  CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * pi).epsilon(1e-14));
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(ball_volume(3, 2.0) == doctest::Approx(32.0 * pi / 3.0).epsilon(1e-14));
}

TEST_CASE("ball invariants") {
  CHECK_THROWS_AS(Ball(p3(0, 0, 0), 0.0), InvalidArgument);
  CHECK_THROWS_AS(Ball(p3(0, 0, 0), -1.0), InvalidArgument);

  const Ball b(p3(1, 2, 3), 2.0);
  const Ball s = b.scaled(0.25);
  CHECK(s.radius == 0.5);
  CHECK(s.center == b.center);
  CHECK_THROWS_AS(b.scaled(1.0), InvalidArgument);
  CHECK(b.contains(p3(3, 2, 3)));
  CHECK_FALSE(b.contains(p3(3.001, 2, 3)));
}

TEST_CASE("box invariants and derived quantities") {
  CHECK_THROWS_AS(BoxDomain(p3(0, 0, 0), p3(1, 0, 1)), InvalidArgument);
  const BoxDomain box(p3(0, 0, 0), p3(1, 2, 4));
  CHECK(box.volume() == 8.0);
  CHECK(box.inradius() == 0.5);
  CHECK(box.diameter() == doctest::Approx(std::sqrt(21.0)));
  CHECK(box.center() == p3(0.5, 1, 2));
  CHECK(box.contains(p3(1, 2, 4)));
  CHECK_FALSE(box.contains(p3(1.1, 0, 0)));
}

TEST_CASE("mixing dimensions is an error") {
  const Ball b3(p3(0, 0, 0), 1.0);
  const Ball b2(Point{{0.0, 0.0}}, 1.0);
  CHECK_THROWS_AS(disjoint(b3, b2), DimensionMismatch);
  CHECK_THROWS_AS(contained(b2, Region{BoxDomain::cube(3, 0, 1)}), DimensionMismatch);
}

TEST_CASE("disjointness and containment use a relative tolerance") {
  const Ball a(p3(0, 0, 0), 1.0);
  const Ball tangent(p3(2, 0, 0), 1.0);
  const Ball overlap(p3(1.999, 0, 0), 1.0);
  CHECK(disjoint(a, tangent));
  CHECK_FALSE(disjoint(a, overlap));

  const Region cube{BoxDomain::cube(3, -1, 1)};
  CHECK(contained(a, cube));
  CHECK_FALSE(contained(Ball(p3(0.01, 0, 0), 1.0), cube));
  const Region big{Ball(p3(0, 0, 0), 3.0)};
  CHECK(contained(tangent, big));
  CHECK_FALSE(contained(Ball(p3(2.01, 0, 0), 1.0), big));
}

TEST_CASE("region clearance is signed") {
  const Region ball{Ball(p3(0, 0, 0), 2.0)};
  CHECK(region_clearance(ball, p3(0.5, 0, 0)) == doctest::Approx(1.5));
  CHECK(region_clearance(ball, p3(3, 0, 0)) < 0.0);
  const Region box{BoxDomain::cube(3, 0, 1)};
  CHECK(region_clearance(box, p3(0.25, 0.5, 0.5)) == doctest::Approx(0.25));
  CHECK(region_clearance(box, p3(1.5, 0.5, 0.5)) < 0.0);
}

TEST_CASE("random points land in their regions and depend only on (seed, stream)") {
  Rng r1(7, 3), r2(7, 3), r3(7, 4);
  const Ball b(p3(1, 1, 1), 0.5);
  for (int i = 0; i < 1000; ++i) {
    const Point x = r1.in_ball(b);
    CHECK(b.contains(x));
    CHECK(x == r2.in_ball(b));
  }
  CHECK(r1.uniform() != r3.uniform());

  Rng r(11);
  for (int i = 0; i < 100; ++i) {
    CHECK(r.on_sphere(3).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

}  // TEST_SUITE
