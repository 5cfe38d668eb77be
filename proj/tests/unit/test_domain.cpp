#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qhlab/domain.hpp"
#include "qhlab/error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace qhlab;

TEST_CASE("comb teeth sit at dyadic abscissae") {
  const Domain one = Domain::comb(1);
  CHECK_FALSE(one.contains({0.5, 0.25}));
  CHECK(one.contains({0.5, 0.75}));
  CHECK(one.contains({0.25, 0.25}));

  const Domain two = Domain::comb(2);
  CHECK_FALSE(two.contains({0.5, 0.1}));
  CHECK_FALSE(two.contains({0.25, 0.1}));
  CHECK(two.contains({0.125, 0.1}));

  // Between teeth 4 and 5.
  CHECK(Domain::comb(5).contains({3.0 / 128.0, 0.25}));
}

TEST_CASE("comb boundary inventory: 4 sides plus 3 primitives per tooth") {
  for (int teeth : {1, 3, 6}) {
    const Domain comb = Domain::comb(teeth);
    CHECK(comb.primitives().size() == static_cast<std::size_t>(4 + 3 * teeth));
    int caps = 0;
    for (const auto& p : comb.primitives()) caps += p.length() == 0.0;
    CHECK(caps == teeth);
    // Each slit contributes its length twice.
    CHECK(comb.boundary_length() == doctest::Approx(4.0 + teeth).epsilon(1e-12));
  }
  CHECK_THROWS_AS(Domain::comb(0), Error);
}

TEST_CASE("membership examples") {
  CHECK(Domain::disk({0, 0}, 1).contains({0, 0}));
  CHECK_FALSE(Domain::disk({0, 0}, 1).contains({1, 0}));
  const Domain comb = Domain::comb(3);
  CHECK_FALSE(comb.contains({0.25, 0.25}));
  CHECK(comb.contains({0.26, 0.25}));
  CHECK_FALSE(comb.contains({1.5, 0.5}));
}

TEST_CASE("dist_to_boundary examples") {
  CHECK(Domain::disk({0, 0}, 1).dist_to_boundary({0, 0}) == doctest::Approx(1.0));
  CHECK(Domain::rectangle(0, 1, 0, 1).dist_to_boundary({0.5, 0.25}) == doctest::Approx(0.25));
  const Domain comb = Domain::comb(3);
  CHECK(comb.dist_to_boundary({0.3, 0.25}) == doctest::Approx(oracle::comb_delta(3, {0.3, 0.25})));
  CHECK(comb.dist_to_boundary({0.3, 0.25}) == doctest::Approx(0.05));
  CHECK_THROWS_AS(comb.dist_to_boundary({2.0, 0.0}), Error);
}

TEST_CASE("polygon with a hole") {
  PolygonWithHoles poly;
  poly.loops = {{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {{1, 1}, {3, 1}, {3, 3}, {1, 3}}};
  const Domain ring = Domain::polygon(poly);
  CHECK(ring.contains({0.5, 2.0}));
  CHECK_FALSE(ring.contains({2.0, 2.0}));
  CHECK(ring.dist_to_boundary({0.5, 2.0}) == doctest::Approx(0.5));
  CHECK(ring.boundary_length() == doctest::Approx(16.0 + 8.0));
  CHECK_FALSE(ring.segment_inside({0.5, 2.0}, {3.5, 2.0}));
  CHECK(ring.segment_inside({0.5, 0.5}, {3.5, 0.5}));
}

TEST_CASE("boundary_sample spacing") {
  const auto disk = boundary_sample(Domain::disk({0, 0}, 1), 4);
  REQUIRE(disk.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const double angle = i * std::numbers::pi / 2;
    CHECK(disk[i].position.x == doctest::Approx(std::cos(angle)).epsilon(1e-12));
    CHECK(disk[i].position.y == doctest::Approx(std::sin(angle)).epsilon(1e-12));
  }

  const auto rect = boundary_sample(Domain::rectangle(0, 1, 0, 1), 4);
  REQUIRE(rect.size() == 4);
  int midpoints = 0;
  for (const auto& b : rect) {
    const Vec2 p = b.position;
    midpoints += (std::abs(p.x - 0.5) < 1e-12 && (p.y == 0.0 || p.y == 1.0)) ||
                 (std::abs(p.y - 0.5) < 1e-12 && (p.x == 0.0 || p.x == 1.0));
  }
  CHECK(midpoints == 4);
}

TEST_CASE("comb boundary sample sees both sides of every tooth") {
  const Domain comb = Domain::comb(2);
  const auto sample = boundary_sample(comb, 20);
  for (int j = 1; j <= 2; ++j) {
    const double s = std::ldexp(1.0, -j);
    bool left = false;
    bool right = false;
    for (const auto& b : sample) {
      if (std::abs(b.position.x - s) > 1e-12 || b.position.y > 0.5) continue;
      REQUIRE(b.corridor.has_value());
      left |= b.corridor->x < -0.5;
      right |= b.corridor->x > 0.5;
    }
    CHECK(left);
    CHECK(right);
  }
}

TEST_CASE("corridors distinguish slit sides only under the inner metric") {
  BoundaryPoint a{{0.5, 0.25}, Vec2{-1, 0}, std::nullopt};
  BoundaryPoint b{{0.5, 0.25}, Vec2{1, 0}, std::nullopt};
  const Domain inner = Domain::comb(2);
  CHECK_FALSE(inner.same_boundary_point(inner.resolve(a), inner.resolve(b)));
  CHECK(inner.same_boundary_point(inner.resolve(a), inner.resolve(a)));
  const Domain euclid = inner.with_ambient_metric(AmbientMetric::kEuclidean);
  CHECK(euclid.same_boundary_point(euclid.resolve(a), euclid.resolve(b)));
}

TEST_CASE("point_at_arclength round-trips through project") {
  for (const auto& [name, domain] : gen::test_domains()) {
    CAPTURE(name);
    for (int i = 0; i < 37; ++i) {
      const double s = domain.boundary_length() * (i + 0.3) / 37.0;
      const BoundaryPoint p = domain.point_at_arclength(s);
      CHECK(domain.boundary_distance(p.position) < 1e-12);
      REQUIRE(p.corridor.has_value());
      // A small step along the corridor lands inside.
      CHECK(domain.contains(p.position + *p.corridor * 1e-4));
      const BoundaryPoint back = domain.project(p.position + *p.corridor * 1e-9, p.corridor);
      CHECK(distance(back.position, p.position) < 1e-8);
    }
  }
}

TEST_CASE("property: delta certifies an empty disk and is 1-Lipschitz") {
  gen::Source src(11);
  for (const auto& [name, domain] : gen::test_domains()) {
    CAPTURE(name);
    for (int i = 0; i < 300; ++i) {
      const Vec2 p = src.point(domain);
      const Vec2 q = src.point(domain);
      const double dp = domain.dist_to_boundary(p);
      REQUIRE(dp > 0.0);
      CHECK(std::abs(dp - domain.dist_to_boundary(q)) <= distance(p, q) + 1e-12);
      // No boundary point strictly inside the disk of radius delta.
      for (const auto& prim : domain.primitives()) {
        for (int k = 0; k <= 16; ++k) {
          const Vec2 b = prim.point_at(prim.length() * k / 16.0);
          CHECK(distance(b, p) >= dp - 1e-12);
        }
      }
    }
  }
}

TEST_CASE("property: delta matches the comb oracle") {
  gen::Source src(12);
  const Domain comb = Domain::comb(4);
  for (int i = 0; i < 500; ++i) {
    const Vec2 p = src.point(comb);
    CHECK(comb.dist_to_boundary(p) == doctest::Approx(oracle::comb_delta(4, p)).epsilon(1e-12));
  }
}

TEST_CASE("segment_inside rejects slit crossings") {
  const Domain comb = Domain::comb(3);
  CHECK_FALSE(comb.segment_inside({0.2, 0.1}, {0.3, 0.1}));
  CHECK(comb.segment_inside({0.2, 0.6}, {0.3, 0.6}));
  CHECK_FALSE(comb.segment_inside({0.2, 0.1}, {0.3, 0.9}));
  gen::Source src(13);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 a = src.point(comb);
    const Vec2 b = src.point(comb);
    CHECK(comb.segment_inside(a, b) == oracle::comb_segment_clear(3, a, b));
  }
}
