#include <doctest.h>

#include <cmath>

#include "qhlab/approach.hpp"
#include "qhlab/error.hpp"
#include "qhlab/visibility.hpp"

using namespace qhlab;

namespace {

const MetricGraph& disk64() {
  static const MetricGraph g = MetricGraph::build(Domain::disk({0, 0}, 1), 1.0 / 64);
  return g;
}

BoundaryPoint at(Vec2 p, std::optional<Vec2> corridor = std::nullopt) { return {p, corridor, std::nullopt}; }

}  // namespace

TEST_CASE("antipodal disk pair is visible") {
  const MetricGraph& g = disk64();
  const VisibilityReport r = test_pair_visibility(g, at({1, 0}), at({-1, 0}), 5);
  CHECK(r.verdict == Verdict::kVisible);
  CHECK(r.epsilon_hat >= 0.8);
  CHECK(r.levels_tested == 5);
  CHECK(r.separation == doctest::Approx(2.0));
  CHECK(r.level_k.size() == r.level_max_delta.size());
}

TEST_CASE("rectangle side midpoints are visible") {
  const MetricGraph g = MetricGraph::build(Domain::rectangle(0, 1, 0, 1), 1.0 / 64);
  const VisibilityReport r = test_pair_visibility(g, at({0, 0.5}), at({1, 0.5}), 5);
  CHECK(r.verdict == Verdict::kVisible);
  CHECK(r.epsilon_hat >= 0.4);
}

TEST_CASE("identical endpoints are rejected") {
  CHECK_THROWS_WITH_AS(test_pair_visibility(disk64(), at({1, 0}), at({1, 0}), 4), doctest::Contains("invalid-pair"),
                       Error);
}

TEST_CASE("epsilon-hat never increases with more levels") {
  const MetricGraph& g = disk64();
  double previous = std::numeric_limits<double>::infinity();
  for (int levels = 2; levels <= 5; ++levels) {
    const double eps = test_pair_visibility(g, at({0, 1}), at({0.6, -0.8}), levels).epsilon_hat;
    CHECK(eps <= previous);
    previous = eps;
  }
}

TEST_CASE("too few levels are inconclusive") {
  const VisibilityReport r = test_pair_visibility(disk64(), at({1, 0}), at({0, 1}), 3);
  CHECK(r.verdict == Verdict::kInconclusive);
}

TEST_CASE("slit sides are distinct pairs under the inner metric") {
  const MetricGraph g = MetricGraph::build(Domain::comb(2), 1.0 / 64);
  const VisibilityReport r = test_pair_visibility(g, at({0.5, 0.2}, Vec2{-1, 0}), at({0.5, 0.2}, Vec2{1, 0}), 3);
  CHECK(r.separation > 0.5);
  const MetricGraph e = MetricGraph::build(Domain::comb(2, AmbientMetric::kEuclidean), 1.0 / 64);
  CHECK_THROWS_AS(test_pair_visibility(e, at({0.5, 0.2}, Vec2{-1, 0}), at({0.5, 0.2}, Vec2{1, 0}), 3), Error);
}

TEST_CASE("falsify_visibility reports are sorted and reproducible") {
  const MetricGraph g = MetricGraph::build(Domain::comb(4), 1.0 / 64);
  const auto a = falsify_visibility(g, 8, 4, 17);
  const auto b = falsify_visibility(g, 8, 4, 17);
  REQUIRE(a.size() == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].epsilon_hat == b[i].epsilon_hat);
    CHECK(a[i].pair_index == b[i].pair_index);
    if (i > 0) CHECK(a[i - 1].epsilon_hat <= a[i].epsilon_hat);
  }
  CHECK(falsify_visibility(disk64(), 1, 4, 17).size() == 1);
}

TEST_CASE("disk falsification finds nothing") {
  for (const auto& r : falsify_visibility(disk64(), 6, 5, 3)) CHECK(r.verdict != Verdict::kFalsified);
}

TEST_CASE("observation divergence") {
  const MetricGraph& g = disk64();
  const DivergenceReport r = observation_divergence(g, at({1, 0}), at({-1, 0}), 5);
  CHECK(r.passed());
  for (std::size_t n = 0; n < r.level_k.size(); ++n) CHECK(r.level_k[n] >= 2 * n * std::log(2.0) - 1.0);
  const MetricGraph rect = MetricGraph::build(Domain::rectangle(0, 1, 0, 1), 1.0 / 64);
  CHECK(observation_divergence_check(rect, at({0, 0.3}), at({1, 0.6}), 5));
}

TEST_CASE("points next to a corner still get an approach") {
  const MetricGraph g = MetricGraph::build(Domain::rectangle(0, 1, 0, 1), 1.0 / 128);
  const BoundaryPoint p = g.domain().project({0.002, 0.0});
  ApproachOptions o;
  o.delta0 = 0.25;
  o.jitter = g.resolution();
  const ApproachSequence seq = approach_sequence(g, p, 4, o);
  CHECK(seq.delta0 >= 0.125);
  REQUIRE(seq.levels.size() == 4);
  for (const auto& l : seq.levels) {
    CHECK(g.delta(l.node) >= 0.5 * l.target_delta);
    CHECK(g.delta(l.node) <= 2.0 * l.target_delta);
  }
  const VisibilityReport r = test_pair_visibility(g, p, g.domain().project({0.7, 1.0}), 4);
  CHECK(r.levels_tested == 4);
  CHECK(r.verdict == Verdict::kVisible);
}
