#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qhlab/extension.hpp"
#include "qhlab/metric.hpp"
#include "support/oracles.hpp"

using namespace qhlab;

namespace {

const MetricGraph& disk64() {
  static const MetricGraph g = MetricGraph::build(Domain::disk({0, 0}, 1), 1.0 / 64);
  return g;
}

BoundaryPoint at(Vec2 p, std::optional<Vec2> corridor = std::nullopt) { return {p, corridor, std::nullopt}; }

}  // namespace

TEST_CASE("disk fan: surjective, injective, coherent") {
  const MetricGraph& g = disk64();
  ExtensionOptions options;
  options.delta_hat = 0.6;
  const ExtensionExperiment ex = run_extension_experiment(g, g.snap({0, 0}), 16, 5, options);
  const double h = g.resolution();
  CHECK(ex.surjectivity_gap <= 2 * (2 * std::numbers::pi / 16));
  CHECK(ex.injectivity_margin > 0.0);
  CHECK(ex.equivalent_spread <= 4 * h);
  CHECK(ex.continuity_excess <= 0.0);
  CHECK(ex.rays.size() > 16);
  // Landings follow the radial oracle.
  for (int i = 0; i < 16; ++i) CHECK(distance(ex.rays[i].landing.position, ex.rays[i].target.position) <= 2 * h);
}

TEST_CASE("surjectivity gap does not grow with more rays") {
  const MetricGraph& g = disk64();
  ExtensionOptions options;
  options.delta_hat = 0.6;
  const double g8 = run_extension_experiment(g, g.snap({0, 0}), 8, 5, options).surjectivity_gap;
  const double g16 = run_extension_experiment(g, g.snap({0, 0}), 16, 5, options).surjectivity_gap;
  CHECK(g16 <= g8 + 1e-12);
}

TEST_CASE("rectangle fan lands on distinct positions") {
  const MetricGraph g = MetricGraph::build(Domain::rectangle(0, 1, 0, 1), 1.0 / 64);
  ExtensionOptions options;
  options.delta_hat = 0.6;
  const ExtensionExperiment ex = run_extension_experiment(g, g.snap({0.5, 0.5}), 8, 5, options);
  const double spacing = g.domain().boundary_length() / 8;
  for (int i = 0; i < 8; ++i) {
    for (int j = i + 1; j < 8; ++j) {
      CHECK(g.domain().arclength_distance(ex.rays[i].landing, ex.rays[j].landing) >= spacing - 4 * g.resolution());
    }
  }
}

TEST_CASE("injectivity line checks") {
  const MetricGraph& g = disk64();
  const LineCheck c = injectivity_line_detail(g, at({1, 0}), at({-1, 0}), 5);
  CHECK(c.passed);
  for (double d : c.d_lengths) CHECK(d >= 1.9);
  const LineCheck near = injectivity_line_detail(g, at({1, 0}), at({std::cos(0.5), std::sin(0.5)}), 5);
  CHECK(near.passed);
  CHECK(near.min_length >= distance({1, 0}, {std::cos(0.5), std::sin(0.5)}) - 4 * g.resolution());

  const MetricGraph comb = MetricGraph::build(Domain::comb(2), 1.0 / 64);
  const LineCheck slit = injectivity_line_detail(comb, at({0.5, 0.1}, Vec2{-1, 0}), at({0.5, 0.1}, Vec2{1, 0}), 3);
  CHECK(slit.passed);
  CHECK(slit.c0 > 0.3);
}

TEST_CASE("compactness verdicts") {
  CompactnessOptions options;
  options.h = 1.0 / 64;
  CHECK(compactness_check(Domain::disk({0, 0}, 1), AmbientMetric::kEuclidean, 64, 0.5, options).verdict ==
        CompactnessVerdict::kCompactConsistent);
  CHECK(compactness_check(Domain::rectangle(0, 1, 0, 1), AmbientMetric::kInner, 64, 0.5, options).verdict ==
        CompactnessVerdict::kCompactConsistent);

  const Domain comb = Domain::comb(4);
  for (int j = 1; j <= 4; ++j) options.extra_candidates.push_back({3.0 / std::ldexp(1.0, j + 2), options.h});
  const CompactnessReport r = compactness_check(comb, AmbientMetric::kInner, 32, 0.8, options);
  CHECK(r.verdict == CompactnessVerdict::kNonCompactWitness);
  CHECK(r.witness.size() >= 4);
  // Witness distances agree with the exact comb oracle up to the grid error.
  for (std::size_t i = 0; i < r.witness.size(); ++i) {
    for (std::size_t j = i + 1; j < r.witness.size(); ++j) {
      const double exact = oracle::comb_inner_distance(4, r.witness[i], r.witness[j]);
      CHECK(r.witness_distances[i][j] >= exact - 2 * options.h);
      CHECK(r.witness_distances[i][j] <= exact * 1.05 + 4 * options.h);
    }
  }
}
