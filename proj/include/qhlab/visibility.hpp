#pragma once

// Quasihyperbolic visibility at desk scale. A compact set K of a bounded
// domain is modeled by a lower bound on delta, so "every geodesic between
// the approach sequences meets K" becomes "the max of delta along each
// geodesic stays above some epsilon".

#include <cstdint>
#include <string>
#include <vector>

#include "qhlab/curve.hpp"
#include "qhlab/domain.hpp"
#include "qhlab/metric_graph.hpp"

namespace qhlab {

enum class Verdict { kVisible, kFalsified, kInconclusive };
std::string to_string(Verdict verdict);

struct VisibilityOptions {
  /// Level-0 depth; 0 picks half the max delta, capped at a quarter of the
  /// pair's separation.
  double delta0 = 0.0;
  /// Threshold for a visible verdict; 0 picks 4h.
  double epsilon_vis = 0.0;
  /// Tangential jitter of the approach points; negative picks h.
  double jitter = -1.0;
  uint64_t seed = 0;
  uint64_t pair_index = 0;
};

struct VisibilityReport {
  BoundaryPoint p;
  BoundaryPoint q;
  int pair_index = 0;
  int levels_requested = 0;
  int levels_tested = 0;
  double separation = 0.0;
  double delta0 = 0.0;
  std::vector<double> level_max_delta;
  std::vector<double> level_k;
  double epsilon_hat = 0.0;
  double epsilon_vis = 0.0;
  double resolution = 0.0;
  double tau = 0.0;
  Verdict verdict = Verdict::kInconclusive;
  ParametrizedCurve worst_geodesic;
};

/// invalid-pair when p and q are the same point of the metric boundary.
VisibilityReport test_pair_visibility(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q,
                                      int levels, const VisibilityOptions& options = {});

/// Separation of two boundary points in the ambient metric: Euclidean, or the
/// inner distance between shallow approach points for the inner metric.
double boundary_separation(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q);

/// Pairs stratified by boundary arclength, partners at least 1/8 of the
/// boundary length away; reports sorted by epsilon_hat, ties by pair index.
std::vector<VisibilityReport> falsify_visibility(const MetricGraph& graph, int candidate_pairs, int levels,
                                                 uint64_t seed);

struct DivergenceReport {
  std::vector<double> level_k;
  bool strictly_increasing = false;
  bool exceeds_double = false;
  bool passed() const { return strictly_increasing && exceeds_double; }
};

/// k(x_n, y_n) along corridor approach sequences of p and q.
DivergenceReport observation_divergence(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q,
                                        int levels, double delta0 = 0.0);
/// True iff k(x_n, y_n) strictly increases and the last value exceeds twice
/// the level-0 value.
bool observation_divergence_check(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q,
                                  int levels);

}  // namespace qhlab
