#pragma once

// Experiments on the boundary map from ray classes to landing points:
// surjectivity and injectivity over a fan of rays, continuity under target
// perturbation, and witnesses of a non-compact metric boundary.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qhlab/hyperbolicity.hpp"
#include "qhlab/metric_graph.hpp"

namespace qhlab {

enum class RayRole { kFan, kDuplicate, kPerturbed, kOffset };
std::string to_string(RayRole role);

struct RayRecord {
  RayRole role = RayRole::kFan;
  int partner = -1;  // fan index a twin was derived from
  BoundaryPoint target;
  int levels = 0;
  LandingStatus status = LandingStatus::kNoLandingDetected;
  BoundaryPoint landing;
  Vec2 deepest;
  bool flagged = false;
};

struct ExtensionOptions {
  /// Hyperbolicity estimate for the equivalence bound; negative estimates it
  /// from 16 triangles.
  double delta_hat = -1.0;
  uint64_t seed = 0;
  /// Every twin_stride-th fan ray gets a duplicate, a perturbed and an
  /// offset-schedule twin.
  int twin_stride = 8;
  /// Level-0 depth of the fan; 0 picks delta(x0) / 2.
  double delta0 = 0.0;
};

struct ExtensionExperiment {
  int base = -1;
  int n_rays = 0;
  int levels = 0;
  double resolution = 0.0;
  double delta_hat = 0.0;
  double equivalence_bound = 0.0;
  /// Boundary step used for perturbed twins (boundary length / (4 n_rays)).
  double step = 0.0;
  std::vector<RayRecord> rays;  // fan first, then twins

  /// Max over a 4 n_rays boundary sample of the arclength distance to the
  /// nearest landing.
  double surjectivity_gap = 0.0;
  /// Min distance between landings of non-equivalent fan rays.
  double injectivity_margin = 0.0;
  int non_equivalent_pairs = 0;
  /// Fan pairs with distinct targets that the bound cannot separate at this
  /// depth.
  int unresolved_pairs = 0;
  /// Max landing distance over twins found equivalent to their fan ray.
  double equivalent_spread = 0.0;
  int equivalent_twins = 0;
  /// Max over perturbed twins of (landing move) - (2h + step).
  double continuity_excess = 0.0;
  int flagged = 0;
};

ExtensionExperiment run_extension_experiment(const MetricGraph& graph, int x0, int n_rays, int levels,
                                             const ExtensionOptions& options = {});

struct LineCheck {
  std::vector<double> d_lengths;
  double c0 = 0.0;
  double min_length = 0.0;
  bool passed = false;
};

/// d-lengths of the level geodesics between approach sequences of p and q
/// must stay >= c0 = separation(p, q) / 2.
LineCheck injectivity_line_detail(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q,
                                  int levels);
bool injectivity_line_check(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q, int levels);

enum class CompactnessVerdict { kCompactConsistent, kNonCompactWitness };
std::string to_string(CompactnessVerdict verdict);

struct CompactnessOptions {
  double h = 1.0 / 256;
  int connectivity = 16;
  /// Interior candidate points added to the boundary sample.
  std::vector<Vec2> extra_candidates;
  /// Inward offset of boundary samples; 0 picks h.
  double offset = 0.0;
};

struct CompactnessReport {
  CompactnessVerdict verdict = CompactnessVerdict::kCompactConsistent;
  std::vector<Vec2> witness;
  std::vector<std::vector<double>> witness_distances;
  double separation = 0.0;
  double net_radius = 0.0;
  int candidates = 0;
};

/// Looks for >= 4 candidates with pairwise metric distance >= separation
/// whose consecutive Euclidean gaps shrink strictly, the last one below
/// separation / 4: a sequence with no Cauchy subsequence in the metric.
CompactnessReport compactness_check(const Domain& domain, AmbientMetric metric, int n, double separation,
                                    const CompactnessOptions& options = {});

}  // namespace qhlab
