#pragma once

// Sequences of graph nodes approaching a boundary point along its corridor,
// at delta-levels delta0 * 2^-n.

#include <cstdint>
#include <vector>

#include "qhlab/domain.hpp"
#include "qhlab/metric_graph.hpp"

namespace qhlab {

struct ApproachOptions {
  /// Level-0 depth; 0 picks half the domain's max delta. Halved automatically
  /// until the level-0 point is inside with the expected delta.
  double delta0 = 0.0;
  /// Amplitude of the uniform tangential jitter; capped at a quarter of each
  /// level's depth.
  double jitter = 0.0;
  uint64_t seed = 0;
  uint64_t stream_index = 0;
};

struct ApproachLevel {
  int level = 0;
  double target_delta = 0.0;
  Vec2 point;
  int node = -1;
  double node_delta = 0.0;
};

struct ApproachSequence {
  BoundaryPoint target;
  double delta0 = 0.0;
  int requested = 0;
  std::vector<ApproachLevel> levels;
  bool truncated() const { return static_cast<int>(levels.size()) < requested; }
};

/// Stops at the first level whose point leaves the domain, whose delta or
/// snapped node's delta is off by more than a factor 2 from the level's
/// depth, or whose node repeats the previous level's.
ApproachSequence approach_sequence(const MetricGraph& graph, const BoundaryPoint& target, int levels,
                                   const ApproachOptions& options = {});

}  // namespace qhlab
