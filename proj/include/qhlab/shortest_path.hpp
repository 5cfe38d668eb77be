#pragma once

// Dijkstra over a MetricGraph. The heap orders by (distance, node id), and a
// node's parent is the smallest-id predecessor achieving its distance, so the
// resulting trees do not depend on anything but the graph and the sources.

#include <limits>
#include <span>
#include <vector>

#include "qhlab/metric_graph.hpp"

namespace qhlab {

enum class EdgeWeight { kLength, kQuasihyperbolic };

struct SearchLimits {
  /// Stop once all of these are settled (empty: no target stop).
  std::vector<int> targets;
  /// Stop once the frontier passes this distance.
  double radius = std::numeric_limits<double>::infinity();
};

struct PathTree {
  std::vector<double> dist;
  std::vector<int> parent;  // -1 for sources and unreached nodes
  std::vector<int> source;  // source each settled node descends from, or -1

  bool reached(int node) const { return dist[node] < std::numeric_limits<double>::infinity(); }
  /// Nodes from the tree's source to `node`, inclusive.
  std::vector<int> path_to(int node) const;
};

PathTree shortest_paths(const MetricGraph& graph, EdgeWeight weight, std::span<const int> sources,
                        const SearchLimits& limits = {});

}  // namespace qhlab
