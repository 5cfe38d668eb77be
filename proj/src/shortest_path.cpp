#include "qhlab/shortest_path.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <utility>

#include "qhlab/error.hpp"

namespace qhlab {

std::vector<int> PathTree::path_to(int node) const {
  if (!reached(node)) throw Error(ErrorCode::kInternal, "node not reached by the search");
  std::vector<int> path;
  for (int v = node; v >= 0; v = parent[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

PathTree shortest_paths(const MetricGraph& graph, EdgeWeight weight, std::span<const int> sources,
                        const SearchLimits& limits) {
  const int n = graph.node_count();
  const int conn = graph.connectivity();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  PathTree tree;
  tree.dist.assign(n, kInf);
  tree.parent.assign(n, -1);
  tree.source.assign(n, -1);
  std::vector<char> settled(n, 0);
  std::vector<char> is_target(limits.targets.empty() ? 0 : n, 0);
  int targets_left = 0;
  for (int t : limits.targets) {
    if (t < 0 || t >= n) throw Error(ErrorCode::kInvalidParameter, "target is not a graph node");
    if (!is_target[t]) {
      is_target[t] = 1;
      ++targets_left;
    }
  }

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (int s : sources) {
    if (s < 0 || s >= n) throw Error(ErrorCode::kInvalidParameter, "source is not a graph node");
    if (tree.dist[s] == 0.0) continue;
    tree.dist[s] = 0.0;
    tree.source[s] = s;
    heap.emplace(0.0, s);
  }

  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (settled[v] || d > tree.dist[v]) continue;
    if (d > limits.radius) break;
    settled[v] = 1;
    if (!is_target.empty() && is_target[v] && --targets_left == 0) break;
    for (int dir = 0; dir < conn; ++dir) {
      const int u = graph.neighbor(v, dir);
      if (u < 0 || settled[u]) continue;
      const double w = weight == EdgeWeight::kLength ? graph.d_weight(dir) : graph.k_weight(v, dir);
      const double nd = d + w;
      if (nd < tree.dist[u]) {
        tree.dist[u] = nd;
        tree.parent[u] = v;
        tree.source[u] = tree.source[v];
        heap.emplace(nd, u);
      } else if (nd == tree.dist[u] && v < tree.parent[u]) {
        tree.parent[u] = v;
        tree.source[u] = tree.source[v];
      }
    }
  }
  // Unsettled nodes keep tentative labels; only settled ones are final.
  for (int v = 0; v < n; ++v) {
    if (!settled[v]) {
      tree.dist[v] = kInf;
      tree.parent[v] = -1;
      tree.source[v] = -1;
    }
  }
  return tree;
}

}  // namespace qhlab
