#include "qhlab/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qhlab/error.hpp"
#include "qhlab/metric.hpp"
#include "qhlab/sampling.hpp"
#include "qhlab/shortest_path.hpp"

namespace qhlab {

namespace {

// Largest k-distance from a vertex of `side` to the nearest vertex of `others`.
std::pair<double, int> side_excess(const MetricGraph& graph, const std::vector<int>& side, std::vector<int> others) {
  std::sort(others.begin(), others.end());
  others.erase(std::unique(others.begin(), others.end()), others.end());
  SearchLimits limits;
  for (int v : side) {
    if (!std::binary_search(others.begin(), others.end(), v)) limits.targets.push_back(v);
  }
  if (limits.targets.empty()) return {0.0, side.front()};
  const PathTree tree = shortest_paths(graph, EdgeWeight::kQuasihyperbolic, others, limits);
  double worst = 0.0;
  int worst_vertex = side.front();
  for (int v : limits.targets) {
    if (!tree.reached(v)) throw Error(ErrorCode::kInternal, "triangle vertex unreachable");
    if (tree.dist[v] > worst) {
      worst = tree.dist[v];
      worst_vertex = v;
    }
  }
  return {worst, worst_vertex};
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

ThinTriangle thin_triangle(const MetricGraph& graph, int x, int y, int z) {
  ThinTriangle tri;
  tri.nodes = {x, y, z};
  tri.tau = 4.0 * graph.resolution() / std::min({graph.delta(x), graph.delta(y), graph.delta(z)});

  const std::array<int, 1> from_x{x};
  const PathTree tx = shortest_paths(graph, EdgeWeight::kQuasihyperbolic, from_x, {{y, z}});
  const std::array<int, 1> from_y{y};
  const PathTree ty = shortest_paths(graph, EdgeWeight::kQuasihyperbolic, from_y, {{z}});
  if (!tx.reached(y) || !tx.reached(z) || !ty.reached(z)) {
    throw Error(ErrorCode::kInternal, "triangle vertices are disconnected in the graph");
  }
  const std::array<std::vector<int>, 3> sides = {tx.path_to(y), ty.path_to(z), tx.path_to(z)};
  for (int s = 0; s < 3; ++s) {
    const auto [excess, vertex] = side_excess(graph, sides[s], concat(sides[(s + 1) % 3], sides[(s + 2) % 3]));
    if (excess > tri.delta || tri.worst_vertex < 0) {
      tri.delta = excess;
      tri.worst_side = s;
      tri.worst_vertex = vertex;
    }
  }
  return tri;
}

double thin_triangle_delta(const MetricGraph& graph, Vec2 x, Vec2 y, Vec2 z) {
  return thin_triangle(graph, graph.snap(x), graph.snap(y), graph.snap(z)).delta;
}

HyperbolicityReport estimate_delta(const MetricGraph& graph, int n_samples, uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorCode::kInvalidParameter, "estimate_delta needs n_samples >= 1");
  HyperbolicityReport report;
  report.resolution = graph.resolution();
  report.sample_count = n_samples;
  for (int i = 0; i < n_samples; ++i) {
    const auto nodes = stratified_nodes(graph, 3, seed, SampleStream::kTriangles, 3 * static_cast<uint64_t>(i));
    const ThinTriangle tri = thin_triangle(graph, nodes[0], nodes[1], nodes[2]);
    report.per_triangle.push_back(tri.delta);
    if (i == 0 || tri.delta > report.delta_hat) {
      report.delta_hat = tri.delta;
      report.worst = tri;
    }
  }
  return report;
}

std::vector<RayApprox> build_rays(const MetricGraph& graph, int base, std::span<const BoundaryPoint> targets,
                                  int levels, const RayOptions& options) {
  if (levels < 3) throw Error(ErrorCode::kInvalidParameter, "rays need at least 3 levels");
  if (base < 0 || base >= graph.node_count()) throw Error(ErrorCode::kInvalidParameter, "base is not a graph node");
  ApproachOptions approach;
  approach.delta0 = options.delta0 > 0.0 ? options.delta0 : 0.5 * graph.delta(base);

  std::vector<RayApprox> rays;
  SearchLimits limits;
  for (const BoundaryPoint& target : targets) {
    const ApproachSequence seq = approach_sequence(graph, target, levels, approach);
    RayApprox ray;
    ray.base = base;
    ray.target = seq.target;
    ray.requested_levels = levels;
    ray.delta0 = seq.delta0;
    for (const ApproachLevel& lvl : seq.levels) {
      ray.schedule.push_back(lvl.target_delta);
      ray.approach_points.push_back(lvl.point);
      ray.endpoints.push_back(lvl.node);
      ray.endpoint_deltas.push_back(lvl.node_delta);
      limits.targets.push_back(lvl.node);
    }
    rays.push_back(std::move(ray));
  }
  const std::array<int, 1> sources{base};
  const PathTree tree = shortest_paths(graph, EdgeWeight::kQuasihyperbolic, sources, limits);
  for (RayApprox& ray : rays) {
    for (int node : ray.endpoints) {
      if (!tree.reached(node)) throw Error(ErrorCode::kInternal, "ray endpoint unreachable from the base");
      ray.segments.push_back(curve_from_tree(graph, tree, EdgeWeight::kQuasihyperbolic, node));
    }
    ray.landing_estimate = ray.endpoints.empty() ? graph.position(base) : graph.position(ray.endpoints.back());
  }
  return rays;
}

RayApprox build_ray(const MetricGraph& graph, int base, const BoundaryPoint& target, int levels,
                    const RayOptions& options) {
  auto rays = build_rays(graph, base, std::span<const BoundaryPoint>(&target, 1), levels, options);
  if (rays.front().levels() < 3) {
    throw Error(ErrorCode::kResolutionTooCoarse, "fewer than 3 ray levels reachable at this resolution");
  }
  return std::move(rays.front());
}

double ray_nesting_defect(const RayApprox& ray) {
  double worst = 0.0;
  for (std::size_t n = 0; n + 1 < ray.segments.size(); ++n) {
    const ParametrizedCurve& cur = ray.segments[n];
    const ParametrizedCurve& next = ray.segments[n + 1];
    const double limit = cur.k_length() - std::numbers::ln2;
    const auto verts = cur.vertices();
    const auto ks = cur.k_table();
    const auto nv = next.vertices();
    for (std::size_t i = 0; i < verts.size() && ks[i] <= limit; ++i) {
      double best = std::numeric_limits<double>::infinity();
      if (nv.size() == 1) best = distance(verts[i], nv[0]);
      for (std::size_t j = 0; j + 1 < nv.size(); ++j) {
        best = std::min(best, point_segment_distance(verts[i], nv[j], nv[j + 1]));
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

std::vector<double> ray_endpoint_distances(const MetricGraph& graph, const RayApprox& r1, const RayApprox& r2) {
  if (r1.base != r2.base) throw Error(ErrorCode::kInvalidParameter, "rays have different base points");
  if (r1.levels() != r2.levels()) throw Error(ErrorCode::kInvalidParameter, "rays have different level counts");
  std::vector<double> out;
  for (int n = 0; n < r1.levels(); ++n) {
    out.push_back(graph_distance(graph, EdgeWeight::kQuasihyperbolic, r1.endpoints[n], r2.endpoints[n]));
  }
  return out;
}

bool rays_equivalent(const MetricGraph& graph, const RayApprox& r1, const RayApprox& r2, double bound) {
  if (r1.base != r2.base) throw Error(ErrorCode::kInvalidParameter, "rays have different base points");
  if (r1.levels() != r2.levels()) throw Error(ErrorCode::kInvalidParameter, "rays have different level counts");
  // Deepest level first: distinct rays separate there.
  for (int n = r1.levels() - 1; n >= 0; --n) {
    if (graph_distance(graph, EdgeWeight::kQuasihyperbolic, r1.endpoints[n], r2.endpoints[n]) > bound) return false;
  }
  return true;
}

double equivalence_bound(double delta_hat) { return 4.0 * delta_hat + 2.0; }

Landing landing_point(const MetricGraph& graph, const RayApprox& ray) {
  Landing out;
  const int levels = ray.levels();
  if (levels == 0) {
    out.deepest = out.extrapolated = graph.position(ray.base);
    out.point = graph.domain().project(out.deepest, ray.target.corridor);
    return out;
  }
  std::vector<Vec2> ends;
  for (int node : ray.endpoints) ends.push_back(graph.position(node));
  for (int n = 1; n < levels; ++n) out.gaps.push_back(distance(ends[n], ends[n - 1]));
  out.deepest = ends.back();
  out.extrapolated = levels >= 2 ? ends.back() + (ends.back() - ends[levels - 2]) : ends.back();
  out.point = graph.domain().project(out.extrapolated, ray.target.corridor);

  bool cauchy = levels >= 3;
  const double slack = 2.0 * graph.resolution();
  for (std::size_t n = 1; n < out.gaps.size(); ++n) {
    if (out.gaps[n] > 0.75 * out.gaps[n - 1] + slack) cauchy = false;
  }
  out.status = cauchy ? LandingStatus::kLanded : LandingStatus::kNoLandingDetected;
  return out;
}

std::string to_string(LandingStatus status) {
  return status == LandingStatus::kLanded ? "landed" : "no-landing-detected";
}

}  // namespace qhlab
