#include "qhlab/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qhlab/error.hpp"
#include "qhlab/quadrature.hpp"

namespace qhlab {

double checked_delta(const Domain& domain, Vec2 p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorCode::kOutsideDomain, "non-finite point");
  const double delta = domain.boundary_distance(p);
  if (delta <= domain.tolerance()) throw Error(ErrorCode::kBoundaryContact, "vertex lies on the boundary");
  if (!domain.contains(p)) throw Error(ErrorCode::kOutsideDomain, "vertex is outside the domain");
  return delta;
}

double d_length(std::span<const Vec2> polyline) {
  double total = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) total += distance(polyline[i - 1], polyline[i]);
  return total;
}

double qh_length(const Domain& domain, std::span<const Vec2> polyline, double rel_tol) {
  if (polyline.empty()) throw Error(ErrorCode::kInvalidParameter, "curve needs at least one vertex");
  for (const Vec2& p : polyline) checked_delta(domain, p);
  double total = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const Vec2 a = polyline[i - 1];
    const Vec2 b = polyline[i];
    const double len = distance(a, b);
    if (len == 0.0) continue;
    if (!domain.segment_inside(a, b)) throw Error(ErrorCode::kOutsideDomain, "segment leaves the domain");
    const auto integrand = [&](double s) { return len / domain.boundary_distance(lerp(a, b, s)); };
    total += composite_simpson(integrand, 0.0, 1.0, rel_tol).value;
  }
  return total;
}

double slack_tau(double h, double delta_x, double delta_y) { return 4.0 * h / std::min(delta_x, delta_y); }

int edge_direction(const MetricGraph& graph, int a, int b) {
  const int dx = graph.column(b) - graph.column(a);
  const int dy = graph.row(b) - graph.row(a);
  for (int dir = 0; dir < graph.connectivity(); ++dir) {
    const GridOffset o = graph.offset(dir);
    if (o.dx == dx && o.dy == dy) return graph.neighbor(a, dir) == b ? dir : -1;
  }
  return -1;
}

ParametrizedCurve curve_from_tree(const MetricGraph& graph, const PathTree& tree, EdgeWeight weight, int target) {
  const std::vector<int> path = tree.path_to(target);
  std::vector<Vec2> verts;
  std::vector<double> deltas;
  std::vector<double> table;
  verts.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    verts.push_back(graph.position(path[i]));
    deltas.push_back(graph.delta(path[i]));
    if (weight == EdgeWeight::kQuasihyperbolic) {
      table.push_back(tree.dist[path[i]]);
    } else if (i == 0) {
      table.push_back(0.0);
    } else {
      table.push_back(table.back() + graph.k_weight(path[i - 1], edge_direction(graph, path[i - 1], path[i])));
    }
  }
  return ParametrizedCurve(std::move(verts), std::move(table), std::move(deltas));
}

double graph_distance(const MetricGraph& graph, EdgeWeight weight, int a, int b) {
  if (a == b) return 0.0;
  const int s = std::min(a, b);
  const int t = std::max(a, b);
  const std::array<int, 1> sources{s};
  const PathTree tree = shortest_paths(graph, weight, sources, {{t}});
  if (!tree.reached(t)) throw Error(ErrorCode::kInternal, "snapped endpoints are disconnected in the graph");
  return tree.dist[t];
}

ParametrizedCurve graph_geodesic(const MetricGraph& graph, EdgeWeight weight, int a, int b) {
  const int s = std::min(a, b);
  const int t = std::max(a, b);
  const std::array<int, 1> sources{s};
  const PathTree tree = shortest_paths(graph, weight, sources, {{t}});
  if (!tree.reached(t)) throw Error(ErrorCode::kInternal, "snapped endpoints are disconnected in the graph");
  ParametrizedCurve curve = curve_from_tree(graph, tree, weight, t);
  return a == s ? curve : curve.reversed();
}

double inner_distance(const MetricGraph& graph, Vec2 x, Vec2 y) {
  return graph_distance(graph, EdgeWeight::kLength, graph.snap(x), graph.snap(y));
}

double qh_distance(const MetricGraph& graph, Vec2 x, Vec2 y) {
  return graph_distance(graph, EdgeWeight::kQuasihyperbolic, graph.snap(x), graph.snap(y));
}

ParametrizedCurve qh_geodesic(const MetricGraph& graph, Vec2 x, Vec2 y) {
  return graph_geodesic(graph, EdgeWeight::kQuasihyperbolic, graph.snap(x), graph.snap(y));
}

ParametrizedCurve inner_geodesic(const MetricGraph& graph, Vec2 x, Vec2 y) {
  return graph_geodesic(graph, EdgeWeight::kLength, graph.snap(x), graph.snap(y));
}

Vec2 qh_parametrize(const ParametrizedCurve& curve, double t) { return curve.at_k(t); }

LowerBoundReport check_lower_bounds(const MetricGraph& graph, Vec2 x, Vec2 y) {
  return check_lower_bounds_nodes(graph, graph.snap(x), graph.snap(y));
}

LowerBoundReport check_lower_bounds_nodes(const MetricGraph& graph, int a, int b) {
  LowerBoundReport r;
  r.node_x = a;
  r.node_y = b;
  const double dx = graph.delta(a);
  const double dy = graph.delta(b);
  r.min_delta = std::min(dx, dy);
  r.tau = slack_tau(graph.resolution(), dx, dy);

  const ParametrizedCurve geodesic = graph_geodesic(graph, EdgeWeight::kQuasihyperbolic, a, b);
  r.k_hat = geodesic.k_length();
  r.lambda_hat = graph_distance(graph, EdgeWeight::kLength, a, b);
  r.ambient = graph.domain().ambient_metric() == AmbientMetric::kInner
                  ? r.lambda_hat
                  : distance(graph.position(a), graph.position(b));
  r.bound_lambda = std::log1p(r.lambda_hat / r.min_delta);
  r.bound_ambient = std::log1p(r.ambient / r.min_delta);
  r.bound_ratio = std::abs(std::log(dy / dx));
  r.geodesic_d_length = geodesic.d_length();
  r.geodesic_k_length = geodesic.k_length();
  r.bound_geodesic = std::log1p(r.geodesic_d_length / r.min_delta);

  r.chain_ok = r.k_hat >= r.bound_lambda - r.tau && r.bound_lambda >= r.bound_ambient - r.tau &&
               r.bound_ambient >= r.bound_ratio - r.tau;
  r.geodesic_ok = r.geodesic_k_length >= r.bound_geodesic - r.tau;
  return r;
}

}  // namespace qhlab
