#pragma once

// Inner and quasihyperbolic distances, geodesics and curve lengths.
//
// Graph queries snap their endpoints to nodes and always search from the
// smaller node id, so distances are exactly symmetric and the geodesic's
// k-length is the very number qh_distance returns.

#include <span>
#include <vector>

#include "qhlab/curve.hpp"
#include "qhlab/domain.hpp"
#include "qhlab/metric_graph.hpp"
#include "qhlab/shortest_path.hpp"

namespace qhlab {

/// delta at p; boundary-contact when p sits on the boundary, outside-domain
/// when it is outside.
double checked_delta(const Domain& domain, Vec2 p);

double d_length(std::span<const Vec2> polyline);

/// Integral of |dz|/delta along the polyline by composite Simpson per
/// segment, refined until the relative change is below rel_tol.
double qh_length(const Domain& domain, std::span<const Vec2> polyline, double rel_tol = 1e-6);

/// Slack allowed between discrete and continuous estimates at resolution h.
double slack_tau(double h, double delta_x, double delta_y);

double inner_distance(const MetricGraph& graph, Vec2 x, Vec2 y);
double qh_distance(const MetricGraph& graph, Vec2 x, Vec2 y);
ParametrizedCurve qh_geodesic(const MetricGraph& graph, Vec2 x, Vec2 y);
/// Shortest path for the d-weights, carried with its k table.
ParametrizedCurve inner_geodesic(const MetricGraph& graph, Vec2 x, Vec2 y);
Vec2 qh_parametrize(const ParametrizedCurve& curve, double t);

// Node-level forms of the above.
double graph_distance(const MetricGraph& graph, EdgeWeight weight, int a, int b);
ParametrizedCurve graph_geodesic(const MetricGraph& graph, EdgeWeight weight, int a, int b);
/// Curve along the tree path from the tree's source to `target`. When the
/// tree was grown with k-weights its labels become the k table unchanged.
ParametrizedCurve curve_from_tree(const MetricGraph& graph, const PathTree& tree, EdgeWeight weight, int target);
/// Stencil direction from node a to node b, or -1 if they are not linked.
int edge_direction(const MetricGraph& graph, int a, int b);

struct LowerBoundReport {
  int node_x = -1;
  int node_y = -1;
  double k_hat = 0.0;
  double lambda_hat = 0.0;
  /// Distance in the domain's ambient metric (Euclidean, or lambda_hat).
  double ambient = 0.0;
  double min_delta = 0.0;
  double bound_lambda = 0.0;  // log(1 + lambda/min delta)
  double bound_ambient = 0.0; // log(1 + d/min delta)
  double bound_ratio = 0.0;   // |log(delta_y/delta_x)|
  double geodesic_d_length = 0.0;
  double geodesic_k_length = 0.0;
  double bound_geodesic = 0.0;  // log(1 + l_d(geodesic)/min delta)
  double tau = 0.0;
  bool chain_ok = false;
  bool geodesic_ok = false;
  bool passed() const { return chain_ok && geodesic_ok; }
};

LowerBoundReport check_lower_bounds(const MetricGraph& graph, Vec2 x, Vec2 y);
LowerBoundReport check_lower_bounds_nodes(const MetricGraph& graph, int a, int b);

}  // namespace qhlab
