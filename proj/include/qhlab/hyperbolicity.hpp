#pragma once

// Thin-triangle estimates of the Gromov hyperbolicity of (Omega, k), and
// desk-scale geodesic rays: nested geodesics from a base node to approach
// sequences of a boundary point.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qhlab/approach.hpp"
#include "qhlab/curve.hpp"
#include "qhlab/metric_graph.hpp"

namespace qhlab {

struct ThinTriangle {
  std::array<int, 3> nodes{-1, -1, -1};
  /// Max over sides of the max over side vertices of the k-distance to the
  /// vertices of the other two sides.
  double delta = 0.0;
  double tau = 0.0;
  int worst_side = 0;  // 0: xy, 1: yz, 2: xz
  int worst_vertex = -1;
};

ThinTriangle thin_triangle(const MetricGraph& graph, int x, int y, int z);
double thin_triangle_delta(const MetricGraph& graph, Vec2 x, Vec2 y, Vec2 z);

struct HyperbolicityReport {
  double delta_hat = 0.0;
  int sample_count = 0;
  double resolution = 0.0;
  ThinTriangle worst;
  std::vector<double> per_triangle;
};

/// Max thinness over n seeded triangles with delta-stratified vertices.
/// Triangle i depends only on (seed, i).
HyperbolicityReport estimate_delta(const MetricGraph& graph, int n_samples, uint64_t seed);

struct RayOptions {
  /// Level-0 depth; 0 picks delta(base) / 2.
  double delta0 = 0.0;
};

struct RayApprox {
  int base = -1;
  BoundaryPoint target;
  std::vector<double> schedule;  // delta_n of the completed levels
  std::vector<Vec2> approach_points;
  std::vector<int> endpoints;
  std::vector<double> endpoint_deltas;
  std::vector<ParametrizedCurve> segments;
  Vec2 landing_estimate;  // deepest endpoint
  int requested_levels = 0;
  double delta0 = 0.0;

  int levels() const { return static_cast<int>(endpoints.size()); }
  bool truncated() const { return levels() < requested_levels; }
};

/// resolution-too-coarse when fewer than 3 levels are reachable.
RayApprox build_ray(const MetricGraph& graph, int base, const BoundaryPoint& target, int levels,
                    const RayOptions& options = {});
/// Same as build_ray for each target, sharing one shortest-path tree from
/// the base. Rays with fewer than 3 levels are returned truncated, not thrown.
std::vector<RayApprox> build_rays(const MetricGraph& graph, int base, std::span<const BoundaryPoint> targets,
                                  int levels, const RayOptions& options = {});

/// Largest Euclidean distance from the vertices of segment n (those at
/// k <= k_n - log 2) to segment n + 1, over n.
double ray_nesting_defect(const RayApprox& ray);

/// k-distance between the level-n endpoints of two rays.
std::vector<double> ray_endpoint_distances(const MetricGraph& graph, const RayApprox& r1, const RayApprox& r2);
/// True iff every level's endpoint k-distance is <= bound. Rays must share
/// the base and level count (invalid-parameter otherwise).
bool rays_equivalent(const MetricGraph& graph, const RayApprox& r1, const RayApprox& r2, double bound);
double equivalence_bound(double delta_hat);

enum class LandingStatus { kLanded, kNoLandingDetected };

struct Landing {
  LandingStatus status = LandingStatus::kNoLandingDetected;
  BoundaryPoint point;    // projection of the extrapolated endpoint
  Vec2 deepest;           // raw deepest endpoint
  Vec2 extrapolated;      // e_L + (e_L - e_{L-1})
  std::vector<double> gaps;  // |e_n - e_{n-1}|
};

/// Landing estimate; Landed when successive endpoint gaps shrink
/// geometrically (gap_n <= 0.75 gap_{n-1} + 2h).
Landing landing_point(const MetricGraph& graph, const RayApprox& ray);

std::string to_string(LandingStatus status);

}  // namespace qhlab
