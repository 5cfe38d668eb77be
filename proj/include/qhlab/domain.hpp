#pragma once

// Bounded planar domains: membership, distance to the boundary, boundary
// parametrization and sampling. Everything here is immutable after
// construction and safe to query from several threads.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qhlab/vec2.hpp"

namespace qhlab {

enum class AmbientMetric { kEuclidean, kInner };

std::string to_string(AmbientMetric metric);

struct BoundingBox {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double diameter() const { return std::hypot(width(), height()); }
};

struct Disk {
  Vec2 center;
  double radius = 1.0;
};

struct Rectangle {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

/// loops[0] is the outer boundary, the remaining loops are holes. Loops must
/// be simple; orientation is normalized on construction.
struct PolygonWithHoles {
  std::vector<std::vector<Vec2>> loops;
};

/// Unit square minus the slits {2^-j} x [0, 1/2], j = 1..teeth.
struct Comb {
  int teeth = 1;
};

using DomainShape = std::variant<Disk, Rectangle, PolygonWithHoles, Comb>;

/// A line segment or circular arc of the boundary. Traversal keeps the domain
/// on the left, so `inward_normal_at` points into the domain.
struct BoundaryPrimitive {
  enum class Kind { kSegment, kArc };

  Kind kind = Kind::kSegment;
  Vec2 a;
  Vec2 b;
  Vec2 normal;  // segments only; explicit so zero-length tip caps have one
  Vec2 center;  // arcs only
  double radius = 0.0;
  double theta0 = 0.0;
  double sweep = 0.0;  // counter-clockwise
  int loop = 0;

  double length() const;
  Vec2 point_at(double s) const;
  Vec2 inward_normal_at(double s) const;
  /// Arclength offset of the point of this primitive closest to p.
  double closest_offset(Vec2 p) const;
  double distance(Vec2 p) const;
};

/// Where a boundary point sits on the boundary parametrization.
struct BoundaryCoordinate {
  int primitive = 0;
  double offset = 0.0;     // within the primitive
  double arclength = 0.0;  // global, loops concatenated in order
};

/// A point of the metric boundary. The corridor is the unit direction along
/// which the point is approached from inside; it separates the two sides of a
/// slit under the inner metric.
struct BoundaryPoint {
  Vec2 position;
  std::optional<Vec2> corridor;
  std::optional<BoundaryCoordinate> coordinate;
};

struct BoundaryLoop {
  int first_primitive = 0;
  int primitive_count = 0;
  double start_arclength = 0.0;
  double length = 0.0;
};

class Domain {
 public:
  static Domain disk(Vec2 center, double radius, AmbientMetric metric = AmbientMetric::kEuclidean);
  static Domain rectangle(double x_min, double x_max, double y_min, double y_max,
                          AmbientMetric metric = AmbientMetric::kEuclidean);
  static Domain polygon(PolygonWithHoles polygon, AmbientMetric metric = AmbientMetric::kEuclidean);
  static Domain comb(int teeth, AmbientMetric metric = AmbientMetric::kInner);

  const DomainShape& shape() const { return shape_; }
  std::string kind_name() const;
  AmbientMetric ambient_metric() const { return metric_; }
  Domain with_ambient_metric(AmbientMetric metric) const;

  const BoundingBox& bounding_box() const { return bbox_; }
  /// Euclidean diameter of the closure.
  double diameter() const { return diameter_; }
  /// Geometric tolerance for on-boundary decisions (1e-12 * diameter).
  double tolerance() const { return tol_; }

  std::span<const BoundaryPrimitive> primitives() const { return primitives_; }
  std::span<const BoundaryLoop> loops() const { return loops_; }
  double boundary_length() const { return boundary_length_; }
  /// Arclength where boundary_sample starts.
  double arclength_origin() const { return arclength_origin_; }

  bool contains(Vec2 p) const;
  /// Minimum distance from p to the boundary primitives; no membership check.
  double boundary_distance(Vec2 p) const;
  /// delta_Omega(p); throws outside-domain when p is not in the domain.
  double dist_to_boundary(Vec2 p) const;
  /// True iff the closed segment [a, b] lies in the open domain.
  bool segment_inside(Vec2 a, Vec2 b) const;

  /// Largest delta over the domain, estimated on a fixed 257x257 lattice.
  double max_delta_estimate() const { return max_delta_; }

  /// Boundary point at a global arclength (wrapped into [0, length)).
  BoundaryPoint point_at_arclength(double s) const;
  /// Nearest boundary point; among equidistant primitives the one whose
  /// inward normal best matches the corridor hint wins.
  BoundaryPoint project(Vec2 p, std::optional<Vec2> corridor_hint = std::nullopt) const;
  /// Fills in the coordinate and corridor of a user-supplied boundary point.
  BoundaryPoint resolve(const BoundaryPoint& p) const;
  /// Unit direction pointing into the domain from p.
  Vec2 inward_direction(const BoundaryPoint& p) const;

  /// Distance along the boundary. Points on different loops fall back to
  /// their Euclidean distance.
  double arclength_distance(const BoundaryPoint& p, const BoundaryPoint& q) const;
  /// Identity in the metric boundary of (Omega, d): positions must agree and,
  /// for the inner metric, the corridors must not be opposite.
  bool same_boundary_point(const BoundaryPoint& p, const BoundaryPoint& q) const;

 private:
  Domain(DomainShape shape, AmbientMetric metric);
  void finalize();
  /// Inward normal, bisecting the two normals at a vertex between primitives.
  Vec2 corridor_at(int primitive, double offset) const;
  bool inside_region(Vec2 p) const;

  DomainShape shape_;
  AmbientMetric metric_ = AmbientMetric::kEuclidean;
  BoundingBox bbox_;
  double diameter_ = 0.0;
  double tol_ = 0.0;
  std::vector<BoundaryPrimitive> primitives_;
  std::vector<BoundaryLoop> loops_;
  std::vector<double> primitive_start_;  // global arclength of each primitive
  double boundary_length_ = 0.0;
  double arclength_origin_ = 0.0;
  double max_delta_ = 0.0;
};

Domain make_comb_domain(int teeth);
bool contains(const Domain& domain, Vec2 p);
double dist_to_boundary(const Domain& domain, Vec2 p);
/// n points spread evenly by arclength. Both sides of a slit are separate
/// primitives, so they are sampled separately with opposite corridors.
std::vector<BoundaryPoint> boundary_sample(const Domain& domain, int n);

}  // namespace qhlab
