#pragma once

// Polylines carrying both their Euclidean arclength and quasihyperbolic
// length tables. The quasihyperbolic parametrization g is linear
// interpolation in the k table, so k-length of g on [0, t] is t.

#include <span>
#include <vector>

#include "qhlab/vec2.hpp"

namespace qhlab {

class Domain;

class ParametrizedCurve {
 public:
  ParametrizedCurve() = default;
  /// `k_table[i]` is the quasihyperbolic length up to vertex i; it must
  /// start at 0 and be nondecreasing.
  ParametrizedCurve(std::vector<Vec2> vertices, std::vector<double> k_table, std::vector<double> deltas);
  static ParametrizedCurve from_segments(std::vector<Vec2> vertices, std::span<const double> k_segments,
                                         std::vector<double> deltas);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const double> d_table() const { return d_table_; }
  std::span<const double> k_table() const { return k_table_; }
  /// delta at each vertex.
  std::span<const double> deltas() const { return deltas_; }
  double d_length() const { return d_table_.empty() ? 0.0 : d_table_.back(); }
  double k_length() const { return k_table_.empty() ? 0.0 : k_table_.back(); }
  double max_delta() const;
  double min_delta() const;
  /// Lipschitz constant of g with respect to the Euclidean distance: the larger
  /// of max delta over the vertices and the steepest segment ratio
  /// (d-length / k-length), which can exceed the vertex values by a
  /// fraction of an edge.
  double lipschitz() const { return lipschitz_; }
  bool empty() const { return vertices_.empty(); }
  std::size_t size() const { return vertices_.size(); }

  /// g(t) for 0 <= t <= k_length; invalid-parameter outside that range.
  Vec2 at_k(double t) const;
  ParametrizedCurve reversed() const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<double> d_table_;
  std::vector<double> k_table_;
  std::vector<double> deltas_;
  double lipschitz_ = 0.0;
};

/// Builds the tables for an arbitrary polyline inside the domain, using
/// qh_length per segment.
ParametrizedCurve make_curve(const Domain& domain, std::vector<Vec2> vertices, double rel_tol = 1e-8);

}  // namespace qhlab
