#pragma once

// Grid discretization of a domain. Nodes are the grid points at spacing h
// with delta >= h/4; each node links to its stencil neighbors when the
// connecting segment stays inside the domain. Every edge carries its
// Euclidean length and its quasihyperbolic length (integral of 1/delta).

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qhlab/domain.hpp"

namespace qhlab {

struct GridOffset {
  int dx = 0;
  int dy = 0;
};

/// Stencil directions for 8, 16 or 32 neighbors. Directions come in
/// opposite pairs: direction d and d ^ 1 are negatives of each other.
std::span<const GridOffset> stencil(int connectivity);

struct FringePoint {
  Vec2 position;
  double delta = 0.0;
};

struct GraphOptions {
  int connectivity = 16;
  /// Relative accuracy of each edge's 1/delta integral.
  double edge_rel_tol = 1e-12;
};

class MetricGraph {
 public:
  static MetricGraph build(const Domain& domain, double h, int connectivity = 16);
  static MetricGraph build(const Domain& domain, double h, const GraphOptions& options);

  const Domain& domain() const { return *domain_; }
  double resolution() const { return h_; }
  int connectivity() const { return connectivity_; }
  int node_count() const { return static_cast<int>(positions_.size()); }

  Vec2 position(int node) const { return positions_[node]; }
  double delta(int node) const { return deltas_[node]; }
  std::span<const Vec2> positions() const { return positions_; }
  std::span<const double> deltas() const { return deltas_; }
  std::span<const FringePoint> fringe() const { return fringe_; }

  /// Neighbor of `node` in stencil direction `dir`, or -1 if there is no edge.
  int neighbor(int node, int dir) const {
    const GridOffset o = offsets_[dir];
    const int other = cells_[cell_index(node) + o.dy * stride_ + o.dx];
    return other >= 0 && std::isfinite(k_weights_[static_cast<std::size_t>(node) * connectivity_ + dir]) ? other : -1;
  }
  /// Quasihyperbolic length of the edge; +inf when the edge does not exist.
  double k_weight(int node, int dir) const { return k_weights_[static_cast<std::size_t>(node) * connectivity_ + dir]; }
  double d_weight(int dir) const { return d_weights_[dir]; }
  GridOffset offset(int dir) const { return offsets_[dir]; }
  int edge_count() const { return edge_count_; }

  /// Grid column/row of a node.
  int column(int node) const { return columns_[node]; }
  int row(int node) const { return rows_[node]; }
  /// Node at grid column/row, or -1.
  int node_at(int column, int row) const;
  /// Node whose position is within h/1000 of p, if any.
  std::optional<int> find_node(Vec2 p) const;

  /// Nearest node that sees p along a straight segment inside the domain.
  /// Throws outside-domain if p is not in the domain and
  /// resolution-too-coarse if no node is visible nearby.
  int snap(Vec2 p) const;
  std::optional<int> try_snap(Vec2 p) const;

 private:
  MetricGraph() = default;
  std::size_t cell_index(int node) const {
    return static_cast<std::size_t>(rows_[node] + kPad) * stride_ + columns_[node] + kPad;
  }

  static constexpr int kPad = 3;

  std::shared_ptr<const Domain> domain_;
  double h_ = 0.0;
  int connectivity_ = 16;
  int columns_total_ = 0;
  int rows_total_ = 0;
  int stride_ = 0;
  Vec2 origin_;
  std::vector<int32_t> cells_;  // padded grid -> node id or -1
  std::vector<Vec2> positions_;
  std::vector<double> deltas_;
  std::vector<int32_t> columns_;
  std::vector<int32_t> rows_;
  std::vector<double> k_weights_;
  std::vector<GridOffset> offsets_;
  std::vector<double> d_weights_;
  std::vector<FringePoint> fringe_;
  int edge_count_ = 0;
};

}  // namespace qhlab
