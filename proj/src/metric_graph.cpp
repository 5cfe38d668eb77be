#include "qhlab/metric_graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qhlab/error.hpp"
#include "qhlab/quadrature.hpp"

namespace qhlab {

namespace {

constexpr std::array<GridOffset, 32> kStencil = {{
    {1, 0},   {-1, 0},  {0, 1},   {0, -1},  {1, 1},   {-1, -1}, {-1, 1},  {1, -1},
    {2, 1},   {-2, -1}, {1, 2},   {-1, -2}, {-1, 2},  {1, -2},  {-2, 1},  {2, -1},
    {3, 1},   {-3, -1}, {1, 3},   {-1, -3}, {-1, 3},  {1, -3},  {-3, 1},  {3, -1},
    {3, 2},   {-3, -2}, {2, 3},   {-2, -3}, {-2, 3},  {2, -3},  {-3, 2},  {3, -2},
}};

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSnapWindow = 8;

}  // namespace

std::span<const GridOffset> stencil(int connectivity) {
  if (connectivity != 8 && connectivity != 16 && connectivity != 32) {
    throw Error(ErrorCode::kInvalidParameter, "connectivity must be 8, 16 or 32");
  }
  return std::span<const GridOffset>(kStencil.data(), static_cast<std::size_t>(connectivity));
}

MetricGraph MetricGraph::build(const Domain& domain, double h, int connectivity) {
  GraphOptions options;
  options.connectivity = connectivity;
  return build(domain, h, options);
}

MetricGraph MetricGraph::build(const Domain& domain, double h, const GraphOptions& options) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorCode::kInvalidParameter, "resolution must be positive");
  const auto offsets = stencil(options.connectivity);

  MetricGraph g;
  g.domain_ = std::make_shared<const Domain>(domain);
  g.h_ = h;
  g.connectivity_ = options.connectivity;
  g.offsets_.assign(offsets.begin(), offsets.end());
  for (const auto& o : g.offsets_) g.d_weights_.push_back(std::hypot(o.dx, o.dy) * h);

  const BoundingBox& box = domain.bounding_box();
  g.origin_ = {box.x_min, box.y_min};
  g.columns_total_ = static_cast<int>(std::floor(box.width() / h + 1e-9)) + 1;
  g.rows_total_ = static_cast<int>(std::floor(box.height() / h + 1e-9)) + 1;
  g.stride_ = g.columns_total_ + 2 * kPad;
  g.cells_.assign(static_cast<std::size_t>(g.stride_) * (g.rows_total_ + 2 * kPad), -1);

  const double core_floor = 0.25 * h;
  for (int r = 0; r < g.rows_total_; ++r) {
    for (int c = 0; c < g.columns_total_; ++c) {
      const Vec2 p{g.origin_.x + c * h, g.origin_.y + r * h};
      if (!domain.contains(p)) continue;
      const double delta = domain.boundary_distance(p);
      if (delta < core_floor) {
        g.fringe_.push_back({p, delta});
        continue;
      }
      g.cells_[static_cast<std::size_t>(r + kPad) * g.stride_ + c + kPad] = static_cast<int32_t>(g.positions_.size());
      g.positions_.push_back(p);
      g.deltas_.push_back(delta);
      g.columns_.push_back(c);
      g.rows_.push_back(r);
    }
  }
  if (g.positions_.empty()) {
    throw Error(ErrorCode::kResolutionTooCoarse, "no grid node has delta >= h/4 at this resolution");
  }

  const int n = g.node_count();
  const int conn = g.connectivity_;
  g.k_weights_.assign(static_cast<std::size_t>(n) * conn, kInf);
  for (int node = 0; node < n; ++node) {
    const Vec2 p = g.positions_[node];
    const double dp = g.deltas_[node];
    for (int dir = 0; dir < conn; dir += 2) {
      const GridOffset o = g.offsets_[dir];
      const int other = g.cells_[g.cell_index(node) + o.dy * g.stride_ + o.dx];
      if (other < 0) continue;
      const Vec2 q = g.positions_[other];
      const double len = g.d_weights_[dir];
      if (!(len < std::max(dp, g.deltas_[other])) && !domain.segment_inside(p, q)) continue;
      const auto integrand = [&](double s) { return len / domain.boundary_distance(lerp(p, q, s)); };
      const double w = adaptive_simpson(integrand, 0.0, 1.0, options.edge_rel_tol).value;
      g.k_weights_[static_cast<std::size_t>(node) * conn + dir] = w;
      g.k_weights_[static_cast<std::size_t>(other) * conn + (dir ^ 1)] = w;
      ++g.edge_count_;
    }
  }
  return g;
}

int MetricGraph::node_at(int column, int row) const {
  if (column < 0 || row < 0 || column >= columns_total_ || row >= rows_total_) return -1;
  return cells_[static_cast<std::size_t>(row + kPad) * stride_ + column + kPad];
}

std::optional<int> MetricGraph::find_node(Vec2 p) const {
  const int c = static_cast<int>(std::lround((p.x - origin_.x) / h_));
  const int r = static_cast<int>(std::lround((p.y - origin_.y) / h_));
  const int node = node_at(c, r);
  if (node < 0 || distance(positions_[node], p) > 1e-3 * h_) return std::nullopt;
  return node;
}

std::optional<int> MetricGraph::try_snap(Vec2 p) const {
  if (!domain_->contains(p)) throw Error(ErrorCode::kOutsideDomain, "point is not inside the domain");
  if (auto exact = find_node(p); exact && distance(positions_[*exact], p) == 0.0) return exact;
  const int c0 = static_cast<int>(std::lround((p.x - origin_.x) / h_));
  const int r0 = static_cast<int>(std::lround((p.y - origin_.y) / h_));
  std::vector<std::pair<double, int>> candidates;
  for (int r = r0 - kSnapWindow; r <= r0 + kSnapWindow; ++r) {
    for (int c = c0 - kSnapWindow; c <= c0 + kSnapWindow; ++c) {
      const int node = node_at(c, r);
      if (node >= 0) candidates.emplace_back((positions_[node] - p).norm2(), node);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (const auto& [d2, node] : candidates) {
    if (d2 == 0.0 || domain_->segment_inside(p, positions_[node])) return node;
  }
  return std::nullopt;
}

int MetricGraph::snap(Vec2 p) const {
  if (auto node = try_snap(p)) return *node;
  throw Error(ErrorCode::kResolutionTooCoarse, "no graph node visible near the point");
}

}  // namespace qhlab
