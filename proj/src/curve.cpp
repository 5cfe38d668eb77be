#include "qhlab/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qhlab/domain.hpp"
#include "qhlab/error.hpp"
#include "qhlab/metric.hpp"

namespace qhlab {

ParametrizedCurve::ParametrizedCurve(std::vector<Vec2> vertices, std::vector<double> k_table,
                                     std::vector<double> deltas)
    : vertices_(std::move(vertices)), k_table_(std::move(k_table)), deltas_(std::move(deltas)) {
  if (vertices_.empty()) throw Error(ErrorCode::kInvalidParameter, "curve needs at least one vertex");
  if (k_table_.size() != vertices_.size() || deltas_.size() != vertices_.size()) {
    throw Error(ErrorCode::kInvalidParameter, "curve tables do not match the vertex count");
  }
  if (k_table_.front() != 0.0) throw Error(ErrorCode::kInvalidParameter, "k table must start at 0");
  d_table_.assign(1, 0.0);
  lipschitz_ = *std::max_element(deltas_.begin(), deltas_.end());
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const double len = distance(vertices_[i], vertices_[i + 1]);
    const double k = k_table_[i + 1] - k_table_[i];
    if (k < 0.0) throw Error(ErrorCode::kInvalidParameter, "k table must be nondecreasing");
    d_table_.push_back(d_table_.back() + len);
    if (k > 0.0) lipschitz_ = std::max(lipschitz_, len / k);
  }
}

ParametrizedCurve ParametrizedCurve::from_segments(std::vector<Vec2> vertices, std::span<const double> k_segments,
                                                   std::vector<double> deltas) {
  if (k_segments.size() + 1 != vertices.size()) {
    throw Error(ErrorCode::kInvalidParameter, "curve tables do not match the vertex count");
  }
  std::vector<double> table(1, 0.0);
  for (double k : k_segments) table.push_back(table.back() + k);
  return ParametrizedCurve(std::move(vertices), std::move(table), std::move(deltas));
}
double ParametrizedCurve::max_delta() const {
  return deltas_.empty() ? 0.0 : *std::max_element(deltas_.begin(), deltas_.end());
}

double ParametrizedCurve::min_delta() const {
  return deltas_.empty() ? 0.0 : *std::min_element(deltas_.begin(), deltas_.end());
}

Vec2 ParametrizedCurve::at_k(double t) const {
  if (vertices_.empty()) throw Error(ErrorCode::kInvalidParameter, "empty curve");
  if (!(t >= 0.0) || t > k_length()) {
    throw Error(ErrorCode::kInvalidParameter, "parameter outside [0, k_length]");
  }
  if (t == k_length()) return vertices_.back();
  const auto it = std::upper_bound(k_table_.begin(), k_table_.end(), t);
  const std::size_t i = static_cast<std::size_t>(std::distance(k_table_.begin(), it)) - 1;
  const double span = k_table_[i + 1] - k_table_[i];
  const double s = span > 0.0 ? (t - k_table_[i]) / span : 0.0;
  return lerp(vertices_[i], vertices_[i + 1], s);
}

ParametrizedCurve ParametrizedCurve::reversed() const {
  std::vector<Vec2> verts(vertices_.rbegin(), vertices_.rend());
  std::vector<double> deltas(deltas_.rbegin(), deltas_.rend());
  std::vector<double> table;
  for (auto it = k_table_.rbegin(); it != k_table_.rend(); ++it) table.push_back(k_length() - *it);
  return ParametrizedCurve(std::move(verts), std::move(table), std::move(deltas));
}

ParametrizedCurve make_curve(const Domain& domain, std::vector<Vec2> vertices, double rel_tol) {
  std::vector<double> segs;
  std::vector<double> deltas;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    deltas.push_back(checked_delta(domain, vertices[i]));
    if (i + 1 < vertices.size()) {
      const std::array<Vec2, 2> seg{vertices[i], vertices[i + 1]};
      segs.push_back(qh_length(domain, seg, rel_tol));
    }
  }
  return ParametrizedCurve::from_segments(std::move(vertices), segs, std::move(deltas));
}

}  // namespace qhlab
