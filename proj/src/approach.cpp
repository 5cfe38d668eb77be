#include "qhlab/approach.hpp"

#include <algorithm>
#include <cmath>

#include "qhlab/error.hpp"
#include "qhlab/sampling.hpp"

namespace qhlab {

namespace {

bool within_factor_two(double value, double reference) { return value >= 0.5 * reference && value <= 2.0 * reference; }

}  // namespace

ApproachSequence approach_sequence(const MetricGraph& graph, const BoundaryPoint& target, int levels,
                                   const ApproachOptions& options) {
  if (levels < 1) throw Error(ErrorCode::kInvalidParameter, "approach needs at least one level");
  const Domain& domain = graph.domain();
  const double h = graph.resolution();

  ApproachSequence seq;
  seq.target = domain.resolve(target);
  seq.requested = levels;
  const Vec2 base = seq.target.position;
  const Vec2 normal = domain.inward_direction(seq.target);

  // Deepest admissible level-0 depth along a direction, or 0. The jitter
  // extremes must be admissible too.
  const auto admissible = [&](Vec2 p, double d) {
    return domain.contains(p) && within_factor_two(domain.boundary_distance(p), d);
  };
  const auto reach = [&](Vec2 dir) {
    double d = options.delta0 > 0.0 ? options.delta0 : 0.5 * domain.max_delta_estimate();
    while (d >= 2.0 * h) {
      const Vec2 p = base + dir * d;
      const Vec2 side = perp(dir) * std::min(options.jitter, 0.25 * d);
      if (admissible(p, d) && admissible(p + side, d) && admissible(p - side, d)) return d;
      d *= 0.5;
    }
    return 0.0;
  };
  // Near a corner the normal ray runs along the adjacent side; tilting it by
  // 45 degrees away from the corner keeps delta proportional to the depth.
  Vec2 inward = normal;
  double delta0 = reach(normal);
  const double c = std::sqrt(0.5);
  for (const Vec2 tilted : {normal * c + perp(normal) * c, normal * c - perp(normal) * c}) {
    const double d = reach(tilted);
    if (d > delta0) {
      delta0 = d;
      inward = tilted;
    }
  }
  const Vec2 tangent = perp(inward);
  seq.delta0 = delta0;
  if (delta0 < 2.0 * h) return seq;

  for (int n = 0; n < levels; ++n) {
    const double depth = std::ldexp(delta0, -n);
    Vec2 p = base + inward * depth;
    if (options.jitter > 0.0) {
      Rng rng(derive_seed(options.seed, static_cast<uint64_t>(SampleStream::kJitter),
                          options.stream_index * 1024 + static_cast<uint64_t>(n)));
      const double amp = std::min(options.jitter, 0.25 * depth);
      p += tangent * rng.uniform(-amp, amp);
    }
    if (!domain.contains(p) || !within_factor_two(domain.boundary_distance(p), depth)) break;
    const auto node = graph.try_snap(p);
    if (!node || !within_factor_two(graph.delta(*node), depth)) break;
    if (!seq.levels.empty() && seq.levels.back().node == *node) break;
    seq.levels.push_back({n, depth, p, *node, graph.delta(*node)});
  }
  return seq;
}

}  // namespace qhlab
