#include "qhlab/extension.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qhlab/approach.hpp"
#include "qhlab/error.hpp"
#include "qhlab/metric.hpp"
#include "qhlab/shortest_path.hpp"
#include "qhlab/visibility.hpp"

namespace qhlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RayRecord make_record(const MetricGraph& graph, const RayApprox& ray, RayRole role, int partner) {
  RayRecord rec;
  rec.role = role;
  rec.partner = partner;
  rec.target = ray.target;
  rec.levels = ray.levels();
  const Landing landing = landing_point(graph, ray);
  rec.status = landing.status;
  rec.landing = landing.point;
  rec.deepest = landing.deepest;
  rec.flagged = ray.levels() < 3 || landing.status != LandingStatus::kLanded;
  return rec;
}

// Distance between two landing points in the ambient metric. Under the inner
// metric, nearby landings on different sides of a slit are measured through
// the domain.
double landing_distance(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q) {
  const double euclid = distance(p.position, q.position);
  if (graph.domain().ambient_metric() == AmbientMetric::kInner && euclid < 8.0 * graph.resolution()) {
    return boundary_separation(graph, p, q);
  }
  return euclid;
}

}  // namespace

std::string to_string(RayRole role) {
  switch (role) {
    case RayRole::kFan:
      return "fan";
    case RayRole::kDuplicate:
      return "duplicate";
    case RayRole::kPerturbed:
      return "perturbed";
    case RayRole::kOffset:
      return "offset";
  }
  return "fan";
}

ExtensionExperiment run_extension_experiment(const MetricGraph& graph, int x0, int n_rays, int levels,
                                             const ExtensionOptions& options) {
  if (n_rays < 8) throw Error(ErrorCode::kInvalidParameter, "extension experiment needs n_rays >= 8");
  if (options.twin_stride < 1) throw Error(ErrorCode::kInvalidParameter, "twin_stride must be positive");
  const Domain& domain = graph.domain();
  const double h = graph.resolution();

  ExtensionExperiment ex;
  ex.base = x0;
  ex.n_rays = n_rays;
  ex.levels = levels;
  ex.resolution = h;
  ex.delta_hat = options.delta_hat >= 0.0 ? options.delta_hat : estimate_delta(graph, 16, options.seed).delta_hat;
  ex.equivalence_bound = equivalence_bound(ex.delta_hat);
  ex.step = domain.boundary_length() / (4.0 * n_rays);

  // Fan, duplicates and perturbed twins share one tree from the base.
  std::vector<BoundaryPoint> targets = boundary_sample(domain, n_rays);
  std::vector<std::pair<RayRole, int>> roles;
  for (int i = 0; i < n_rays; ++i) roles.emplace_back(RayRole::kFan, -1);
  std::vector<int> twinned;
  for (int i = 0; i < n_rays; i += options.twin_stride) twinned.push_back(i);
  for (int i : twinned) {
    targets.push_back(targets[i]);
    roles.emplace_back(RayRole::kDuplicate, i);
    targets.push_back(domain.point_at_arclength(domain.resolve(targets[i]).coordinate->arclength + ex.step));
    roles.emplace_back(RayRole::kPerturbed, i);
  }
  RayOptions ray_options;
  ray_options.delta0 = options.delta0;
  std::vector<RayApprox> rays = build_rays(graph, x0, targets, levels, ray_options);

  std::vector<BoundaryPoint> offset_targets;
  for (int i : twinned) offset_targets.push_back(targets[i]);
  ray_options.delta0 = 0.5 * (rays.front().delta0 > 0.0 ? rays.front().delta0 : 0.5 * graph.delta(x0));
  std::vector<RayApprox> offsets = build_rays(graph, x0, offset_targets, levels, ray_options);
  for (std::size_t t = 0; t < offsets.size(); ++t) {
    rays.push_back(std::move(offsets[t]));
    roles.emplace_back(RayRole::kOffset, twinned[t]);
  }

  for (std::size_t r = 0; r < rays.size(); ++r) {
    ex.rays.push_back(make_record(graph, rays[r], roles[r].first, roles[r].second));
    if (ex.rays.back().flagged) ++ex.flagged;
  }

  // Surjectivity: every boundary sample should be near some landing.
  std::vector<int> landed;
  for (int i = 0; i < n_rays; ++i) {
    if (!ex.rays[i].flagged) landed.push_back(i);
  }
  ex.surjectivity_gap = landed.empty() ? kInf : 0.0;
  if (!landed.empty()) {
    for (const BoundaryPoint& s : boundary_sample(domain, 4 * n_rays)) {
      double best = kInf;
      for (int i : landed) best = std::min(best, domain.arclength_distance(s, ex.rays[i].landing));
      ex.surjectivity_gap = std::max(ex.surjectivity_gap, best);
    }
  }

  // Equivalence among fan rays, deepest level first; a pair stays a
  // candidate while every level checked so far is within the bound.
  const int full = levels;
  std::vector<int> complete;
  for (int i : landed) {
    if (rays[i].levels() == full) complete.push_back(i);
  }
  const int m = static_cast<int>(complete.size());
  std::vector<std::vector<char>> candidate(m, std::vector<char>(m, 1));
  for (int n = full - 1; n >= 0; --n) {
    for (int a = 0; a < m; ++a) {
      SearchLimits limits;
      limits.radius = ex.equivalence_bound;
      std::vector<int> partners;
      for (int b = a + 1; b < m; ++b) {
        if (candidate[a][b]) {
          partners.push_back(b);
          limits.targets.push_back(rays[complete[b]].endpoints[n]);
        }
      }
      if (partners.empty()) continue;
      const std::array<int, 1> source{rays[complete[a]].endpoints[n]};
      const PathTree tree = shortest_paths(graph, EdgeWeight::kQuasihyperbolic, source, limits);
      for (int b : partners) {
        const int node = rays[complete[b]].endpoints[n];
        if (!tree.reached(node) || tree.dist[node] > ex.equivalence_bound) candidate[a][b] = 0;
      }
    }
  }
  ex.injectivity_margin = kInf;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const RayRecord& ra = ex.rays[complete[a]];
      const RayRecord& rb = ex.rays[complete[b]];
      if (candidate[a][b]) {
        if (!domain.same_boundary_point(ra.target, rb.target)) ++ex.unresolved_pairs;
        continue;
      }
      ++ex.non_equivalent_pairs;
      ex.injectivity_margin = std::min(ex.injectivity_margin, landing_distance(graph, ra.landing, rb.landing));
    }
  }
  if (ex.non_equivalent_pairs == 0) ex.injectivity_margin = 0.0;

  // Twins: equivalent ones must land together, perturbed ones nearby.
  ex.continuity_excess = -kInf;
  for (std::size_t r = n_rays; r < ex.rays.size(); ++r) {
    const RayRecord& twin = ex.rays[r];
    const RayRecord& fan = ex.rays[twin.partner];
    if (twin.flagged || fan.flagged) continue;
    const double move = landing_distance(graph, fan.landing, twin.landing);
    if (twin.role == RayRole::kPerturbed) {
      ex.continuity_excess = std::max(ex.continuity_excess, move - (2.0 * h + ex.step));
      continue;
    }
    if (rays[r].levels() != rays[twin.partner].levels()) continue;
    if (rays_equivalent(graph, rays[twin.partner], rays[r], ex.equivalence_bound)) {
      ++ex.equivalent_twins;
      ex.equivalent_spread = std::max(ex.equivalent_spread, move);
    }
  }
  if (ex.continuity_excess == -kInf) ex.continuity_excess = 0.0;
  return ex;
}

LineCheck injectivity_line_detail(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q,
                                  int levels) {
  const Domain& domain = graph.domain();
  const BoundaryPoint rp = domain.resolve(p);
  const BoundaryPoint rq = domain.resolve(q);
  if (domain.same_boundary_point(rp, rq)) throw Error(ErrorCode::kInvalidPair, "p and q are the same boundary point");
  const double separation = boundary_separation(graph, rp, rq);
  ApproachOptions approach;
  // Start close to the boundary: the level geodesics should already span
  // nearly the full separation.
  approach.delta0 = std::max(std::min(0.5 * domain.max_delta_estimate(), separation / 40.0), 2.0 * graph.resolution());
  const ApproachSequence xs = approach_sequence(graph, rp, levels, approach);
  const ApproachSequence ys = approach_sequence(graph, rq, levels, approach);

  LineCheck check;
  check.c0 = 0.5 * separation;
  check.min_length = kInf;
  const std::size_t tested = std::min(xs.levels.size(), ys.levels.size());
  for (std::size_t n = 0; n < tested; ++n) {
    const double len =
        graph_geodesic(graph, EdgeWeight::kQuasihyperbolic, xs.levels[n].node, ys.levels[n].node).d_length();
    check.d_lengths.push_back(len);
    check.min_length = std::min(check.min_length, len);
  }
  check.passed = tested > 0 && check.min_length >= check.c0;
  return check;
}

bool injectivity_line_check(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q, int levels) {
  return injectivity_line_detail(graph, p, q, levels).passed;
}

std::string to_string(CompactnessVerdict verdict) {
  return verdict == CompactnessVerdict::kNonCompactWitness ? "non-compact-witness" : "compact-consistent";
}

CompactnessReport compactness_check(const Domain& domain, AmbientMetric metric, int n, double separation,
                                    const CompactnessOptions& options) {
  if (n < 4) throw Error(ErrorCode::kInvalidParameter, "compactness_check needs n >= 4");
  if (!(separation > 0.0)) throw Error(ErrorCode::kInvalidParameter, "separation must be positive");
  const Domain working = domain.with_ambient_metric(metric);
  const MetricGraph graph = MetricGraph::build(working, options.h, options.connectivity);
  const double offset = options.offset > 0.0 ? options.offset : options.h;

  CompactnessReport report;
  report.separation = separation;
  report.net_radius = domain.boundary_length() / (2.0 * n);

  std::vector<Vec2> points;
  std::vector<int> nodes;
  auto add_candidate = [&](Vec2 p) {
    if (!working.contains(p)) return;
    const auto node = graph.try_snap(p);
    if (!node || std::find(nodes.begin(), nodes.end(), *node) != nodes.end()) return;
    points.push_back(p);
    nodes.push_back(*node);
  };
  for (const BoundaryPoint& b : boundary_sample(working, n)) add_candidate(b.position + *b.corridor * offset);
  for (const Vec2& p : options.extra_candidates) add_candidate(p);
  const int m = static_cast<int>(points.size());
  report.candidates = m;

  std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) {
    if (metric == AmbientMetric::kEuclidean) {
      for (int j = 0; j < m; ++j) dist[i][j] = distance(points[i], points[j]);
      continue;
    }
    SearchLimits limits;
    limits.targets = nodes;
    const std::array<int, 1> source{nodes[i]};
    const PathTree tree = shortest_paths(graph, EdgeWeight::kLength, source, limits);
    for (int j = 0; j < m; ++j) dist[i][j] = tree.dist[nodes[j]];
  }

  // For each accumulation candidate c and each starting point, walk the
  // others in order of decreasing Euclidean distance to c and keep those
  // that are separated from the chain and shrink the gaps.
  std::vector<int> best;
  for (int c = 0; c < m && best.empty(); ++c) {
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return distance(points[a], points[c]) > distance(points[b], points[c]);
    });
    for (int start = 0; start < m && best.empty(); ++start) {
      std::vector<int> chain{order[start]};
      double last_gap = kInf;
      for (int k = start + 1; k < m; ++k) {
        const int cand = order[k];
        const double gap = distance(points[chain.back()], points[cand]);
        if (!(gap < last_gap)) continue;
        bool separated = true;
        for (int member : chain) {
          if (!(std::min(dist[member][cand], dist[cand][member]) >= separation)) separated = false;
        }
        if (!separated) continue;
        chain.push_back(cand);
        last_gap = gap;
      }
      if (chain.size() >= 4 && last_gap <= 0.25 * separation) best = chain;
    }
  }
  if (!best.empty()) {
    report.verdict = CompactnessVerdict::kNonCompactWitness;
    for (int i : best) {
      report.witness.push_back(points[i]);
      std::vector<double> row;
      for (int j : best) row.push_back(dist[i][j]);
      report.witness_distances.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace qhlab
