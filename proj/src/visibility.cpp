#include "qhlab/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qhlab/approach.hpp"
#include "qhlab/error.hpp"
#include "qhlab/metric.hpp"
#include "qhlab/sampling.hpp"

namespace qhlab {

namespace {

constexpr double kStableDrift = 0.10;
constexpr double kFalsifyRatio = 0.75;
constexpr int kMinLevels = 4;
constexpr int kVerdictWindow = 3;

void require_distinct(const Domain& domain, const BoundaryPoint& p, const BoundaryPoint& q) {
  if (domain.same_boundary_point(domain.resolve(p), domain.resolve(q))) {
    throw Error(ErrorCode::kInvalidPair, "p and q are the same boundary point");
  }
}

// Approaches to p and q at a common level-0 depth, so level n pairs equal depths.
std::pair<ApproachSequence, ApproachSequence> paired_approaches(const MetricGraph& graph, const BoundaryPoint& p,
                                                                const BoundaryPoint& q, int levels,
                                                                ApproachOptions options, uint64_t first_stream) {
  for (;;) {
    options.stream_index = first_stream;
    ApproachSequence xs = approach_sequence(graph, p, levels, options);
    options.stream_index = first_stream + 1;
    ApproachSequence ys = approach_sequence(graph, q, levels, options);
    const double common = std::min(xs.delta0, ys.delta0);
    if (xs.delta0 == ys.delta0 || common < 2.0 * graph.resolution()) return {std::move(xs), std::move(ys)};
    options.delta0 = common;
  }
}

double default_delta0(const MetricGraph& graph, double separation, double requested) {
  const double top = requested > 0.0 ? requested : 0.5 * graph.domain().max_delta_estimate();
  return std::min(top, 0.25 * separation);
}

Verdict classify(const std::vector<double>& values, double epsilon_hat, double epsilon_vis) {
  const int n = static_cast<int>(values.size());
  if (n < kMinLevels) return Verdict::kInconclusive;
  bool stable = true;
  bool collapsing = true;
  for (int i = n - kVerdictWindow; i < n; ++i) {
    const double prev = values[i - 1];
    if (!(std::abs(values[i] - prev) < kStableDrift * prev)) stable = false;
    if (!(values[i] <= kFalsifyRatio * prev)) collapsing = false;
  }
  if (collapsing) return Verdict::kFalsified;
  if (stable && epsilon_hat >= epsilon_vis) return Verdict::kVisible;
  return Verdict::kInconclusive;
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kVisible:
      return "visible";
    case Verdict::kFalsified:
      return "falsified";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

double boundary_separation(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q) {
  const Domain& domain = graph.domain();
  if (domain.ambient_metric() == AmbientMetric::kEuclidean) return distance(p.position, q.position);
  // Shallow approach points, then the inner distance between them; the
  // depths are added back since they are short straight legs.
  ApproachOptions shallow;
  shallow.delta0 = 4.0 * graph.resolution();
  const ApproachSequence sp = approach_sequence(graph, p, 1, shallow);
  const ApproachSequence sq = approach_sequence(graph, q, 1, shallow);
  if (sp.levels.empty() || sq.levels.empty()) return distance(p.position, q.position);
  return graph_distance(graph, EdgeWeight::kLength, sp.levels[0].node, sq.levels[0].node);
}

VisibilityReport test_pair_visibility(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q,
                                      int levels, const VisibilityOptions& options) {
  const Domain& domain = graph.domain();
  require_distinct(domain, p, q);
  if (levels < 1) throw Error(ErrorCode::kInvalidParameter, "visibility test needs at least one level");
  const double h = graph.resolution();

  VisibilityReport report;
  report.p = domain.resolve(p);
  report.q = domain.resolve(q);
  report.pair_index = static_cast<int>(options.pair_index);
  report.levels_requested = levels;
  report.resolution = h;
  report.epsilon_vis = options.epsilon_vis > 0.0 ? options.epsilon_vis : 4.0 * h;
  report.separation = boundary_separation(graph, report.p, report.q);
  report.delta0 = default_delta0(graph, report.separation, options.delta0);

  ApproachOptions approach;
  approach.delta0 = report.delta0;
  approach.jitter = options.jitter < 0.0 ? h : options.jitter;
  approach.seed = options.seed;
  approach.stream_index = 2 * options.pair_index;
  const auto [xs, ys] = paired_approaches(graph, report.p, report.q, levels, approach, 2 * options.pair_index);
  report.delta0 = std::min(xs.delta0, ys.delta0);

  const std::size_t tested = std::min(xs.levels.size(), ys.levels.size());
  report.levels_tested = static_cast<int>(tested);
  double min_delta = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < tested; ++n) {
    const int a = xs.levels[n].node;
    const int b = ys.levels[n].node;
    ParametrizedCurve geodesic = graph_geodesic(graph, EdgeWeight::kQuasihyperbolic, a, b);
    report.level_max_delta.push_back(geodesic.max_delta());
    report.level_k.push_back(geodesic.k_length());
    min_delta = std::min({min_delta, graph.delta(a), graph.delta(b)});
    if (n == 0 || geodesic.max_delta() < report.epsilon_hat) {
      report.epsilon_hat = geodesic.max_delta();
      report.worst_geodesic = std::move(geodesic);
    }
  }
  report.tau = tested > 0 ? 4.0 * h / min_delta : 0.0;
  report.verdict = classify(report.level_max_delta, report.epsilon_hat, report.epsilon_vis);
  return report;
}

std::vector<VisibilityReport> falsify_visibility(const MetricGraph& graph, int candidate_pairs, int levels,
                                                 uint64_t seed) {
  if (candidate_pairs < 1) throw Error(ErrorCode::kInvalidParameter, "falsify_visibility needs at least one pair");
  const Domain& domain = graph.domain();
  const double length = domain.boundary_length();
  std::vector<VisibilityReport> reports;
  for (int i = 0; i < candidate_pairs; ++i) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(SampleStream::kPairs), static_cast<uint64_t>(i)));
    const double s1 = domain.arclength_origin() + length * (i + rng.uniform()) / candidate_pairs;
    const double s2 = s1 + length * (0.125 + 0.75 * rng.uniform());
    VisibilityOptions options;
    options.seed = seed;
    options.pair_index = static_cast<uint64_t>(i);
    reports.push_back(
        test_pair_visibility(graph, domain.point_at_arclength(s1), domain.point_at_arclength(s2), levels, options));
  }
  std::stable_sort(reports.begin(), reports.end(), [](const VisibilityReport& a, const VisibilityReport& b) {
    return a.epsilon_hat < b.epsilon_hat;
  });
  return reports;
}

DivergenceReport observation_divergence(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q,
                                        int levels, double delta0) {
  const Domain& domain = graph.domain();
  require_distinct(domain, p, q);
  ApproachOptions approach;
  approach.delta0 = default_delta0(graph, boundary_separation(graph, domain.resolve(p), domain.resolve(q)), delta0);
  const auto [xs, ys] = paired_approaches(graph, p, q, levels, approach, 0);
  DivergenceReport report;
  const std::size_t tested = std::min(xs.levels.size(), ys.levels.size());
  for (std::size_t n = 0; n < tested; ++n) {
    report.level_k.push_back(graph_distance(graph, EdgeWeight::kQuasihyperbolic, xs.levels[n].node, ys.levels[n].node));
  }
  report.strictly_increasing = tested >= 2;
  for (std::size_t n = 1; n < tested; ++n) {
    if (!(report.level_k[n] > report.level_k[n - 1])) report.strictly_increasing = false;
  }
  report.exceeds_double = tested >= 2 && report.level_k.back() > 2.0 * report.level_k.front();
  return report;
}

bool observation_divergence_check(const MetricGraph& graph, const BoundaryPoint& p, const BoundaryPoint& q,
                                  int levels) {
  return observation_divergence(graph, p, q, levels).passed();
}

}  // namespace qhlab
