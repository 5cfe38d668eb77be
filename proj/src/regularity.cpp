#include "qhlab/regularity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qhlab/error.hpp"
#include "qhlab/metric.hpp"
#include "qhlab/quadrature.hpp"
#include "qhlab/sampling.hpp"
#include "qhlab/shortest_path.hpp"

namespace qhlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinSlope = 1e-6;
constexpr double kHeadEnd = 1000.0;
constexpr double kDecayFrom = 1e8;
constexpr double kDecayTo = 1e9;
constexpr double kExponentMargin = 1e-6;

double shape(const GrowthModel& m, double u) {
  return m.family == GrowthFamily::kLogAffine ? std::log1p(u) : std::pow(u, m.c);
}

// Decay exponent p of 1/phi^-1(s) ~ s^-p, measured far out in log space.
double decay_exponent(const GrowthModel& m) {
  const double lo = m.log_inverse(kDecayFrom);
  const double hi = m.log_inverse(kDecayTo);
  return (hi - lo) / (std::log(kDecayTo) - std::log(kDecayFrom));
}

// Integral of 1/phi^-1 over [from, inf): closed form for the two families,
// a power-law extrapolation for custom models.
double tail_integral(const GrowthModel& m, double from) {
  switch (m.family) {
    case GrowthFamily::kLogAffine: {
      const double v = (from - m.b) / m.a;
      return m.scale * m.a * -std::log1p(-std::exp(-v));
    }
    case GrowthFamily::kPower: {
      const double p = 1.0 / m.c;
      if (p <= 1.0) return kInf;
      const double v = (from - m.b) / m.a;
      return m.scale * m.a * std::pow(v, 1.0 - p) / (p - 1.0);
    }
    case GrowthFamily::kCustom: {
      const double p = decay_exponent(m);
      if (!(p > 1.0 + kExponentMargin)) return kInf;
      return from * std::exp(-m.log_inverse(from)) / (p - 1.0);
    }
  }
  return kInf;
}

double phi_at_zero(const GrowthModel& m) { return m.family == GrowthFamily::kCustom ? m.custom(0.0) : m.b; }

}  // namespace

std::string to_string(GrowthFamily family) {
  switch (family) {
    case GrowthFamily::kLogAffine:
      return "log-affine";
    case GrowthFamily::kPower:
      return "power";
    case GrowthFamily::kCustom:
      return "custom";
  }
  return "custom";
}

GrowthModel GrowthModel::log_affine(double a, double b, double scale) {
  GrowthModel m;
  m.family = GrowthFamily::kLogAffine;
  m.a = a;
  m.b = b;
  m.scale = scale;
  m.validate();
  return m;
}

GrowthModel GrowthModel::power(double a, double c, double b) {
  GrowthModel m;
  m.family = GrowthFamily::kPower;
  m.a = a;
  m.b = b;
  m.c = c;
  m.validate();
  return m;
}

GrowthModel GrowthModel::from_function(std::function<double(double)> phi) {
  GrowthModel m;
  m.family = GrowthFamily::kCustom;
  m.custom = std::move(phi);
  m.validate();
  return m;
}

void GrowthModel::validate() const {
  if (family == GrowthFamily::kCustom) {
    if (!custom) throw Error(ErrorCode::kInvalidParameter, "custom growth model has no function");
    return;
  }
  if (!(a > 0.0) || !(scale > 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::kInvalidParameter, "growth model needs a > 0, b >= 0, scale > 0");
  }
  if (family == GrowthFamily::kPower && !(c > 0.0)) {
    throw Error(ErrorCode::kInvalidParameter, "power growth model needs c > 0");
  }
}

double GrowthModel::operator()(double t) const {
  if (family == GrowthFamily::kCustom) return custom(t);
  return a * shape(*this, scale * t) + b;
}

double GrowthModel::inverse(double s) const {
  if (family != GrowthFamily::kCustom && s <= b) return 0.0;
  return std::exp(log_inverse(s));
}

double GrowthModel::log_inverse(double s) const {
  switch (family) {
    case GrowthFamily::kLogAffine: {
      const double v = (s - b) / a;
      if (!(v > 0.0)) return -kInf;
      // log(e^v - 1) without overflow.
      return v + std::log(-std::expm1(-v)) - std::log(scale);
    }
    case GrowthFamily::kPower: {
      const double v = (s - b) / a;
      if (!(v > 0.0)) return -kInf;
      return std::log(v) / c - std::log(scale);
    }
    case GrowthFamily::kCustom: {
      // Bisection on log t; phi is increasing.
      double lo = -60.0;
      double hi = 700.0;
      if (custom(std::exp(lo)) >= s) return lo;
      if (custom(std::exp(hi)) < s) return hi;
      for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        (custom(std::exp(mid)) < s ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return -kInf;
}

std::vector<EnvelopeSample> growth_envelope(const MetricGraph& graph, int x0, int n_samples, uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorCode::kInvalidParameter, "growth_envelope needs n_samples >= 1");
  if (x0 < 0 || x0 >= graph.node_count()) throw Error(ErrorCode::kInvalidParameter, "x0 is not a graph node");
  const std::vector<int> nodes = stratified_nodes(graph, n_samples, seed, SampleStream::kPoints);
  SearchLimits limits;
  limits.targets = nodes;
  const std::array<int, 1> sources{x0};
  const PathTree tree = shortest_paths(graph, EdgeWeight::kQuasihyperbolic, sources, limits);
  std::vector<EnvelopeSample> out;
  out.push_back({1.0, 0.0, x0});
  for (int node : nodes) {
    if (!tree.reached(node)) throw Error(ErrorCode::kInternal, "sample unreachable from x0");
    out.push_back({graph.delta(x0) / graph.delta(node), tree.dist[node], node});
  }
  return out;
}

double envelope_margin(const GrowthModel& model, const std::vector<EnvelopeSample>& envelope) {
  double margin = -kInf;
  for (const auto& s : envelope) margin = std::max(margin, s.k - model(s.ratio));
  return margin;
}

GrowthModel fit_growth_function(const std::vector<EnvelopeSample>& envelope, GrowthFamily family,
                                const FitOptions& options) {
  if (envelope.empty()) throw Error(ErrorCode::kInvalidParameter, "cannot fit an empty envelope");
  if (family == GrowthFamily::kCustom) throw Error(ErrorCode::kInvalidParameter, "custom models are not fitted");
  GrowthModel model;
  model.family = family;
  model.c = options.power_exponent;
  if (family == GrowthFamily::kPower && !(model.c > 0.0)) {
    throw Error(ErrorCode::kNoFit, "power family needs a positive exponent");
  }

  double anchor = 0.0;
  for (const auto& s : envelope) {
    if (s.ratio <= 1.0) anchor = std::max(anchor, s.k);
  }
  double slope = kMinSlope;
  for (const auto& s : envelope) {
    const double g = shape(model, s.ratio);
    if (g > 0.0) slope = std::max(slope, (s.k - anchor) / g);
  }
  if (slope > options.max_slope) {
    throw Error(ErrorCode::kNoFit, "family cannot dominate the envelope within the slope limit");
  }
  model.a = slope;
  double offset = 0.0;
  for (const auto& s : envelope) offset = std::max(offset, s.k - slope * shape(model, s.ratio));
  model.b = offset;
  // Rounding can leave a violation of a few ulps; absorb it in the offset.
  const double excess = envelope_margin(model, envelope);
  if (excess > 0.0) model.b += 2.0 * excess;
  model.envelope_margin = envelope_margin(model, envelope);
  return model;
}

IntegralResult integral_test_detail(const GrowthModel& model) {
  model.validate();
  IntegralResult r;
  r.lower_limit = std::max(1.0, model(1.0));
  if (r.lower_limit < kHeadEnd) {
    const auto integrand = [&](double s) { return std::exp(-model.log_inverse(s)); };
    r.head = adaptive_simpson(integrand, r.lower_limit, kHeadEnd, 1e-10).value;
  }
  r.tail_bound = tail_integral(model, std::max(kHeadEnd, r.lower_limit));
  r.converges = std::isfinite(r.tail_bound);
  if (phi_at_zero(model) <= 0.0) {
    if (model.family == GrowthFamily::kLogAffine) r.from_zero_finite = false;
    if (model.family == GrowthFamily::kPower) r.from_zero_finite = model.c > 1.0;
  }
  return r;
}

SummationResult summation_test_detail(const GrowthModel& model) {
  model.validate();
  SummationResult r;
  for (int j = 1; j <= static_cast<int>(kHeadEnd); ++j) {
    const double li = model.log_inverse(j);
    if (std::isfinite(li)) r.partial_sum += std::exp(-li);
  }
  r.decay_exponent = decay_exponent(model);
  r.converges = r.decay_exponent > 1.0 + kExponentMargin;
  return r;
}

bool integral_test(const GrowthModel& model) { return integral_test_detail(model).converges; }

bool summation_test(const GrowthModel& model) { return summation_test_detail(model).converges; }

GrowthModel phi_uniform_transform(const GrowthModel& varphi, double diam, double delta0) {
  varphi.validate();
  if (!(diam > 0.0) || !(delta0 > 0.0)) throw Error(ErrorCode::kInvalidParameter, "diam and delta0 must be positive");
  const double factor = diam / delta0;
  GrowthModel out = varphi;
  switch (varphi.family) {
    case GrowthFamily::kLogAffine:
      out.scale *= factor;
      break;
    case GrowthFamily::kPower:
      out.a *= std::pow(factor * varphi.scale, varphi.c);
      out.scale = 1.0;
      break;
    case GrowthFamily::kCustom: {
      auto inner = varphi.custom;
      out.custom = [inner, factor](double t) { return inner(factor * t); };
      break;
    }
  }
  return out;
}

namespace {

std::vector<std::pair<int, int>> sample_pairs(const MetricGraph& graph, int n_pairs, uint64_t seed) {
  if (n_pairs < 1) throw Error(ErrorCode::kInvalidParameter, "need at least one pair");
  std::vector<std::pair<int, int>> pairs;
  uint64_t index = 0;
  const uint64_t max_index = 8 * static_cast<uint64_t>(n_pairs) + 64;
  while (static_cast<int>(pairs.size()) < n_pairs && index < max_index) {
    const auto nodes = stratified_nodes(graph, 2, seed, SampleStream::kPairs, index);
    index += 2;
    if (nodes[0] != nodes[1]) pairs.emplace_back(nodes[0], nodes[1]);
  }
  return pairs;
}

void record(RegularityReport& report, const MetricGraph& graph, int x, int y, double ratio) {
  report.pairs.push_back({x, y, ratio});
  if (report.worst.x < 0 || ratio > report.constant) {
    report.constant = ratio;
    report.worst = {x, y, ratio};
    report.tau = slack_tau(graph.resolution(), graph.delta(x), graph.delta(y));
  }
}

}  // namespace

RegularityReport gehring_hayman_constant(const MetricGraph& graph, int n_pairs, uint64_t seed) {
  RegularityReport report;
  report.resolution = graph.resolution();
  for (const auto& [x, y] : sample_pairs(graph, n_pairs, seed)) {
    const double geodesic_length = graph_geodesic(graph, EdgeWeight::kQuasihyperbolic, x, y).d_length();
    const double inner = graph_distance(graph, EdgeWeight::kLength, x, y);
    record(report, graph, x, y, geodesic_length / inner);
  }
  report.sample_count = static_cast<int>(report.pairs.size());
  return report;
}

double quasiconvexity_ratio(const MetricGraph& graph, Vec2 x, Vec2 y) {
  const int a = graph.snap(x);
  const int b = graph.snap(y);
  if (a == b) throw Error(ErrorCode::kInvalidPair, "points snap to the same node");
  return graph_distance(graph, EdgeWeight::kLength, a, b) / distance(graph.position(a), graph.position(b));
}

RegularityReport quasiconvexity_constant(const MetricGraph& graph, int n_pairs, uint64_t seed,
                                         const std::vector<std::pair<Vec2, Vec2>>& extra_pairs) {
  RegularityReport report;
  report.resolution = graph.resolution();
  if (graph.domain().ambient_metric() == AmbientMetric::kInner) {
    // A length space is 1-quasiconvex in its own metric.
    report.constant = 1.0;
    return report;
  }
  for (const auto& [x, y] : sample_pairs(graph, n_pairs, seed)) {
    record(report, graph, x, y,
           graph_distance(graph, EdgeWeight::kLength, x, y) / distance(graph.position(x), graph.position(y)));
  }
  for (const auto& [p, q] : extra_pairs) {
    const int x = graph.snap(p);
    const int y = graph.snap(q);
    record(report, graph, x, y, quasiconvexity_ratio(graph, p, q));
  }
  report.sample_count = static_cast<int>(report.pairs.size());
  return report;
}

}  // namespace qhlab
