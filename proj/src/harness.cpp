#include "qhlab/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "qhlab/error.hpp"
#include "qhlab/extension.hpp"
#include "qhlab/figures.hpp"
#include "qhlab/hyperbolicity.hpp"
#include "qhlab/metric.hpp"
#include "qhlab/regularity.hpp"
#include "qhlab/sampling.hpp"
#include "qhlab/visibility.hpp"

namespace qhlab {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config errors with a field path and, where it can be found, a line.

std::string line_suffix(const std::string& text, std::size_t offset) {
  if (offset == std::string::npos || offset > text.size()) return "";
  const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
  return " (line " + std::to_string(line) + ")";
}

// Offset of the n-th occurrence (0-based) of a quoted key, or npos.
std::size_t find_key(const std::string& text, const std::string& key, std::size_t from = 0, int nth = 0) {
  const std::string needle = "\"" + key + "\"";
  std::size_t pos = text.find(needle, from);
  while (pos != std::string::npos && nth-- > 0) pos = text.find(needle, pos + 1);
  return pos;
}

struct Locator {
  const std::string& text;

  // path like {"experiments", "2", "params", "x"}: walk anchors in order.
  std::size_t locate(const std::vector<std::string>& path) const {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const std::string& part = path[i];
      if (!part.empty() && std::isdigit(static_cast<unsigned char>(part[0]))) {
        // Index into the experiments array: anchor on the n-th "operation" or "name".
        const int index = std::stoi(part);
        std::size_t found = find_key(text, "operation", pos, index);
        if (found == std::string::npos) return pos;
        // Step back to the start of that experiment object.
        const std::size_t brace = text.rfind('{', found);
        pos = brace == std::string::npos ? found : brace;
        continue;
      }
      const std::size_t found = find_key(text, part, pos);
      if (found == std::string::npos) return i == 0 ? std::string::npos : pos;
      pos = found;
    }
    return pos;
  }
};

[[noreturn]] void config_error(const std::string& text, const std::vector<std::string>& path, const std::string& message) {
  std::string field;
  for (const auto& p : path) {
    if (!p.empty() && std::isdigit(static_cast<unsigned char>(p[0]))) {
      field += "[" + p + "]";
    } else {
      field += (field.empty() ? "" : ".") + p;
    }
  }
  const std::size_t pos = Locator{text}.locate(path);
  throw Error(ErrorCode::kConfig, "field '" + field + "': " + message + line_suffix(text, pos));
}

// ---------------------------------------------------------------------------
// Parameter schemas

enum class ParamType { kNumber, kInteger, kPoint, kBoundary, kString, kPointList, kPairList, kModel };

struct ParamSpec {
  std::string name;
  ParamType type;
  bool required;
};

struct ExperimentOutput {
  json result = json::object();
  double tau = 0.0;
  std::vector<std::string> outputs;
  int falsified = 0;
};

class Context;
using Runner = std::function<void(Context&, const ExperimentSpec&, ExperimentOutput&)>;

struct Operation {
  std::string name;
  std::string family;
  std::vector<ParamSpec> params;
  Runner run;
};

bool is_point(const json& v) {
  return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number();
}

std::string type_name(ParamType t) {
  switch (t) {
    case ParamType::kNumber:
      return "a number";
    case ParamType::kInteger:
      return "an integer";
    case ParamType::kPoint:
      return "a point [x, y]";
    case ParamType::kBoundary:
      return "a boundary point {\"position\": [x, y], \"corridor\": [dx, dy]} or {\"arclength\": s}";
    case ParamType::kString:
      return "a string";
    case ParamType::kPointList:
      return "a nonempty list of points";
    case ParamType::kPairList:
      return "a list of point pairs";
    case ParamType::kModel:
      return "a growth model {\"family\", \"a\", \"b\", \"c\", \"scale\"}";
  }
  return "a value";
}

bool matches(const json& v, ParamType t) {
  switch (t) {
    case ParamType::kNumber:
      return v.is_number();
    case ParamType::kInteger:
      return v.is_number_integer();
    case ParamType::kPoint:
      return is_point(v);
    case ParamType::kBoundary:
      if (!v.is_object()) return false;
      for (const auto& [key, value] : v.items()) {
        if (key == "position" || key == "corridor") {
          if (!is_point(value)) return false;
        } else if (key == "arclength") {
          if (!value.is_number()) return false;
        } else {
          return false;
        }
      }
      return v.contains("position") != v.contains("arclength");
    case ParamType::kString:
      return v.is_string();
    case ParamType::kPointList:
      return v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), is_point);
    case ParamType::kPairList:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& pair) {
               return pair.is_array() && pair.size() == 2 && is_point(pair[0]) && is_point(pair[1]);
             });
    case ParamType::kModel: {
      if (!v.is_object() || !v.contains("family") || !v["family"].is_string()) return false;
      const std::string fam = v["family"];
      if (fam != "log-affine" && fam != "power") return false;
      for (const auto& [key, value] : v.items()) {
        if (key == "family") continue;
        if ((key != "a" && key != "b" && key != "c" && key != "scale") || !value.is_number()) return false;
      }
      return true;
    }
  }
  return false;
}

Vec2 to_point(const json& v) { return {v[0].get<double>(), v[1].get<double>()}; }

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

json boundary_json(const BoundaryPoint& b) {
  json out = {{"position", point_json(b.position)}};
  if (b.corridor) out["corridor"] = point_json(*b.corridor);
  if (b.coordinate) out["arclength"] = b.coordinate->arclength;
  return out;
}

BoundaryPoint to_boundary(const json& v, const Domain& domain) {
  if (v.contains("arclength")) return domain.point_at_arclength(v["arclength"].get<double>());
  BoundaryPoint b;
  b.position = to_point(v["position"]);
  if (v.contains("corridor")) b.corridor = normalized(to_point(v["corridor"]));
  return domain.resolve(b);
}

GrowthModel to_model(const json& v) {
  const std::string fam = v["family"];
  const double a = v.value("a", 1.0);
  const double b = v.value("b", 0.0);
  if (fam == "power") {
    GrowthModel m = GrowthModel::power(a, v.value("c", 1.0), b);
    m.scale = v.value("scale", 1.0);
    m.validate();
    return m;
  }
  return GrowthModel::log_affine(a, b, v.value("scale", 1.0));
}

json model_json(const GrowthModel& m) {
  json out = {{"family", to_string(m.family)}, {"a", m.a}, {"b", m.b}, {"scale", m.scale}};
  if (m.family == GrowthFamily::kPower) out["c"] = m.c;
  return out;
}

json tests_json(const GrowthModel& m) {
  const IntegralResult in = integral_test_detail(m);
  const SummationResult sum = summation_test_detail(m);
  json integral = {{"converges", in.converges}, {"lower_limit", in.lower_limit}, {"head", in.head},
                   {"tail_bound", std::isfinite(in.tail_bound) ? json(in.tail_bound) : json("inf")}};
  integral["from_zero_finite"] = in.from_zero_finite ? json(*in.from_zero_finite) : json(nullptr);
  return {{"integral", integral},
          {"summation",
           {{"converges", sum.converges}, {"partial_sum", sum.partial_sum}, {"decay_exponent", sum.decay_exponent}}}};
}

json curve_json(const ParametrizedCurve& c) {
  return {{"vertices", c.size()},  {"d_length", c.d_length()},  {"k_length", c.k_length()},
          {"max_delta", c.max_delta()}, {"min_delta", c.min_delta()}, {"lipschitz", c.lipschitz()}};
}

// ---------------------------------------------------------------------------
// Run context

class Context {
 public:
  Context(const ExperimentConfig& config, std::string out_dir) : config_(config), out_dir_(std::move(out_dir)) {}

  const ExperimentConfig& config() const { return config_; }
  const Domain& domain() const { return config_.domain; }
  double h() const { return config_.resolution; }
  uint64_t seed() const { return config_.seed; }

  const MetricGraph& graph() {
    if (!graph_) {
      GraphOptions options;
      options.connectivity = config_.connectivity;
      options.edge_rel_tol = config_.tolerances.edge_rel_tol;
      graph_ = MetricGraph::build(config_.domain, config_.resolution, options);
    }
    return *graph_;
  }

  double delta_hat() {
    if (!delta_hat_) delta_hat_ = estimate_delta(graph(), 16, config_.seed).delta_hat;
    return *delta_hat_;
  }

  std::string output_path(const std::string& relative) const {
    return (std::filesystem::path(out_dir_) / relative).string();
  }

 private:
  const ExperimentConfig& config_;
  std::string out_dir_;
  std::optional<MetricGraph> graph_;
  std::optional<double> delta_hat_;
};

double pair_tau(const MetricGraph& g, int a, int b) { return slack_tau(g.resolution(), g.delta(a), g.delta(b)); }

void write_output(Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out,
                  const std::function<void(const std::string&, FigureFormat)>& writer) {
  if (spec.output.empty()) return;
  const FigureFormat format = format_from_path(spec.output);
  writer(ctx.output_path(spec.output), format);
  out.outputs.push_back(spec.output);
}

void write_table(Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out, const Table& table) {
  write_output(ctx, spec, out, [&](const std::string& path, FigureFormat f) { emit_table(path, table, f); });
}

void write_curves(Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out,
                  const std::vector<ParametrizedCurve>& curves) {
  write_output(ctx, spec, out,
               [&](const std::string& path, FigureFormat f) { emit_figure(path, ctx.domain(), curves, f); });
}

int param_int(const ExperimentSpec& spec, const std::string& key, int fallback) {
  return spec.params.contains(key) ? spec.params[key].get<int>() : fallback;
}

double param_double(const ExperimentSpec& spec, const std::string& key, double fallback) {
  return spec.params.contains(key) ? spec.params[key].get<double>() : fallback;
}

json visibility_json(const VisibilityReport& r) {
  return {{"p", boundary_json(r.p)},
          {"q", boundary_json(r.q)},
          {"pair_index", r.pair_index},
          {"levels_requested", r.levels_requested},
          {"levels_tested", r.levels_tested},
          {"separation", r.separation},
          {"delta0", r.delta0},
          {"level_max_delta", r.level_max_delta},
          {"level_k", r.level_k},
          {"epsilon_hat", r.epsilon_hat},
          {"epsilon_vis", r.epsilon_vis},
          {"verdict", to_string(r.verdict)},
          {"tau", r.tau}};
}

// ---------------------------------------------------------------------------
// Operations

const std::vector<Operation>& operations() {
  static const std::vector<Operation> ops = {
      {"build_graph", "build", {}, [](Context& ctx, const ExperimentSpec&, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         double min_delta = std::numeric_limits<double>::infinity();
         for (double d : g.deltas()) min_delta = std::min(min_delta, d);
         out.result = {{"nodes", g.node_count()},
                       {"edges", g.edge_count()},
                       {"fringe", g.fringe().size()},
                       {"connectivity", g.connectivity()},
                       {"min_delta", min_delta},
                       {"max_delta_estimate", ctx.domain().max_delta_estimate()}};
         out.tau = 4.0 * g.resolution() / min_delta;
       }},
      {"qh_distance", "dist", {{"x", ParamType::kPoint, true}, {"y", ParamType::kPoint, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const int a = g.snap(to_point(spec.params["x"]));
         const int b = g.snap(to_point(spec.params["y"]));
         out.result = {{"value", graph_distance(g, EdgeWeight::kQuasihyperbolic, a, b)},
                       {"x_node", point_json(g.position(a))},
                       {"y_node", point_json(g.position(b))}};
         out.tau = pair_tau(g, a, b);
       }},
      {"inner_distance", "dist", {{"x", ParamType::kPoint, true}, {"y", ParamType::kPoint, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const int a = g.snap(to_point(spec.params["x"]));
         const int b = g.snap(to_point(spec.params["y"]));
         out.result = {{"value", graph_distance(g, EdgeWeight::kLength, a, b)},
                       {"x_node", point_json(g.position(a))},
                       {"y_node", point_json(g.position(b))}};
         out.tau = pair_tau(g, a, b);
       }},
      {"qh_length", "dist", {{"polyline", ParamType::kPointList, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         std::vector<Vec2> line;
         for (const auto& p : spec.params["polyline"]) line.push_back(to_point(p));
         out.result = {{"value", qh_length(ctx.domain(), line, ctx.config().tolerances.qh_length_rel_tol)},
                       {"d_length", d_length(line)}};
       }},
      {"check_lower_bounds", "dist", {{"x", ParamType::kPoint, true}, {"y", ParamType::kPoint, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const LowerBoundReport r = check_lower_bounds(g, to_point(spec.params["x"]), to_point(spec.params["y"]));
         out.result = {{"k_hat", r.k_hat},
                       {"lambda_hat", r.lambda_hat},
                       {"ambient", r.ambient},
                       {"bound_lambda", r.bound_lambda},
                       {"bound_ambient", r.bound_ambient},
                       {"bound_ratio", r.bound_ratio},
                       {"geodesic_d_length", r.geodesic_d_length},
                       {"geodesic_k_length", r.geodesic_k_length},
                       {"bound_geodesic", r.bound_geodesic},
                       {"passed", r.passed()}};
         out.tau = r.tau;
       }},
      {"lower_bound_suite", "dist", {{"pairs", ParamType::kInteger, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const int pairs = spec.params["pairs"].get<int>();
         if (pairs < 1) throw Error(ErrorCode::kInvalidParameter, "pairs must be >= 1");
         Table table{{"pair", "k_hat", "bound_lambda", "bound_ambient", "bound_ratio", "bound_geodesic", "tau", "passed"},
                     {}};
         int passed = 0;
         double worst_slack = std::numeric_limits<double>::infinity();
         for (int i = 0; i < pairs; ++i) {
           const auto nodes = stratified_nodes(g, 2, ctx.seed(), SampleStream::kPairs, 2 * static_cast<uint64_t>(i));
           const LowerBoundReport r = check_lower_bounds_nodes(g, nodes[0], nodes[1]);
           passed += r.passed();
           worst_slack = std::min(worst_slack, r.k_hat - r.bound_lambda + r.tau);
           out.tau = std::max(out.tau, r.tau);
           table.rows.push_back({static_cast<long long>(i), r.k_hat, r.bound_lambda, r.bound_ambient, r.bound_ratio,
                                 r.bound_geodesic, r.tau, static_cast<long long>(r.passed())});
         }
         out.result = {{"pairs", pairs}, {"passed", passed}, {"min_chain_slack", worst_slack}};
         write_table(ctx, spec, out, table);
       }},
      {"qh_geodesic", "geodesic", {{"x", ParamType::kPoint, true}, {"y", ParamType::kPoint, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const int a = g.snap(to_point(spec.params["x"]));
         const int b = g.snap(to_point(spec.params["y"]));
         const ParametrizedCurve c = graph_geodesic(g, EdgeWeight::kQuasihyperbolic, a, b);
         out.result = curve_json(c);
         out.tau = pair_tau(g, a, b);
         write_curves(ctx, spec, out, {c});
       }},
      {"qh_parametrize", "geodesic",
       {{"x", ParamType::kPoint, true}, {"y", ParamType::kPoint, true}, {"t", ParamType::kNumber, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const int a = g.snap(to_point(spec.params["x"]));
         const int b = g.snap(to_point(spec.params["y"]));
         const ParametrizedCurve c = graph_geodesic(g, EdgeWeight::kQuasihyperbolic, a, b);
         out.result = {{"point", point_json(qh_parametrize(c, spec.params["t"].get<double>()))},
                       {"k_length", c.k_length()}};
         out.tau = pair_tau(g, a, b);
       }},
      {"thin_triangle", "delta",
       {{"x", ParamType::kPoint, true}, {"y", ParamType::kPoint, true}, {"z", ParamType::kPoint, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const ThinTriangle t = thin_triangle(g, g.snap(to_point(spec.params["x"])), g.snap(to_point(spec.params["y"])),
                                              g.snap(to_point(spec.params["z"])));
         out.result = {{"delta", t.delta}, {"worst_side", t.worst_side}};
         out.tau = t.tau;
       }},
      {"estimate_delta", "delta", {{"samples", ParamType::kInteger, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const HyperbolicityReport r = estimate_delta(g, spec.params["samples"].get<int>(), ctx.seed());
         json worst = json::array();
         for (int node : r.worst.nodes) worst.push_back(point_json(g.position(node)));
         out.result = {{"delta_hat", r.delta_hat}, {"samples", r.sample_count}, {"worst_triangle", worst}};
         out.tau = r.worst.tau;
         Table table{{"triangle", "delta"}, {}};
         for (std::size_t i = 0; i < r.per_triangle.size(); ++i) {
           table.rows.push_back({static_cast<long long>(i), r.per_triangle[i]});
         }
         write_table(ctx, spec, out, table);
       }},
      {"build_ray", "delta",
       {{"base", ParamType::kPoint, true}, {"target", ParamType::kBoundary, true}, {"levels", ParamType::kInteger, true},
        {"delta0", ParamType::kNumber, false}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         RayOptions options;
         options.delta0 = param_double(spec, "delta0", 0.0);
         const RayApprox ray = build_ray(g, g.snap(to_point(spec.params["base"])),
                                         to_boundary(spec.params["target"], ctx.domain()),
                                         spec.params["levels"].get<int>(), options);
         const Landing landing = landing_point(g, ray);
         std::vector<double> k;
         for (const auto& s : ray.segments) k.push_back(s.k_length());
         out.result = {{"levels", ray.levels()},
                       {"schedule", ray.schedule},
                       {"k_lengths", k},
                       {"endpoint_deltas", ray.endpoint_deltas},
                       {"landing_estimate", point_json(ray.landing_estimate)},
                       {"landing", boundary_json(landing.point)},
                       {"landing_status", to_string(landing.status)},
                       {"nesting_defect", ray_nesting_defect(ray)}};
         out.tau = 4.0 * g.resolution() / ray.endpoint_deltas.back();
         write_curves(ctx, spec, out, ray.segments);
       }},
      {"rays_equivalent", "delta",
       {{"base", ParamType::kPoint, true}, {"target1", ParamType::kBoundary, true},
        {"target2", ParamType::kBoundary, true}, {"levels", ParamType::kInteger, true},
        {"bound", ParamType::kNumber, false}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const int base = g.snap(to_point(spec.params["base"]));
         const int levels = spec.params["levels"].get<int>();
         const RayApprox r1 = build_ray(g, base, to_boundary(spec.params["target1"], ctx.domain()), levels);
         const RayApprox r2 = build_ray(g, base, to_boundary(spec.params["target2"], ctx.domain()), levels);
         const double bound =
             spec.params.contains("bound") ? spec.params["bound"].get<double>() : equivalence_bound(ctx.delta_hat());
         out.result = {{"equivalent", rays_equivalent(g, r1, r2, bound)},
                       {"bound", bound},
                       {"endpoint_distances", ray_endpoint_distances(g, r1, r2)}};
         out.tau = 4.0 * g.resolution() / std::min(r1.endpoint_deltas.back(), r2.endpoint_deltas.back());
       }},
      {"test_pair_visibility", "visibility",
       {{"p", ParamType::kBoundary, true}, {"q", ParamType::kBoundary, true}, {"levels", ParamType::kInteger, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         VisibilityOptions options;
         options.seed = ctx.seed();
         options.epsilon_vis = ctx.config().tolerances.epsilon_vis;
         const VisibilityReport r =
             test_pair_visibility(g, to_boundary(spec.params["p"], ctx.domain()),
                                  to_boundary(spec.params["q"], ctx.domain()), spec.params["levels"].get<int>(), options);
         out.result = visibility_json(r);
         out.tau = r.tau;
         out.falsified = r.verdict == Verdict::kFalsified;
         write_curves(ctx, spec, out, {r.worst_geodesic});
       }},
      {"falsify_visibility", "visibility",
       {{"pairs", ParamType::kInteger, true}, {"levels", ParamType::kInteger, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const auto reports =
             falsify_visibility(g, spec.params["pairs"].get<int>(), spec.params["levels"].get<int>(), ctx.seed());
         std::map<std::string, int> counts{{"visible", 0}, {"falsified", 0}, {"inconclusive", 0}};
         json list = json::array();
         Table table{{"rank", "pair", "epsilon_hat", "levels_tested", "verdict"}, {}};
         for (std::size_t i = 0; i < reports.size(); ++i) {
           const auto& r = reports[i];
           ++counts[to_string(r.verdict)];
           out.tau = std::max(out.tau, r.tau);
           list.push_back({{"pair_index", r.pair_index},
                           {"epsilon_hat", r.epsilon_hat},
                           {"verdict", to_string(r.verdict)},
                           {"levels_tested", r.levels_tested}});
           table.rows.push_back({static_cast<long long>(i), static_cast<long long>(r.pair_index), r.epsilon_hat,
                                 static_cast<long long>(r.levels_tested), to_string(r.verdict)});
         }
         out.falsified = counts["falsified"];
         out.result = {{"pairs", reports.size()},
                       {"min_epsilon_hat", reports.front().epsilon_hat},
                       {"verdicts", counts},
                       {"head", visibility_json(reports.front())},
                       {"reports", list}};
         write_table(ctx, spec, out, table);
       }},
      {"observation_divergence", "visibility",
       {{"p", ParamType::kBoundary, true}, {"q", ParamType::kBoundary, true}, {"levels", ParamType::kInteger, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const DivergenceReport r =
             observation_divergence(g, to_boundary(spec.params["p"], ctx.domain()),
                                    to_boundary(spec.params["q"], ctx.domain()), spec.params["levels"].get<int>());
         out.result = {{"level_k", r.level_k},
                       {"strictly_increasing", r.strictly_increasing},
                       {"exceeds_double", r.exceeds_double},
                       {"passed", r.passed()}};
         Table table{{"level", "k"}, {}};
         for (std::size_t i = 0; i < r.level_k.size(); ++i) {
           table.rows.push_back({static_cast<long long>(i), r.level_k[i]});
         }
         write_table(ctx, spec, out, table);
       }},
      {"growth_envelope", "growth", {{"x0", ParamType::kPoint, true}, {"samples", ParamType::kInteger, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const auto env =
             growth_envelope(g, g.snap(to_point(spec.params["x0"])), spec.params["samples"].get<int>(), ctx.seed());
         Table table{{"ratio", "k"}, {}};
         double max_ratio = 0.0;
         double min_delta = std::numeric_limits<double>::infinity();
         for (const auto& s : env) {
           table.rows.push_back({s.ratio, s.k});
           max_ratio = std::max(max_ratio, s.ratio);
           min_delta = std::min(min_delta, g.delta(s.node));
         }
         out.result = {{"samples", env.size()}, {"max_ratio", max_ratio}};
         out.tau = 4.0 * g.resolution() / min_delta;
         write_table(ctx, spec, out, table);
       }},
      {"fit_growth", "growth",
       {{"x0", ParamType::kPoint, true}, {"samples", ParamType::kInteger, true}, {"family", ParamType::kString, true},
        {"exponent", ParamType::kNumber, false}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const auto env =
             growth_envelope(g, g.snap(to_point(spec.params["x0"])), spec.params["samples"].get<int>(), ctx.seed());
         const std::string fam = spec.params["family"];
         FitOptions options;
         options.power_exponent = param_double(spec, "exponent", 0.5);
         const GrowthFamily family = fam == "power" ? GrowthFamily::kPower : GrowthFamily::kLogAffine;
         if (fam != "power" && fam != "log-affine") {
           throw Error(ErrorCode::kInvalidParameter, "family must be log-affine or power");
         }
         const GrowthModel model = fit_growth_function(env, family, options);
         out.result = {{"model", model_json(model)}, {"envelope_margin", model.envelope_margin}};
         out.result.update(tests_json(model));
         double min_delta = std::numeric_limits<double>::infinity();
         for (const auto& s : env) min_delta = std::min(min_delta, g.delta(s.node));
         out.tau = 4.0 * g.resolution() / min_delta;
       }},
      {"convergence_tests", "growth", {{"model", ParamType::kModel, true}},
       [](Context&, const ExperimentSpec& spec, ExperimentOutput& out) {
         const GrowthModel model = to_model(spec.params["model"]);
         out.result = {{"model", model_json(model)}};
         out.result.update(tests_json(model));
       }},
      {"phi_uniform_transform", "growth",
       {{"model", ParamType::kModel, true}, {"diam", ParamType::kNumber, false}, {"delta0", ParamType::kNumber, false},
        {"x0", ParamType::kPoint, false}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const GrowthModel varphi = to_model(spec.params["model"]);
         const double diam = param_double(spec, "diam", ctx.domain().diameter());
         double delta0 = param_double(spec, "delta0", 0.0);
         if (!spec.params.contains("delta0")) {
           const Vec2 x0 = spec.params.contains("x0") ? to_point(spec.params["x0"]) : Vec2{};
           delta0 = ctx.domain().dist_to_boundary(x0);
         }
         const GrowthModel phi = phi_uniform_transform(varphi, diam, delta0);
         out.result = {{"varphi", model_json(varphi)},
                       {"phi", model_json(phi)},
                       {"diam", diam},
                       {"delta0", delta0},
                       {"integral_varphi", integral_test(varphi)},
                       {"integral_phi", integral_test(phi)},
                       {"summation_varphi", summation_test(varphi)},
                       {"summation_phi", summation_test(phi)}};
       }},
      {"gehring_hayman", "regularity", {{"pairs", ParamType::kInteger, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const RegularityReport r = gehring_hayman_constant(g, spec.params["pairs"].get<int>(), ctx.seed());
         out.result = {{"constant", r.constant},
                       {"samples", r.sample_count},
                       {"worst", {point_json(g.position(r.worst.x)), point_json(g.position(r.worst.y))}}};
         out.tau = r.tau;
       }},
      {"quasiconvexity", "regularity",
       {{"pairs", ParamType::kInteger, true}, {"extra_pairs", ParamType::kPairList, false}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         std::vector<std::pair<Vec2, Vec2>> extra;
         if (spec.params.contains("extra_pairs")) {
           for (const auto& pair : spec.params["extra_pairs"]) extra.emplace_back(to_point(pair[0]), to_point(pair[1]));
         }
         const RegularityReport r =
             quasiconvexity_constant(g, spec.params["pairs"].get<int>(), ctx.seed(), extra);
         out.result = {{"constant", r.constant}, {"samples", r.sample_count}};
         if (r.worst.x >= 0) {
           out.result["worst"] = {point_json(g.position(r.worst.x)), point_json(g.position(r.worst.y))};
         }
         out.tau = r.tau;
       }},
      {"extension_experiment", "extension",
       {{"x0", ParamType::kPoint, true}, {"rays", ParamType::kInteger, true}, {"levels", ParamType::kInteger, true},
        {"twin_stride", ParamType::kInteger, false}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         ExtensionOptions options;
         options.seed = ctx.seed();
         options.delta_hat = ctx.delta_hat();
         options.twin_stride = param_int(spec, "twin_stride", 8);
         const ExtensionExperiment ex = run_extension_experiment(
             g, g.snap(to_point(spec.params["x0"])), spec.params["rays"].get<int>(), spec.params["levels"].get<int>(),
             options);
         out.result = {{"rays", ex.n_rays},
                       {"levels", ex.levels},
                       {"delta_hat", ex.delta_hat},
                       {"equivalence_bound", ex.equivalence_bound},
                       {"step", ex.step},
                       {"surjectivity_gap", ex.surjectivity_gap},
                       {"injectivity_margin", ex.injectivity_margin},
                       {"non_equivalent_pairs", ex.non_equivalent_pairs},
                       {"unresolved_pairs", ex.unresolved_pairs},
                       {"equivalent_spread", ex.equivalent_spread},
                       {"equivalent_twins", ex.equivalent_twins},
                       {"continuity_excess", ex.continuity_excess},
                       {"flagged", ex.flagged}};
         out.tau = 2.0 * g.resolution();
         Table table{{"ray", "role", "partner", "target_x", "target_y", "landing_x", "landing_y", "levels", "status"},
                     {}};
         for (std::size_t i = 0; i < ex.rays.size(); ++i) {
           const auto& r = ex.rays[i];
           table.rows.push_back({static_cast<long long>(i), to_string(r.role), static_cast<long long>(r.partner),
                                 r.target.position.x, r.target.position.y, r.landing.position.x,
                                 r.landing.position.y, static_cast<long long>(r.levels), to_string(r.status)});
         }
         write_table(ctx, spec, out, table);
       }},
      {"injectivity_line_check", "extension",
       {{"p", ParamType::kBoundary, true}, {"q", ParamType::kBoundary, true}, {"levels", ParamType::kInteger, true}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         const MetricGraph& g = ctx.graph();
         const LineCheck c =
             injectivity_line_detail(g, to_boundary(spec.params["p"], ctx.domain()),
                                     to_boundary(spec.params["q"], ctx.domain()), spec.params["levels"].get<int>());
         out.result = {{"d_lengths", c.d_lengths}, {"c0", c.c0}, {"min_length", c.min_length}, {"passed", c.passed}};
         out.tau = 4.0 * g.resolution();
       }},
      {"compactness_check", "compactness",
       {{"n", ParamType::kInteger, true}, {"separation", ParamType::kNumber, true},
        {"metric", ParamType::kString, false}, {"extra_candidates", ParamType::kPointList, false}},
       [](Context& ctx, const ExperimentSpec& spec, ExperimentOutput& out) {
         CompactnessOptions options;
         options.h = ctx.h();
         options.connectivity = ctx.config().connectivity;
         if (spec.params.contains("extra_candidates")) {
           for (const auto& p : spec.params["extra_candidates"]) options.extra_candidates.push_back(to_point(p));
         }
         AmbientMetric metric = ctx.domain().ambient_metric();
         if (spec.params.contains("metric")) {
           const std::string m = spec.params["metric"];
           if (m != "inner" && m != "euclidean") throw Error(ErrorCode::kInvalidParameter, "metric must be inner or euclidean");
           metric = m == "inner" ? AmbientMetric::kInner : AmbientMetric::kEuclidean;
         }
         const CompactnessReport r = compactness_check(ctx.domain(), metric, spec.params["n"].get<int>(),
                                                       spec.params["separation"].get<double>(), options);
         json witness = json::array();
         for (Vec2 p : r.witness) witness.push_back(point_json(p));
         out.result = {{"verdict", to_string(r.verdict)},
                       {"witness", witness},
                       {"witness_distances", r.witness_distances},
                       {"separation", r.separation},
                       {"net_radius", r.net_radius},
                       {"candidates", r.candidates}};
         out.tau = 4.0;  // offsets sit at delta = h, so tau = 4h / h
       }},
  };
  return ops;
}

const Operation* find_operation(const std::string& name) {
  for (const auto& op : operations()) {
    if (op.name == name) return &op;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Config parsing

Domain parse_domain(const std::string& text, const json& block) {
  const std::vector<std::string> base{"domain"};
  if (!block.is_object()) config_error(text, base, "must be an object");
  if (!block.contains("kind") || !block["kind"].is_string()) config_error(text, {"domain", "kind"}, "missing or not a string");
  const std::string kind = block["kind"];

  std::optional<AmbientMetric> metric;
  if (block.contains("ambient_metric")) {
    const json& m = block["ambient_metric"];
    if (!m.is_string() || (m != "euclidean" && m != "inner")) {
      config_error(text, {"domain", "ambient_metric"}, "must be \"euclidean\" or \"inner\"");
    }
    metric = m == "inner" ? AmbientMetric::kInner : AmbientMetric::kEuclidean;
  }
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : block.items()) {
      if (key == "kind" || key == "ambient_metric") continue;
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        config_error(text, {"domain", key}, "unknown field for kind '" + kind + "'");
      }
    }
  };
  auto need = [&](const char* key, bool ok, const std::string& what) {
    if (!block.contains(key) || !ok) config_error(text, {"domain", key}, "must be " + what);
  };

  try {
    if (kind == "disk") {
      allow({"center", "radius"});
      need("center", block.contains("center") && is_point(block["center"]), "a point [x, y]");
      need("radius", block.contains("radius") && block["radius"].is_number(), "a number");
      return Domain::disk(to_point(block["center"]), block["radius"].get<double>(),
                          metric.value_or(AmbientMetric::kEuclidean));
    }
    if (kind == "rectangle") {
      allow({"x_range", "y_range"});
      for (const char* key : {"x_range", "y_range"}) need(key, block.contains(key) && is_point(block[key]), "[min, max]");
      return Domain::rectangle(block["x_range"][0].get<double>(), block["x_range"][1].get<double>(),
                               block["y_range"][0].get<double>(), block["y_range"][1].get<double>(),
                               metric.value_or(AmbientMetric::kEuclidean));
    }
    if (kind == "polygon") {
      allow({"loops"});
      const bool ok = block.contains("loops") && block["loops"].is_array() && !block["loops"].empty() &&
                      std::all_of(block["loops"].begin(), block["loops"].end(),
                                  [](const json& loop) { return matches(loop, ParamType::kPointList); });
      need("loops", ok, "a nonempty list of vertex loops");
      PolygonWithHoles poly;
      for (const auto& loop : block["loops"]) {
        poly.loops.emplace_back();
        for (const auto& p : loop) poly.loops.back().push_back(to_point(p));
      }
      return Domain::polygon(std::move(poly), metric.value_or(AmbientMetric::kEuclidean));
    }
    if (kind == "comb") {
      allow({"teeth"});
      need("teeth", block.contains("teeth") && block["teeth"].is_number_integer(), "an integer");
      return Domain::comb(block["teeth"].get<int>(), metric.value_or(AmbientMetric::kInner));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    config_error(text, base, e.what());
  }
  config_error(text, {"domain", "kind"}, "unknown kind '" + kind + "' (expected disk, rectangle, polygon or comb)");
}

}  // namespace

const std::vector<std::string>& operation_families() {
  static const std::vector<std::string> families = {"build",      "dist",      "geodesic",  "delta",      "visibility",
                                                    "growth",     "regularity", "extension", "compactness"};
  return families;
}

std::string operation_family(const std::string& operation) {
  const Operation* op = find_operation(operation);
  return op ? op->family : "";
}

std::vector<std::string> operation_names() {
  std::vector<std::string> names;
  for (const auto& op : operations()) names.push_back(op.name);
  return names;
}

double parse_resolution(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used == text.size() && v > 0.0 && std::isfinite(v)) return v;
    } else {
      const double num = std::stod(text.substr(0, slash), &used);
      if (used == slash) {
        const std::string rest = text.substr(slash + 1);
        const double den = std::stod(rest, &used);
        if (used == rest.size() && num > 0.0 && den > 0.0) return num / den;
      }
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kConfig, "resolution '" + text + "' is not a positive number or fraction");
}

ExperimentConfig parse_config(const std::string& text, const RunOptions& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("syntax error") + line_suffix(text, e.byte > 0 ? e.byte - 1 : 0) +
                                        ": " + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object (line 1)");

  static const std::vector<std::string> known = {"schema_version", "domain",    "resolution",      "connectivity", "seed",
                                                 "tolerances",     "fail_fast", "fail_on_falsify", "experiments"};
  for (const auto& [key, value] : root.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) config_error(text, {key}, "unknown field");
  }

  ExperimentConfig cfg;
  if (root.contains("schema_version") &&
      (!root["schema_version"].is_number_integer() || root["schema_version"].get<int>() != kSchemaVersion)) {
    config_error(text, {"schema_version"}, "unsupported schema version (expected 1)");
  }
  if (!root.contains("domain")) config_error(text, {"domain"}, "missing");
  cfg.domain_block = root["domain"];
  cfg.domain = parse_domain(text, root["domain"]);

  if (overrides.resolution) {
    cfg.resolution = *overrides.resolution;
  } else if (!root.contains("resolution")) {
    config_error(text, {"resolution"}, "missing (resolution must be explicit)");
  } else if (root["resolution"].is_number()) {
    cfg.resolution = root["resolution"].get<double>();
  } else if (root["resolution"].is_string()) {
    try {
      cfg.resolution = parse_resolution(root["resolution"].get<std::string>());
    } catch (const Error& e) {
      config_error(text, {"resolution"}, e.what());
    }
  } else {
    config_error(text, {"resolution"}, "must be a number or a fraction string like \"1/256\"");
  }
  if (!(cfg.resolution > 0.0) || !std::isfinite(cfg.resolution)) config_error(text, {"resolution"}, "must be positive");

  if (root.contains("connectivity")) {
    const json& c = root["connectivity"];
    if (!c.is_number_integer() || (c != 8 && c != 16 && c != 32)) {
      config_error(text, {"connectivity"}, "must be 8, 16 or 32");
    }
    cfg.connectivity = c.get<int>();
  }

  if (overrides.seed) {
    cfg.seed = *overrides.seed;
  } else if (!root.contains("seed")) {
    config_error(text, {"seed"}, "missing (seed must be explicit)");
  } else if (!root["seed"].is_number_unsigned()) {
    config_error(text, {"seed"}, "must be a non-negative integer");
  } else {
    cfg.seed = root["seed"].get<uint64_t>();
  }

  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    if (!t.is_object()) config_error(text, {"tolerances"}, "must be an object");
    for (const auto& [key, value] : t.items()) {
      if (!value.is_number() || !(value.get<double>() >= 0.0)) {
        config_error(text, {"tolerances", key}, "must be a non-negative number");
      }
      if (key == "edge_rel_tol") {
        cfg.tolerances.edge_rel_tol = value;
      } else if (key == "qh_length_rel_tol") {
        cfg.tolerances.qh_length_rel_tol = value;
      } else if (key == "epsilon_vis") {
        cfg.tolerances.epsilon_vis = value;
      } else {
        config_error(text, {"tolerances", key}, "unknown tolerance");
      }
    }
  }
  for (const char* flag : {"fail_fast", "fail_on_falsify"}) {
    if (root.contains(flag) && !root[flag].is_boolean()) config_error(text, {flag}, "must be true or false");
  }
  cfg.fail_fast = root.value("fail_fast", false) || overrides.fail_fast;
  cfg.fail_on_falsify = root.value("fail_on_falsify", false) || overrides.fail_on_falsify;

  if (!root.contains("experiments") || !root["experiments"].is_array()) {
    config_error(text, {"experiments"}, "missing or not a list");
  }
  const json& list = root["experiments"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string idx = std::to_string(i);
    const json& e = list[i];
    if (!e.is_object()) config_error(text, {"experiments", idx}, "must be an object");
    for (const auto& [key, value] : e.items()) {
      if (key != "name" && key != "operation" && key != "params" && key != "output") {
        config_error(text, {"experiments", idx, key}, "unknown field");
      }
    }
    if (!e.contains("operation") || !e["operation"].is_string()) {
      config_error(text, {"experiments", idx, "operation"}, "missing or not a string");
    }
    ExperimentSpec spec;
    spec.operation = e["operation"];
    const Operation* op = find_operation(spec.operation);
    if (!op) config_error(text, {"experiments", idx, "operation"}, "unknown operation '" + spec.operation + "'");
    spec.family = op->family;
    if (e.contains("name") && !e["name"].is_string()) config_error(text, {"experiments", idx, "name"}, "must be a string");
    spec.name = e.value("name", spec.operation + "#" + idx);
    if (e.contains("output")) {
      if (!e["output"].is_string()) config_error(text, {"experiments", idx, "output"}, "must be a string");
      spec.output = e["output"];
      const std::filesystem::path out(spec.output);
      if (out.is_absolute() || spec.output.find("..") != std::string::npos) {
        config_error(text, {"experiments", idx, "output"}, "must be a relative path inside the output directory");
      }
    }
    spec.params = e.value("params", json::object());
    if (!spec.params.is_object()) config_error(text, {"experiments", idx, "params"}, "must be an object");
    for (const auto& [key, value] : spec.params.items()) {
      const auto it = std::find_if(op->params.begin(), op->params.end(), [&](const ParamSpec& p) { return p.name == key; });
      if (it == op->params.end()) {
        config_error(text, {"experiments", idx, "params", key}, "unknown parameter for '" + spec.operation + "'");
      }
      if (!matches(value, it->type)) {
        config_error(text, {"experiments", idx, "params", key}, "must be " + type_name(it->type));
      }
    }
    for (const auto& p : op->params) {
      if (p.required && !spec.params.contains(p.name)) {
        config_error(text, {"experiments", idx, "params"}, "missing parameter '" + p.name + "'");
      }
    }
    cfg.experiments.push_back(std::move(spec));
  }
  return cfg;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInternal, "SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string body_checksum(const json& body) { return sha256_hex(body.dump()); }

bool verify_report(const json& report) {
  return report.is_object() && report.contains("body") && report.contains("body_sha256") &&
         report["body_sha256"].is_string() && report["body_sha256"] == body_checksum(report["body"]);
}

RunOutcome run_config_text(const std::string& text, const RunOptions& options) {
  const ExperimentConfig cfg = parse_config(text, options);
  if (!options.family.empty() &&
      std::find(operation_families().begin(), operation_families().end(), options.family) ==
          operation_families().end()) {
    throw Error(ErrorCode::kConfig, "unknown experiment family '" + options.family + "'");
  }
  Context ctx(cfg, options.out_dir);
  const auto start = std::chrono::steady_clock::now();

  json echo = {{"schema_version", kSchemaVersion},
               {"domain", cfg.domain_block},
               {"resolution", cfg.resolution},
               {"connectivity", cfg.connectivity},
               {"seed", cfg.seed},
               {"tolerances",
                {{"edge_rel_tol", cfg.tolerances.edge_rel_tol},
                 {"qh_length_rel_tol", cfg.tolerances.qh_length_rel_tol},
                 {"epsilon_vis", cfg.tolerances.epsilon_vis}}},
               {"fail_fast", cfg.fail_fast},
               {"fail_on_falsify", cfg.fail_on_falsify}};
  json experiments = json::array();
  json timing = json::array();
  RunOutcome outcome;

  for (const ExperimentSpec& spec : cfg.experiments) {
    if (!options.family.empty() && spec.family != options.family) continue;
    const auto t0 = std::chrono::steady_clock::now();
    json entry = {{"name", spec.name},
                  {"operation", spec.operation},
                  {"family", spec.family},
                  {"params", spec.params},
                  {"resolution", cfg.resolution}};
    ExperimentOutput out;
    try {
      const Operation* op = find_operation(spec.operation);
      op->run(ctx, spec, out);
      entry["status"] = "ok";
      entry["result"] = out.result;
      entry["tau"] = out.tau;
      entry["outputs"] = out.outputs;
      outcome.falsified += out.falsified;
    } catch (const Error& e) {
      entry["status"] = "error";
      entry["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
      ++outcome.failed;
    } catch (const std::exception& e) {
      entry["status"] = "error";
      entry["error"] = {{"code", to_string(ErrorCode::kInternal)}, {"message", e.what()}};
      ++outcome.failed;
    }
    experiments.push_back(entry);
    timing.push_back({{"name", spec.name},
                      {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}});
    if (outcome.failed > 0 && cfg.fail_fast) break;
  }

  json body = {{"tool_version", kToolVersion},
               {"input_sha256", sha256_hex(text)},
               {"config", echo},
               {"experiments", experiments}};
  outcome.report = {{"report_version", kReportVersion},
                    {"tool_version", kToolVersion},
                    {"body", body},
                    {"body_sha256", body_checksum(body)},
                    {"timing",
                     {{"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
                      {"experiments", timing}}}};
  outcome.report_path = ctx.output_path("report.json");
  write_text(outcome.report_path, outcome.report.dump(2) + "\n");

  if (outcome.failed > 0) {
    outcome.exit_code = kExitFailure;
  } else if (cfg.fail_on_falsify && outcome.falsified > 0) {
    outcome.exit_code = kExitFalsified;
  }
  return outcome;
}

RunOutcome run_config_file(const std::string& path, const RunOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return run_config_text(text.str(), options);
}

}  // namespace qhlab
