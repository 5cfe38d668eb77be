#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qhlab/error.hpp"
#include "qhlab/figures.hpp"
#include "qhlab/harness.hpp"
#include "qhlab/metric.hpp"
#include "support/oracles.hpp"

using namespace qhlab;
namespace fs = std::filesystem;

namespace {

std::string temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qhlab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kMinimal = R"({
  "domain": {"kind": "disk", "center": [0, 0], "radius": 1},
  "resolution": "1/64",
  "seed": 7,
  "experiments": [
    {"name": "radial", "operation": "qh_distance", "params": {"x": [0, 0], "y": [0.6321205588285577, 0]}}
  ]
})";

RunOptions in(const std::string& dir) {
  RunOptions o;
  o.out_dir = dir;
  return o;
}

}  // namespace

TEST_CASE("minimal config runs and reports the distance") {
  const std::string dir = temp_dir("minimal");
  const RunOutcome out = run_config_text(kMinimal, in(dir));
  CHECK(out.exit_code == kExitOk);
  const auto& e = out.report["body"]["experiments"][0];
  CHECK(e["status"] == "ok");
  CHECK(std::abs(e["result"]["value"].get<double>() - 1.0) < 0.05);
  CHECK(e["resolution"].get<double>() == 1.0 / 64);
  CHECK(e.contains("tau"));
  CHECK(verify_report(out.report));
  CHECK(fs::exists(fs::path(dir) / "report.json"));
}

TEST_CASE("config errors carry field and line") {
  const std::string torus = R"({
  "domain": {"kind": "torus"},
  "resolution": 0.1, "seed": 1, "experiments": []
})";
  CHECK_THROWS_WITH_AS(parse_config(torus), doctest::Contains("line 2"), Error);
  try {
    parse_config(torus);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(std::string(e.what()).find("domain.kind") != std::string::npos);
  }

  const std::string unknown_op = R"({"domain": {"kind": "disk", "center": [0, 0], "radius": 1},
 "resolution": 0.1, "seed": 1,
 "experiments": [{"operation": "teleport"}]})";
  CHECK_THROWS_WITH_AS(parse_config(unknown_op), doctest::Contains("unknown operation"), Error);

  const std::string bad_param = R"({"domain": {"kind": "disk", "center": [0, 0], "radius": 1},
 "resolution": 0.1, "seed": 1,
 "experiments": [{"operation": "qh_distance", "params": {"x": [0, 0], "y": "far"}}]})";
  CHECK_THROWS_WITH_AS(parse_config(bad_param), doctest::Contains("params.y"), Error);

  const std::string no_seed = R"({"domain": {"kind": "disk", "center": [0, 0], "radius": 1},
 "resolution": 0.1, "experiments": []})";
  CHECK_THROWS_WITH_AS(parse_config(no_seed), doctest::Contains("seed"), Error);
  RunOptions with_seed;
  with_seed.seed = 3;
  CHECK(parse_config(no_seed, with_seed).seed == 3);

  CHECK_THROWS_AS(parse_config("{ not json"), Error);
}

TEST_CASE("resolution strings") {
  CHECK(parse_resolution("1/256") == 1.0 / 256);
  CHECK(parse_resolution("0.125") == 0.125);
  CHECK_THROWS_AS(parse_resolution("fine"), Error);
  CHECK_THROWS_AS(parse_resolution("-1"), Error);
}

TEST_CASE("runtime failures are recorded, fail-fast stops") {
  const std::string cfg = R"({"domain": {"kind": "disk", "center": [0, 0], "radius": 1},
 "resolution": "1/32", "seed": 1,
 "experiments": [
   {"name": "outside", "operation": "qh_distance", "params": {"x": [0, 0], "y": [3, 0]}},
   {"name": "fine", "operation": "inner_distance", "params": {"x": [0, 0], "y": [0.5, 0]}}
 ]})";
  const RunOutcome all = run_config_text(cfg, in(temp_dir("fail")));
  CHECK(all.exit_code == kExitFailure);
  REQUIRE(all.report["body"]["experiments"].size() == 2);
  CHECK(all.report["body"]["experiments"][0]["error"]["code"] == "outside-domain");
  CHECK(all.report["body"]["experiments"][1]["status"] == "ok");

  RunOptions fast = in(temp_dir("fail_fast"));
  fast.fail_fast = true;
  CHECK(run_config_text(cfg, fast).report["body"]["experiments"].size() == 1);
}

TEST_CASE("re-runs give a byte-identical body") {
  const std::string cfg = R"({"domain": {"kind": "comb", "teeth": 3},
 "resolution": "1/48", "seed": 11,
 "experiments": [
   {"operation": "estimate_delta", "params": {"samples": 3}},
   {"operation": "falsify_visibility", "params": {"pairs": 3, "levels": 3}, "output": "vis.csv"},
   {"operation": "qh_geodesic", "params": {"x": [0.2, 0.1], "y": [0.3, 0.1]}, "output": "geo.svg"}
 ]})";
  const std::string dir_a = temp_dir("det_a");
  const std::string dir_b = temp_dir("det_b");
  const RunOutcome a = run_config_text(cfg, in(dir_a));
  const RunOutcome b = run_config_text(cfg, in(dir_b));
  CHECK(a.report["body"].dump() == b.report["body"].dump());
  CHECK(a.report["body_sha256"] == b.report["body_sha256"]);
  CHECK(slurp(dir_a + "/vis.csv") == slurp(dir_b + "/vis.csv"));
  CHECK(!slurp(dir_a + "/geo.svg").empty());

  nlohmann::json tampered = a.report;
  tampered["body"]["experiments"][0]["result"]["delta_hat"] = 0.0;
  CHECK_FALSE(verify_report(tampered));
}

TEST_CASE("family filter runs only matching experiments") {
  const std::string cfg = R"({"domain": {"kind": "rectangle", "x_range": [0, 1], "y_range": [0, 1]},
 "resolution": "1/32", "seed": 2,
 "experiments": [
   {"operation": "qh_length", "params": {"polyline": [[0.5, 0.5], [0.5, 0.75]]}},
   {"operation": "build_graph"}
 ]})";
  RunOptions o = in(temp_dir("family"));
  o.family = "dist";
  const RunOutcome out = run_config_text(cfg, o);
  REQUIRE(out.report["body"]["experiments"].size() == 1);
  CHECK(out.report["body"]["experiments"][0]["result"]["value"].get<double>() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("every operation has a family the CLI knows") {
  for (const auto& op : operation_names()) {
    const std::string fam = operation_family(op);
    CHECK(std::find(operation_families().begin(), operation_families().end(), fam) != operation_families().end());
  }
  CHECK(operation_family("nope").empty());
}

TEST_CASE("figures and tables") {
  const std::string dir = temp_dir("figures");
  const MetricGraph g = MetricGraph::build(Domain::disk({0, 0}, 1), 1.0 / 64);
  const ParametrizedCurve c = qh_geodesic(g, {-0.9, 0.1}, {0.8, -0.3});
  emit_figure(dir + "/geo.svg", g.domain(), {c}, FigureFormat::kSvg);
  const std::string svg = slurp(dir + "/geo.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  // One polyline with as many points as the curve has vertices.
  const auto pos = svg.find("<polyline");
  REQUIRE(pos != std::string::npos);
  CHECK(svg.find("<polyline", pos + 1) == std::string::npos);
  const auto pts = svg.find("points=\"", pos);
  const auto end = svg.find('"', pts + 8);
  const std::string points = svg.substr(pts + 8, end - pts - 8);
  CHECK(static_cast<std::size_t>(std::count(points.begin(), points.end(), ',')) == c.size());

  Table envelope{{"ratio", "k"}, {}};
  for (int i = 0; i < 500; ++i) envelope.rows.push_back({1.0 + i, std::log(1.0 + i)});
  emit_table(dir + "/env.csv", envelope, FigureFormat::kCsv);
  const std::string csv = slurp(dir + "/env.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 501);

  CHECK(render_csv(Table{{"a", "b"}, {}}) == "a,b\n");
  CHECK_THROWS_AS(parse_figure_format("png"), Error);
  CHECK_THROWS_AS(emit_table(dir + "/t.svg", envelope, FigureFormat::kSvg), Error);
}
