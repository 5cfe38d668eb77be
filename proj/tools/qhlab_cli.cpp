// qhlab: run experiment configs and inspect reports.
//
//   qhlab run config.json --out-dir out
//   qhlab dist config.json          # only the "dist" experiments of a config
//   qhlab report out/report.json    # verify the checksum, print a summary

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qhlab/error.hpp"
#include "qhlab/harness.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string resolution;
  uint64_t seed = 0;
  std::string out_dir;
  bool fail_fast = false;
  bool fail_on_falsify = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Override the config seed");
  cmd->add_option("--resolution", args.resolution, "Override the grid spacing h, e.g. 1/256");
  cmd->add_option("--out-dir", args.out_dir, "Output directory (default: $QHLAB_OUT_DIR or .)");
  cmd->add_flag("--fail-fast", args.fail_fast, "Stop at the first failing experiment");
  cmd->add_flag("--fail-on-falsify", args.fail_on_falsify, "Exit 3 when a visibility test is falsified");
}

int run(CLI::App* cmd, const CommonArgs& args, const std::string& family) {
  qhlab::RunOptions options;
  if (cmd->count("--seed")) options.seed = args.seed;
  if (!args.resolution.empty()) options.resolution = qhlab::parse_resolution(args.resolution);
  if (!args.out_dir.empty()) {
    options.out_dir = args.out_dir;
  } else if (const char* env = std::getenv("QHLAB_OUT_DIR"); env && *env) {
    options.out_dir = env;
  }
  options.fail_fast = args.fail_fast;
  options.fail_on_falsify = args.fail_on_falsify;
  options.family = family;

  const qhlab::RunOutcome outcome = qhlab::run_config_file(args.config, options);
  for (const auto& e : outcome.report["body"]["experiments"]) {
    std::cout << e["name"].get<std::string>() << ": " << e["status"].get<std::string>();
    if (e.contains("error")) std::cout << " (" << e["error"]["message"].get<std::string>() << ")";
    std::cout << "\n";
  }
  std::cout << "report: " << outcome.report_path << "\n";
  return outcome.exit_code;
}

int report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qhlab::Error(qhlab::ErrorCode::kConfig, "cannot read report '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw qhlab::Error(qhlab::ErrorCode::kConfig, std::string("report is not valid JSON: ") + e.what());
  }
  const bool ok = qhlab::verify_report(doc);
  std::cout << "checksum: " << (ok ? "ok" : "MISMATCH") << "\n";
  if (!ok) return qhlab::kExitFailure;
  const auto& body = doc["body"];
  std::cout << "tool_version: " << body["tool_version"].get<std::string>() << "\n"
            << "seed: " << body["config"]["seed"] << "  resolution: " << body["config"]["resolution"] << "\n";
  int failed = 0;
  for (const auto& e : body["experiments"]) {
    const std::string status = e["status"];
    failed += status != "ok";
    std::cout << "  " << e["name"].get<std::string>() << " [" << e["operation"].get<std::string>() << "] " << status;
    if (e.contains("tau")) std::cout << "  tau=" << e["tau"];
    std::cout << "\n";
  }
  return failed ? qhlab::kExitFailure : qhlab::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasihyperbolic geometry experiments on planar domains"};
  app.set_version_flag("--version", qhlab::kToolVersion);
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* run_cmd = app.add_subcommand("run", "Run every experiment in a config");
  add_common(run_cmd, args);

  std::vector<std::pair<std::string, CLI::App*>> family_cmds;
  for (const std::string& family : qhlab::operation_families()) {
    CLI::App* cmd = app.add_subcommand(family, "Run only the '" + family + "' experiments of a config");
    add_common(cmd, args);
    family_cmds.emplace_back(family, cmd);
  }

  std::string report_path;
  CLI::App* report_cmd = app.add_subcommand("report", "Verify a report checksum and summarize it");
  report_cmd->add_option("report", report_path, "report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qhlab::kExitConfig;
  }

  try {
    if (*report_cmd) return report(report_path);
    if (*run_cmd) return run(run_cmd, args, "");
    for (const auto& [family, cmd] : family_cmds) {
      if (*cmd) return run(cmd, args, family);
    }
  } catch (const qhlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == qhlab::ErrorCode::kConfig ? qhlab::kExitConfig : qhlab::kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qhlab::kExitFailure;
  }
  return qhlab::kExitOk;
}
