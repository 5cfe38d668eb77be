#pragma once

// Config-driven experiment runner behind the command-line tool.
//
// A config names a domain, a resolution, a seed and a list of experiments;
// running it writes a JSON report whose "body" is checksummed (timing lives
// outside the body) plus any per-experiment tables and figures.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhlab/domain.hpp"

namespace qhlab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;
inline constexpr int kReportVersion = 1;

struct ExperimentSpec {
  std::string name;
  std::string operation;
  std::string family;
  nlohmann::json params;
  std::string output;  // relative to the output directory; empty for none
};

struct Tolerances {
  double edge_rel_tol = 1e-12;
  double qh_length_rel_tol = 1e-6;
  double epsilon_vis = 0.0;  // 0: 4h
};

struct ExperimentConfig {
  nlohmann::json domain_block;
  Domain domain = Domain::disk({0.0, 0.0}, 1.0);
  double resolution = 0.0;
  int connectivity = 16;
  uint64_t seed = 0;
  Tolerances tolerances;
  bool fail_fast = false;
  bool fail_on_falsify = false;
  std::vector<ExperimentSpec> experiments;
};

struct RunOptions {
  std::optional<uint64_t> seed;
  std::optional<double> resolution;
  std::string out_dir = ".";
  bool fail_fast = false;
  bool fail_on_falsify = false;
  /// Only run experiments of this family ("build", "dist", ...); empty runs all.
  std::string family;
};

struct RunOutcome {
  int exit_code = 0;
  nlohmann::json report;
  std::string report_path;
  int failed = 0;
  int falsified = 0;
};

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitFalsified = 3 };

/// Operation families, in the order the CLI lists them.
const std::vector<std::string>& operation_families();
/// Family of an operation, or empty if the operation is unknown.
std::string operation_family(const std::string& operation);
std::vector<std::string> operation_names();

/// Parses and validates a config; config-error messages carry the field path
/// and, when it can be located, the line.
ExperimentConfig parse_config(const std::string& text, const RunOptions& overrides = {});

/// Accepts "0.00390625" or "1/256".
double parse_resolution(const std::string& text);

std::string sha256_hex(const std::string& bytes);
std::string body_checksum(const nlohmann::json& body);
/// True iff the report's body_sha256 matches its body.
bool verify_report(const nlohmann::json& report);

/// Runs a config. Config errors throw Error(kConfig); experiment failures are
/// recorded in the report.
RunOutcome run_config_text(const std::string& text, const RunOptions& options);
RunOutcome run_config_file(const std::string& path, const RunOptions& options);

}  // namespace qhlab
