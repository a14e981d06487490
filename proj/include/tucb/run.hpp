#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tucb/engine.hpp"
#include "tucb/objectives.hpp"

namespace tucb {

/// Fully resolved run configuration (defaults < config file < CLI flags).
/// Echoed verbatim into the trace header.
struct RunConfig {
  std::string algo = "tucb";  // tucb | ctucb | uniformmesh | ucb1
  std::string objective = "himmelblau";
  // himmelblau | goldstein | himmelblau-ctx | goldstein-ctx | external
  std::int64_t rounds = 500;  // T; also the horizon
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> noise_seed;    // defaults to seed
  std::optional<std::uint64_t> context_seed;  // defaults to seed
  std::string noise = "uniform:0.05";
  std::string refinement;  // empty: variant default
  std::string exploration = "paper";
  double v = 1.0, v1 = 1.0, v2 = 0.0, v3 = 1.0;
  double concentration = 0.1;
  double lipschitz_scale = 0.01;
  double eta = 1e-3;
  std::int64_t max_leaves = 0;  // 0: unlimited static cap
  std::int64_t max_depth = 0;   // 0: unlimited
  double min_leaf_diameter = 0.0;
  std::string feature_policy = "all-features";  // or round-robin
  double leaf_cap_exponent = 0.75;
  std::string metric = "linf";  // or l2
  std::int64_t arms = 0;        // ucb1 only
  int grid_n = 1024;
  // External-objective domain (serve mode).
  std::vector<double> domain_lo;
  std::vector<double> domain_hi;
  std::string out_prefix = "tucb_run";

  nlohmann::json to_json() const;
  EngineConfig engine_config() const;
};

struct RunResult {
  int exit_code = 0;
  std::vector<Decision> decisions;
  std::string trace_path;
};

/// Executes T rounds against the configured objective; writes the decision
/// trace, the regret CSV (when the optimum is known) and the audit summary.
/// Exit codes: 0 ok, 1 audit gate failed, 2 bad config, 3 mid-run failure.
RunResult run_session(const RunConfig& config, std::ostream& diag);

/// Ask/tell session over the given streams (stdin/stdout in the CLI).
RunResult serve_session(const RunConfig& config, std::istream& in,
                        std::ostream& protocol_out, std::ostream& diag);

/// Independent seeded runs; returns the worst exit code.
int sweep_sessions(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                   int jobs, std::ostream& diag);

/// `audit` subcommand body: reads a trace file, prints the sums/bounds and
/// PASS/FAIL. Nonzero exit on FAIL.
int audit_trace_file(const std::string& trace_path, const std::vector<double>& alphas,
                     std::ostream& out);

/// `gp-demo` subcommand body: reads a partition JSON and a data CSV, writes
/// the smoothing-curve CSV.
int gp_demo_file(const std::string& partition_path, const std::string& data_path,
                 const std::vector<double>& alphas, double noise_var, int grid_n,
                 const std::string& out_path, std::ostream& diag);

/// Parses "0..9" (inclusive range) or "1,4,7" into a seed list.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace tucb
