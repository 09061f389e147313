#pragma once

#include <map>
#include <optional>
#include <string>

#include "pensplit/problems.hpp"
#include "pensplit/schedules.hpp"
#include "pensplit/solvers.hpp"

namespace pensplit {

/// Parsed and validated run configuration. The document is a flat
/// [section] key = value file with strict unknown-key rejection.
struct RunConfig {
  std::string problem_name;
  std::map<std::string, std::string> problem_params;
  SolverKind solver = SolverKind::Fb;
  double lambda0 = 1.0, p = 1.0, beta0 = 1.0, q = 0.0;
  StoppingPolicy stopping;
  unsigned seed = 0;
  std::string output_path = "trace.csv";
  bool override_admissibility = false;
  std::optional<Vector> x0;
  std::optional<Vector> v0;
};

/// Throws ConfigError naming the offending key and line.
RunConfig parse_config(const std::string& text);

RunConfig parse_config_file(const std::string& path);

/// Instantiates the configured problem from its parameter map.
ProblemInstance build_problem(const RunConfig& cfg);

/// Executes the run and writes the trace and summary documents.
/// Exit status: 0 completed, 2 hypotheses rejected, 3 numerical abort,
/// 4 unwritable output.
int run_command(const RunConfig& cfg);

/// Names and parameter keys of the problem catalog (for the CLI).
std::string describe_problems();

/// Human-readable schedule report + admissibility verdict (for the CLI).
std::string describe_schedule(const PolynomialSchedule& s, SolverKind kind,
                              const ScheduleModuli& moduli);

}  // namespace pensplit
