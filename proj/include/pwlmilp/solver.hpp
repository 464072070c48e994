#ifndef PWLMILP_SOLVER_HPP
#define PWLMILP_SOLVER_HPP

#include <map>
#include <string>

#include "pwlmilp/milp.hpp"

namespace pwlmilp::solver {

enum class SolveStatus { Optimal, Feasible, Infeasible, Timeout, Error };

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  double objective = 0.0;
  std::map<std::string, double> values;
  std::string log_path;
  double wall_seconds = 0.0;
};

/// Runs an external MILP solver through files and a command template
/// with {lp}, {sol} and {tl} placeholders. The solution file format is
/// "status <word>", optional "objective <num>", then "<var> <value>"
/// lines. Returned points are re-validated against the model (1e-6)
/// and binaries are rounded.
SolveResult solve_external(const milp::MilpModel& m,
                           const std::string& command_template,
                           double time_limit_s, const std::string& workdir);

/// Command template from PWLMILP_SOLVER_CMD, empty when unset.
std::string solver_from_env();

const char* to_string(SolveStatus s);

}  // namespace pwlmilp::solver

#endif  // PWLMILP_SOLVER_HPP
