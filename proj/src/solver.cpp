#include "pwlmilp/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pwlmilp/lp_format.hpp"

namespace pwlmilp::solver {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Error: return "error";
  }
  return "error";
}

std::string solver_from_env() {
  const char* cmd = std::getenv("PWLMILP_SOLVER_CMD");
  return cmd ? cmd : "";
}

namespace {

std::string substitute(std::string templ, const std::string& key,
                       const std::string& value) {
  std::string pat = "{" + key + "}";
  for (std::size_t pos = templ.find(pat); pos != std::string::npos;
       pos = templ.find(pat))
    templ.replace(pos, pat.size(), value);
  return templ;
}

}  // namespace

SolveResult solve_external(const milp::MilpModel& m,
                           const std::string& command_template,
                           double time_limit_s, const std::string& workdir) {
  if (command_template.empty())
    throw Error(ErrorCode::SolverNotFound, "no solver command configured");
  const std::string lp_path = workdir + "/model.lp";
  const std::string sol_path = workdir + "/model.sol";
  const std::string log_path = workdir + "/solver.log";
  milp::write_lp_file(m, lp_path);
  std::remove(sol_path.c_str());

  std::string cmd = substitute(command_template, "lp", lp_path);
  cmd = substitute(cmd, "sol", sol_path);
  cmd = substitute(cmd, "tl", std::to_string(time_limit_s));
  cmd += " > " + log_path + " 2>&1";

  auto start = std::chrono::steady_clock::now();
  int rc = std::system(cmd.c_str());
  auto stop = std::chrono::steady_clock::now();

  SolveResult res;
  res.log_path = log_path;
  res.wall_seconds = std::chrono::duration<double>(stop - start).count();

  std::ifstream sol(sol_path);
  if (!sol) {
    if (rc != 0)
      throw Error(ErrorCode::SolverNotFound,
                  "solver command failed (exit " + std::to_string(rc) +
                      "), see " + log_path);
    throw Error(ErrorCode::ParseError, "solver produced no solution file");
  }

  std::string line;
  bool have_status = false;
  while (std::getline(sol, line)) {
    std::stringstream ls(line);
    std::string head;
    if (!(ls >> head) || head.empty() || head[0] == '#') continue;
    if (head == "status") {
      std::string s;
      ls >> s;
      have_status = true;
      if (s == "optimal") res.status = SolveStatus::Optimal;
      else if (s == "feasible") res.status = SolveStatus::Feasible;
      else if (s == "infeasible") res.status = SolveStatus::Infeasible;
      else if (s == "timeout") res.status = SolveStatus::Timeout;
      else res.status = SolveStatus::Error;
    } else if (head == "objective") {
      ls >> res.objective;
    } else {
      double v;
      if (!(ls >> v))
        throw Error(ErrorCode::ParseError,
                    "solution line not parseable: " + line);
      res.values[head] = v;
    }
  }
  if (!have_status)
    throw Error(ErrorCode::ParseError, "solution file lacks a status line");

  if (res.status == SolveStatus::Optimal ||
      res.status == SolveStatus::Feasible) {
    // Round near-integral binaries, then re-check feasibility locally.
    for (const auto& v : m.vars) {
      if (v.kind != milp::VarKind::Binary) continue;
      auto it = res.values.find(v.name);
      if (it == res.values.end()) continue;
      double rounded = std::round(it->second);
      if (std::abs(it->second - rounded) > 1e-6)
        throw Error(ErrorCode::ValidationFailed,
                    "binary " + v.name + " is fractional: " +
                        std::to_string(it->second));
      it->second = rounded;
    }
    double viol = m.max_violation(res.values);
    if (viol > 1e-6)
      throw Error(ErrorCode::ValidationFailed,
                  "solution violates constraints by " + std::to_string(viol));
  }
  return res;
}

}  // namespace pwlmilp::solver
