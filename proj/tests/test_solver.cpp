#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "oracles.hpp"
#include "pwlmilp/blocking.hpp"
#include "pwlmilp/milp.hpp"
#include "pwlmilp/solver.hpp"

using namespace pwlmilp;

namespace {

// The adapter tests need a configured solver; the bundled scipy-backed
// shim is used when available, otherwise the cases are skipped (spec:
// absence of a solver must not fail the suite).
const char* kShim = "python3 tools/lp_solve_milp.py {lp} {sol} {tl}";

bool shim_available() {
  static int ok = -1;
  if (ok < 0)
    ok = std::system(
             "python3 -c 'import scipy.optimize, numpy' > /dev/null 2>&1") == 0
             ? 1
             : 0;
  return ok == 1;
}

std::string workdir() {
  std::filesystem::create_directories("build/solver_test");
  return "build/solver_test";
}

}  // namespace

TEST_CASE("adapter solves a trivial model") {
  if (!shim_available()) {
    MESSAGE("scipy not available; adapter test skipped");
    return;
  }
  milp::MilpModel m;
  int x = m.add_var("x", milp::VarKind::Continuous, 0.0, 10.0);
  m.add_con("lo", {{x, 1.0}}, milp::Sense::GE, 3.0);
  m.obj.sense = milp::ObjSense::Minimize;
  m.obj.terms = {{x, 1.0}};
  auto res = solver::solve_external(m, kShim, 30.0, workdir());
  CHECK(res.status == solver::SolveStatus::Optimal);
  CHECK(res.objective == doctest::Approx(3.0));
  CHECK(res.values.at("x") == doctest::Approx(3.0));
}

TEST_CASE("adapter reports infeasibility") {
  if (!shim_available()) return;
  milp::MilpModel m;
  int x = m.add_var("x", milp::VarKind::Continuous, 0.0, 10.0);
  m.add_con("up", {{x, 1.0}}, milp::Sense::LE, 0.0);
  m.add_con("lo", {{x, 1.0}}, milp::Sense::GE, 1.0);
  auto res = solver::solve_external(m, kShim, 30.0, workdir());
  CHECK(res.status == solver::SolveStatus::Infeasible);
}

TEST_CASE("adapter solves the worked-example disjunction") {
  if (!shim_available()) return;
  auto p = oracles::example_partition_b3();
  milp::DisjunctionSpec spec;
  spec.sets = mesh::to_set_system(p);
  biclique::Biclique bc;
  bc.a = {4};
  bc.b = {0, 3};
  spec.cover.bicliques = {bc};
  blocking::Coloring col;
  col.q = 3;
  col.gamma = {1, 2, 3, 1};
  col.patterns = {{1, 2, 3}, {1, 2}, {1, 3}, {2, 3}, {1}};
  spec.coloring = col;
  spec.has_rank3 = true;
  auto m = milp::build_gib(spec);
  m.obj.sense = milp::ObjSense::Maximize;
  m.obj.terms = {{0, 1.0}};  // lam_0 is the interior vertex u
  auto res = solver::solve_external(m, kShim, 30.0, workdir());
  CHECK(res.status == solver::SolveStatus::Optimal);
  CHECK(res.objective == doctest::Approx(1.0));
  // The optimum puts all mass on u.
  CHECK(res.values.at("lam_0") == doctest::Approx(1.0));
}

TEST_CASE("adapter errors are typed") {
  CHECK_THROWS_AS(solver::solve_external(milp::MilpModel{}, "", 1.0, "build"),
                  Error);
  if (!shim_available()) return;
  milp::MilpModel m;
  m.add_var("x", milp::VarKind::Continuous, 0.0, 1.0);
  CHECK_THROWS_AS(
      solver::solve_external(m, "false # {lp} {sol} {tl}", 1.0, workdir()),
      Error);
}
