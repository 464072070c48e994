#ifndef PWLMILP_SAT_HPP
#define PWLMILP_SAT_HPP

#include <optional>
#include <string>
#include <vector>

namespace pwlmilp::sat {

/// CNF with DIMACS-style literals (variable v > 0, negation -v).
struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;

  int add_var() { return ++num_vars; }
  void add_clause(std::vector<int> lits) { clauses.push_back(std::move(lits)); }
};

/// DPLL with unit propagation and activity-based branching. Returns an
/// assignment indexed by variable (index 0 unused) or nullopt when
/// unsatisfiable.
std::optional<std::vector<bool>> solve(const Cnf& f);

std::string to_dimacs(const Cnf& f);

}  // namespace pwlmilp::sat

#endif  // PWLMILP_SAT_HPP
