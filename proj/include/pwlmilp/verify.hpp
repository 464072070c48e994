#ifndef PWLMILP_VERIFY_HPP
#define PWLMILP_VERIFY_HPP

#include <vector>

#include "pwlmilp/conflict.hpp"
#include "pwlmilp/milp.hpp"

namespace pwlmilp::milp {

struct VerifyReport {
  bool ok = false;
  // Maximal reachable lambda supports over all binary assignments.
  std::vector<std::vector<int>> reachable_supports;
  // Supports violating "contained in some S_i".
  std::vector<std::vector<int>> infeasible_supports;
  // Set indices no assignment can reach.
  std::vector<int> unreachable_sets;
  std::size_t assignments_total = 0;
  std::size_t assignments_feasible = 0;
};

/// Enumerates every binary assignment, derives the set of lambda
/// variables not fixed to zero by bound propagation (the reachable
/// support), and checks that (i) each reachable support is contained in
/// a member of the set system and (ii) every member is reachable.
/// Lambda variables follow the lam_<vertex> naming contract.
VerifyReport verify_formulation(const MilpModel& m, const mesh::SetSystem& s,
                                int max_binaries = 24);

/// Antichain of maximal sets (for support-equivalence comparisons).
std::vector<std::vector<int>> maximal_sets(std::vector<std::vector<int>> sets);

}  // namespace pwlmilp::milp

#endif  // PWLMILP_VERIFY_HPP
