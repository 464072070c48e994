#include "pwlmilp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace pwlmilp::milp {

namespace {

constexpr double kTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lb, ub;
};

// One pass of bound tightening; returns false on proven infeasibility.
bool tighten(const MilpModel& m, std::vector<Interval>& box, bool& changed) {
  for (const auto& c : m.cons) {
    // Both senses of an equality are processed.
    for (int dir = 0; dir < 2; ++dir) {
      if (dir == 0 && c.sense == Sense::GE) continue;
      if (dir == 1 && c.sense == Sense::LE) continue;
      // dir 0: sum <= rhs; dir 1: sum >= rhs i.e. -sum <= -rhs.
      double minact = 0.0;
      bool unbounded = false;
      for (auto [vi, coef] : c.terms) {
        double a = dir == 0 ? coef : -coef;
        double lo = a > 0 ? box[vi].lb : box[vi].ub;
        if (std::isinf(lo)) {
          unbounded = true;
          break;
        }
        minact += a * lo;
      }
      double rhs = dir == 0 ? c.rhs : -c.rhs;
      if (unbounded) continue;
      if (minact > rhs + kTol) return false;
      for (auto [vi, coef] : c.terms) {
        double a = dir == 0 ? coef : -coef;
        if (a > 0) {
          double slack = rhs - (minact - a * box[vi].lb);
          double new_ub = slack / a;
          if (new_ub < box[vi].ub - 1e-12) {
            box[vi].ub = new_ub;
            changed = true;
            if (box[vi].ub < box[vi].lb - kTol) return false;
          }
        } else {
          double slack = rhs - (minact - a * box[vi].ub);
          double new_lb = slack / a;
          if (new_lb > box[vi].lb + 1e-12) {
            box[vi].lb = new_lb;
            changed = true;
            if (box[vi].ub < box[vi].lb - kTol) return false;
          }
        }
      }
    }
  }
  return true;
}

}  // namespace

std::vector<std::vector<int>> maximal_sets(
    std::vector<std::vector<int>> sets) {
  for (auto& s : sets) std::sort(s.begin(), s.end());
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < sets.size() && !dominated; ++j) {
      if (i == j || sets[j].size() <= sets[i].size()) continue;
      dominated = std::includes(sets[j].begin(), sets[j].end(),
                                sets[i].begin(), sets[i].end());
    }
    if (!dominated) out.push_back(sets[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

VerifyReport verify_formulation(const MilpModel& m, const mesh::SetSystem& s,
                                int max_binaries) {
  std::vector<int> lambda_of(s.num_vertices, -1);
  std::vector<int> binaries;
  for (std::size_t i = 0; i < m.vars.size(); ++i) {
    int v = lambda_vertex(m.vars[i].name);
    if (v >= 0) {
      if (v >= s.num_vertices)
        throw Error(ErrorCode::ValidationError,
                    "lambda variable outside the ground set: " + m.vars[i].name);
      lambda_of[v] = static_cast<int>(i);
    }
    if (m.vars[i].kind == VarKind::Binary)
      binaries.push_back(static_cast<int>(i));
  }
  for (int v = 0; v < s.num_vertices; ++v)
    if (lambda_of[v] < 0)
      throw Error(ErrorCode::ValidationError,
                  "model lacks lambda variable for vertex " +
                      std::to_string(v));
  if (static_cast<int>(binaries.size()) > max_binaries)
    throw Error(ErrorCode::TooManyBinaries,
                std::to_string(binaries.size()) + " binaries exceed the cap");

  VerifyReport rep;
  rep.assignments_total = 1ull << binaries.size();
  std::set<std::vector<int>> supports;

  for (std::size_t mask = 0; mask < rep.assignments_total; ++mask) {
    std::vector<Interval> box(m.vars.size());
    for (std::size_t i = 0; i < m.vars.size(); ++i)
      box[i] = {m.vars[i].lb, m.vars[i].ub};
    for (std::size_t b = 0; b < binaries.size(); ++b) {
      double val = (mask >> b) & 1 ? 1.0 : 0.0;
      box[binaries[b]] = {val, val};
    }
    bool feasible = true;
    bool changed = true;
    std::size_t passes = 0;
    const std::size_t pass_cap = 4 * m.vars.size() + 4 * m.cons.size() + 16;
    while (changed && feasible) {
      changed = false;
      feasible = tighten(m, box, changed);
      if (++passes > pass_cap) break;
    }
    if (!feasible) continue;
    ++rep.assignments_feasible;
    std::vector<int> supp;
    for (int v = 0; v < s.num_vertices; ++v)
      if (box[lambda_of[v]].ub > kTol) supp.push_back(v);
    supports.insert(std::move(supp));
  }

  rep.reachable_supports =
      maximal_sets({supports.begin(), supports.end()});

  // (i) every reachable support is feasible in S.
  for (const auto& supp : rep.reachable_supports) {
    bool contained = false;
    for (const auto& set : s.sets)
      if (std::includes(set.begin(), set.end(), supp.begin(), supp.end())) {
        contained = true;
        break;
      }
    if (!contained) rep.infeasible_supports.push_back(supp);
  }
  // (ii) every member of S is reachable.
  for (std::size_t i = 0; i < s.sets.size(); ++i) {
    bool reachable = false;
    for (const auto& supp : rep.reachable_supports)
      if (std::includes(supp.begin(), supp.end(), s.sets[i].begin(),
                        s.sets[i].end())) {
        reachable = true;
        break;
      }
    if (!reachable) rep.unreachable_sets.push_back(static_cast<int>(i));
  }
  rep.ok = rep.infeasible_supports.empty() && rep.unreachable_sets.empty();
  return rep;
}

}  // namespace pwlmilp::milp
