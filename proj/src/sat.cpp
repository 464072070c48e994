#include "pwlmilp/sat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pwlmilp::sat {

namespace {

enum : signed char { kFree = 0, kTrue = 1, kFalse = -1 };

class Dpll {
 public:
  explicit Dpll(const Cnf& f) : f_(f), assign_(f.num_vars + 1, kFree),
                                activity_(f.num_vars + 1, 0.0) {}

  bool run() {
    if (!propagate()) return false;
    return search();
  }

  std::vector<bool> model() const {
    std::vector<bool> m(f_.num_vars + 1, false);
    for (int v = 1; v <= f_.num_vars; ++v) m[v] = assign_[v] == kTrue;
    return m;
  }

 private:
  signed char value(int lit) const {
    signed char a = assign_[std::abs(lit)];
    if (a == kFree) return kFree;
    return (lit > 0) == (a == kTrue) ? kTrue : kFalse;
  }

  // Scan-to-fixpoint unit propagation; instances here are tiny.
  bool propagate() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& cl : f_.clauses) {
        int unassigned = 0, unit = 0;
        bool satisfied = false;
        for (int lit : cl) {
          signed char v = value(lit);
          if (v == kTrue) {
            satisfied = true;
            break;
          }
          if (v == kFree) {
            ++unassigned;
            unit = lit;
          }
        }
        if (satisfied) continue;
        if (unassigned == 0) {
          for (int lit : cl) bump(std::abs(lit));
          return false;  // conflict
        }
        if (unassigned == 1) {
          assign_[std::abs(unit)] = unit > 0 ? kTrue : kFalse;
          trail_.push_back(std::abs(unit));
          changed = true;
        }
      }
    }
    return true;
  }

  bool search() {
    int var = 0;
    double best = -1.0;
    for (int v = 1; v <= f_.num_vars; ++v)
      if (assign_[v] == kFree && activity_[v] > best) {
        best = activity_[v];
        var = v;
      }
    if (var == 0) return true;  // complete assignment, no conflict

    for (signed char phase : {kTrue, kFalse}) {
      std::size_t mark = trail_.size();
      assign_[var] = phase;
      trail_.push_back(var);
      if (propagate() && search()) return true;
      while (trail_.size() > mark) {
        assign_[trail_.back()] = kFree;
        trail_.pop_back();
      }
    }
    return false;
  }

  void bump(int v) {
    activity_[v] += bump_;
    bump_ *= 1.05;
    if (activity_[v] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      bump_ *= 1e-100;
    }
  }

  const Cnf& f_;
  std::vector<signed char> assign_;
  std::vector<double> activity_;
  std::vector<int> trail_;
  double bump_ = 1.0;
};

}  // namespace

std::optional<std::vector<bool>> solve(const Cnf& f) {
  for (const auto& cl : f.clauses)
    if (cl.empty()) return std::nullopt;
  Dpll solver(f);
  if (!solver.run()) return std::nullopt;
  return solver.model();
}

std::string to_dimacs(const Cnf& f) {
  std::ostringstream os;
  os << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& cl : f.clauses) {
    for (int lit : cl) os << lit << ' ';
    os << "0\n";
  }
  return os.str();
}

}  // namespace pwlmilp::sat
