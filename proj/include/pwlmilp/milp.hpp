#ifndef PWLMILP_MILP_HPP
#define PWLMILP_MILP_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwlmilp/biclique.hpp"
#include "pwlmilp/blocking.hpp"
#include "pwlmilp/mesh.hpp"

namespace pwlmilp::milp {

enum class VarKind { Continuous, Binary };
enum class Sense { LE, GE, EQ };
enum class ObjSense { Minimize, Maximize };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lb = 0.0;
  double ub = 1.0;
};

struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (var index, coefficient)
  Sense sense = Sense::LE;
  double rhs = 0.0;
};

struct Objective {
  ObjSense sense = ObjSense::Minimize;
  std::vector<std::pair<int, double>> terms;
};

struct ModelSize {
  std::size_t rows = 0, cols = 0, binaries = 0, nonzeros = 0;
};

struct MilpModel {
  std::string name;
  std::vector<Variable> vars;
  std::vector<Constraint> cons;
  Objective obj;

  int add_var(const std::string& name, VarKind kind, double lb, double ub);
  void add_con(const std::string& name,
               std::vector<std::pair<int, double>> terms, Sense sense,
               double rhs);
  int var_index(const std::string& name) const;  // -1 when absent
  ModelSize size() const;

  /// Largest absolute constraint/bound violation of a point given by
  /// variable name (missing names count as zero).
  double max_violation(const std::map<std::string, double>& point) const;
};

bool models_equal(const MilpModel& a, const MilpModel& b);

/// The naming contract: lambda variables are "lam_<vertexid>".
std::string lambda_name(int vertex_id);
/// Vertex id for a lambda variable name, or -1.
int lambda_vertex(const std::string& var_name);

/// Inputs for the disjunctive-constraint formulations.
struct DisjunctionSpec {
  mesh::SetSystem sets;
  biclique::BicliqueCover cover;                 // of the rank-2 conflicts
  std::optional<blocking::Coloring> coloring;    // required when rank >= 3
  bool has_rank3 = false;
};

/// Pairwise biclique block plus, when rank-3 conflicts exist, the color
/// block with pattern-grouped lambda constraints.
MilpModel build_gib(const DisjunctionSpec& spec);

/// Log-style formulation from an explicit independent branching scheme
/// {L_l, R_l}: sum over v not in L_l <= z_l and the complement side.
MilpModel build_ib_scheme(int num_vertices,
                          const std::vector<std::pair<std::vector<int>,
                                                      std::vector<int>>>& scheme);

enum class BaselineKind { DLog, Inc, MC, DCC, CC };
BaselineKind baseline_from_name(const std::string& name);

/// Classic formulations of the same disjunction, all exposing tagged
/// lam_<v> variables so the support verifier applies uniformly:
///  - CC: one binary per simplex, lam_v <= sum of binaries covering v.
///  - DCC: per-simplex copies w_i_v with sum_v w_i_v = y_i.
///  - MC: per-simplex copies switched per variable (w_i_v <= y_i).
///  - DLog: copies with ceil(log2 m) bit binaries over a binary code.
///  - Inc: incremental deltas along a simplex ordering in which
///    consecutive simplices share a vertex chain (facet path preferred).
MilpModel build_baseline(const DisjunctionSpec& spec, BaselineKind kind);

}  // namespace pwlmilp::milp

#endif  // PWLMILP_MILP_HPP
