#ifndef PWLMILP_CONFLICT_HPP
#define PWLMILP_CONFLICT_HPP

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pwlmilp/mesh.hpp"

namespace pwlmilp::conflict {

/// Minimal infeasible vertex sets of a set system, each of size
/// 2..dim+1 (the rank bound for polyhedral partitions).
struct ConflictHypergraph {
  int num_vertices = 0;
  std::vector<std::vector<int>> edges;  // sorted sets, lexicographic order

  int rank() const;
  std::vector<std::pair<int, int>> rank2_edges() const;
  std::size_t count_of_rank(int k) const;
};

struct BuildOptions {
  std::size_t budget = 100000000;  // candidate subsets visited
};

/// Exact enumeration of the minimal infeasible sets of size <= dim+1.
/// Feasible prefixes are extended recursively; a prefix that turns
/// infeasible is recorded iff all one-element-removed subsets are
/// feasible. Throws SizeLimit when the visit budget is exceeded.
ConflictHypergraph build_conflict_hypergraph(const mesh::SetSystem& s, int dim,
                                             const BuildOptions& opt = {});

struct SplitRecord {
  int u = -1, v = -1;  // split edge
  int w = -1;          // midpoint vertex id
  int k = 0;           // rank processed when the split was chosen
  int eliminated = -1;  // r^k_uv
  int created = -1;     // c^k_uv
};

enum class ValueRule { Preserve, Evaluate };

using ValueOracle = std::function<double(const mesh::Point&)>;

/// Splits edge (u, v) by its midpoint w: every simplex containing both
/// endpoints is replaced by the two halves. Preserve keeps the
/// interpolant unchanged (f(w) = mean of endpoint values); Evaluate
/// needs an oracle and changes the approximant.
std::pair<mesh::SimplicialPartition, SplitRecord> split_edge(
    const mesh::SimplicialPartition& p, int u, int v,
    ValueRule rule = ValueRule::Preserve, const ValueOracle* oracle = nullptr);

/// (r, c): rank-k hyperedges eliminated resp. created by splitting
/// (u, v). Candidates for c come from the splitting propositions and
/// are then verified exactly against the post-split set system, so the
/// counts agree with a full rebuild.
std::pair<int, int> count_split_effect(const mesh::SetSystem& s,
                                       const ConflictHypergraph& hg, int u,
                                       int v, int k);

/// Applies the split to a conflict hypergraph without a full rebuild:
/// hyperedges containing both endpoints die, {u,v} and the w-edges are
/// added (proposition candidates, exactly verified).
ConflictHypergraph apply_split(const mesh::SetSystem& before,
                               const ConflictHypergraph& hg, int u, int v,
                               int dim);

struct ReduceOptions {
  ValueRule rule = ValueRule::Preserve;
  const ValueOracle* oracle = nullptr;
  bool debug_rebuild = false;  // cross-check incremental updates
  BuildOptions build;
};

/// Greedy rank reduction: while the rank is at least 3, split the edge
/// maximizing eliminated-minus-created (ties to the lexicographically
/// smallest pair); stop when the best difference is nonpositive.
std::pair<mesh::SimplicialPartition, std::vector<SplitRecord>> reduce_rank(
    const mesh::SimplicialPartition& p, const ReduceOptions& opt = {});

}  // namespace pwlmilp::conflict

#endif  // PWLMILP_CONFLICT_HPP
