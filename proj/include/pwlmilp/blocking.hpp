#ifndef PWLMILP_BLOCKING_HPP
#define PWLMILP_BLOCKING_HPP

#include <vector>

#include "pwlmilp/conflict.hpp"
#include "pwlmilp/mesh.hpp"
#include "pwlmilp/sat.hpp"

namespace pwlmilp::blocking {

/// Minimal blocking sets: subsets of the set system whose union spans a
/// minimal infeasible set of size >= 3, minimal with that property.
struct BlockingHypergraph {
  int num_sets = 0;
  std::vector<std::vector<int>> edges;  // sorted set-index lists

  int rank() const;
  std::size_t count_rank2() const;
};

BlockingHypergraph build_blocking_hypergraph(
    const mesh::SetSystem& s, const conflict::ConflictHypergraph& hg, int dim,
    const conflict::BuildOptions& opt = {});

struct Coloring {
  int q = 1;
  std::vector<int> gamma;                  // set index -> color in 1..q
  std::vector<std::vector<int>> patterns;  // vertex -> sorted color set
};

/// CNF encoding of "color the blocking hypergraph with q colors so that
/// no edge is monochromatic".
sat::Cnf coloring_cnf(const BlockingHypergraph& bh, int q);

/// Greedy coloring of the rank-2 subgraph (largest-degree-first) fixes
/// the starting q; SAT feasibility then walks q down (or up) by one
/// until the minimum feasible count is found.
Coloring color_blocking(const mesh::SetSystem& s, const BlockingHypergraph& bh);

/// True iff no blocking edge is monochromatic under gamma.
bool coloring_valid(const BlockingHypergraph& bh, const std::vector<int>& gamma);

}  // namespace pwlmilp::blocking

#endif  // PWLMILP_BLOCKING_HPP
