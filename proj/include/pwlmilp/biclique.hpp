#ifndef PWLMILP_BICLIQUE_HPP
#define PWLMILP_BICLIQUE_HPP

#include <cstdint>
#include <vector>

#include "pwlmilp/graph.hpp"
#include "pwlmilp/mesh.hpp"

namespace pwlmilp::biclique {

struct Biclique {
  std::vector<int> a, b;  // disjoint, sorted
  double weight = 0.0;
};

struct BicliqueCover {
  std::vector<Biclique> bicliques;
  std::size_t host_edges = 0;
};

/// Exact maximum-weight biclique by branch and bound over the vertex
/// states in/left, in/right, out. Feasibility follows the MILP used in
/// the covering loop: non-adjacent vertices never sit on opposite
/// sides, both sides nonempty. Ties resolve to the first optimum found
/// in a fixed deterministic search order.
Biclique max_weight_biclique_exact(const graph::Graph& g,
                                   const graph::EdgeWeights& w);

/// Randomized geometric heuristic for conflict graphs of planar
/// triangulations: a random line cuts the mesh; mesh edges it crosses
/// form a separating path whose two sides give a biclique of the
/// conflict graph. Best of n_lines candidates.
Biclique planar_cut_biclique(const mesh::SimplicialPartition& embedding,
                             const graph::Graph& conflict_graph,
                             const graph::EdgeWeights& w, int n_lines,
                             std::uint64_t seed);

enum class CoverStrategy { Exact, GeomThenExact };

struct CoverOptions {
  CoverStrategy strategy = CoverStrategy::Exact;
  int geom_iterations = 4;
  int n_lines = 1000;
  std::uint64_t seed = 0;
  const mesh::SimplicialPartition* embedding = nullptr;  // for the heuristic
};

/// Greedy covering loop: weights start at one, each round takes a
/// maximum-weight biclique and zeroes what it covers, until no positive
/// weight remains.
BicliqueCover cover_bicliques(const graph::Graph& g, const CoverOptions& opt);

/// All biclique pairs are host edges and the union covers the host.
bool cover_valid(const graph::Graph& g, const BicliqueCover& cover);

}  // namespace pwlmilp::biclique

#endif  // PWLMILP_BICLIQUE_HPP
