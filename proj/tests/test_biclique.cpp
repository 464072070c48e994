#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pwlmilp/biclique.hpp"
#include "pwlmilp/conflict.hpp"

using namespace pwlmilp;

namespace {

graph::Graph conflict_graph(const mesh::SimplicialPartition& p) {
  auto hg = conflict::build_conflict_hypergraph(mesh::to_set_system(p), p.dim);
  return graph::Graph(hg.num_vertices, hg.rank2_edges());
}

}  // namespace

TEST_CASE("single edge is its own biclique") {
  graph::Graph g(2, {{0, 1}});
  graph::EdgeWeights w(g, 1.0);
  auto bc = biclique::max_weight_biclique_exact(g, w);
  CHECK(bc.weight == doctest::Approx(1.0));
  CHECK(((bc.a == std::vector<int>{0} && bc.b == std::vector<int>{1}) ||
         (bc.a == std::vector<int>{1} && bc.b == std::vector<int>{0})));
}

TEST_CASE("star graph peaks at center-versus-leaves") {
  const int n = 6;
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
  graph::Graph g(n, edges);
  graph::EdgeWeights w(g, 1.0);
  auto bc = biclique::max_weight_biclique_exact(g, w);
  CHECK(bc.weight == doctest::Approx(n - 1.0));
  bool center_alone = bc.a == std::vector<int>{0} || bc.b == std::vector<int>{0};
  CHECK(center_alone);
}

TEST_CASE("exact search equals exhaustive enumeration") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> uni(0.1, 2.0);
  for (int inst = 0; inst < 40; ++inst) {
    const int n = 5 + static_cast<int>(rng() % 4);  // up to 8 vertices
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    std::vector<std::vector<double>> wm(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 100 < 55) {
          edges.emplace_back(i, j);
          adj[i][j] = adj[j][i] = 1;
        }
    if (edges.empty()) continue;
    graph::Graph g(n, edges);
    graph::EdgeWeights w(g, 0.0);
    for (auto [i, j] : g.edges()) {
      double x = uni(rng);
      w.set(i, j, x);
      wm[i][j] = wm[j][i] = x;
    }
    auto got = biclique::max_weight_biclique_exact(g, w);
    auto oracle = oracles::max_biclique_bruteforce(n, adj, wm);
    CHECK(got.weight == doctest::Approx(oracle.weight).epsilon(1e-12));
  }
}

TEST_CASE("no-edge graph has no biclique") {
  graph::Graph g(3, {});
  graph::EdgeWeights w(g, 1.0);
  CHECK_THROWS_AS(biclique::max_weight_biclique_exact(g, w), Error);
}

TEST_CASE("planar cut on the two-triangle mesh finds the conflict pair") {
  mesh::SimplicialPartition p;
  p.dim = 2;
  p.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  p.values = {0, 0, 0, 0};
  p.simplices = {{0, 1, 2}, {0, 2, 3}};
  auto g = conflict_graph(p);  // exactly {1,3}
  REQUIRE(g.edges().size() == 1);
  graph::EdgeWeights w(g, 1.0);
  auto bc = biclique::planar_cut_biclique(p, g, w, 200, 7);
  CHECK(bc.weight == doctest::Approx(1.0));
  CHECK(bc.a.size() == 1);
  CHECK(bc.b.size() == 1);
}

TEST_CASE("planar cut on the seven-point mesh") {
  // Mesh from the heuristic's worked figure; ids:
  // 0=a(0,0) 1=b(0,1) 2=c(1,0) 3=d(1,1) 4=e(.3,.2) 5=f(.4,.7) 6=g(.6,0).
  mesh::SimplicialPartition p;
  p.dim = 2;
  p.vertices = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0.3, 0.2}, {0.4, 0.7}, {0.6, 0}};
  p.values.assign(7, 0.0);
  p.simplices = {{0, 1, 5}, {0, 4, 5}, {0, 4, 6}, {1, 3, 5},
                 {2, 3, 5}, {2, 4, 5}, {2, 4, 6}};
  mesh::validate(p);
  auto g = conflict_graph(p);
  graph::EdgeWeights w(g, 1.0);
  auto bc = biclique::planar_cut_biclique(p, g, w, 1000, 3);
  // Candidates are genuine bicliques of the conflict graph.
  for (int a : bc.a)
    for (int b : bc.b) CHECK(g.has_edge(a, b));
  // The cut across edges b-f, f-e, e-g yields {a} vs {c, d} (weight 2).
  CHECK(bc.weight >= 2.0);
}

TEST_CASE("planar cut candidates are valid on random meshes") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto p = oracles::random_delaunay_mesh(20, 100 + seed);
    auto g = conflict_graph(p);
    if (g.edges().empty()) continue;
    graph::EdgeWeights w(g, 1.0);
    auto bc = biclique::planar_cut_biclique(p, g, w, 300, seed);
    for (int a : bc.a)
      for (int b : bc.b) CHECK(g.has_edge(a, b));
    std::set<int> aset(bc.a.begin(), bc.a.end());
    for (int b : bc.b) CHECK_FALSE(aset.count(b));
  }
}

TEST_CASE("cover of an edgeless graph is empty") {
  graph::Graph g(4, {});
  auto cover = biclique::cover_bicliques(g, {});
  CHECK(cover.bicliques.empty());
}

TEST_CASE("four-cycle needs exactly one biclique") {
  // C4 is K_{2,2}, so the whole edge set is a single biclique; the
  // exhaustive minimum confirms 1.
  graph::Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  auto cover = biclique::cover_bicliques(g, {});
  CHECK(biclique::cover_valid(g, cover));

  // Brute-force minimum cover size over biclique subsets.
  std::vector<std::vector<char>> adj(4, std::vector<char>(4, 0));
  std::vector<std::vector<double>> wm(4, std::vector<double>(4, 1.0));
  for (auto [u, v] : g.edges()) adj[u][v] = adj[v][u] = 1;
  // Enumerate all bicliques of C4 first.
  std::vector<std::set<std::pair<int, int>>> biclique_edge_sets;
  std::vector<int> state(4, 0);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == 4) {
      std::vector<int> a, b;
      for (int v = 0; v < 4; ++v) {
        if (state[v] == 1) a.push_back(v);
        if (state[v] == 2) b.push_back(v);
      }
      if (a.empty() || b.empty()) return;
      std::set<std::pair<int, int>> es;
      for (int x : a)
        for (int y : b) {
          if (!adj[x][y]) return;
          es.insert({std::min(x, y), std::max(x, y)});
        }
      biclique_edge_sets.push_back(es);
      return;
    }
    for (int s = 0; s < 3; ++s) {
      state[i] = s;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  std::set<std::pair<int, int>> all_edges(g.edges().begin(), g.edges().end());
  std::size_t best = 99;
  for (std::size_t mask = 1; mask < (1u << biclique_edge_sets.size()); ++mask) {
    std::set<std::pair<int, int>> got;
    std::size_t count = 0;
    for (std::size_t i = 0; i < biclique_edge_sets.size(); ++i)
      if (mask & (1u << i)) {
        ++count;
        got.insert(biclique_edge_sets[i].begin(), biclique_edge_sets[i].end());
      }
    if (got == all_edges) best = std::min(best, count);
  }
  CHECK(cover.bicliques.size() == best);
  CHECK(best == 1);  // C4 = K_{2,2}
}

TEST_CASE("covers are complete and make strict progress") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto p = oracles::random_delaunay_mesh(12, 40 + seed);
    auto g = conflict_graph(p);
    biclique::CoverOptions opt;
    opt.seed = seed;
    auto cover = biclique::cover_bicliques(g, opt);
    CHECK(biclique::cover_valid(g, cover));
    CHECK(cover.bicliques.size() <= static_cast<std::size_t>(g.n()) - 1);

    // Geom-then-exact agrees on completeness.
    biclique::CoverOptions gopt;
    gopt.strategy = biclique::CoverStrategy::GeomThenExact;
    gopt.embedding = &p;
    gopt.n_lines = 200;
    gopt.seed = seed;
    auto gcover = biclique::cover_bicliques(g, gopt);
    CHECK(biclique::cover_valid(g, gcover));
  }
}
