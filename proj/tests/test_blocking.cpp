#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "pwlmilp/blocking.hpp"

using namespace pwlmilp;

TEST_CASE("blocking hypergraph of the worked example") {
  auto p = oracles::example_partition_b3();
  auto ss = mesh::to_set_system(p);
  auto hg = conflict::build_conflict_hypergraph(ss, 2);
  auto bh = blocking::build_blocking_hypergraph(ss, hg, 2);
  std::vector<std::vector<int>> expected = {
      {0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}};
  CHECK(bh.edges == expected);
  CHECK(bh.rank() == 2);
}

TEST_CASE("rank-2 conflicts produce no blocking edges") {
  auto p = oracles::random_delaunay_mesh(6, 20);
  auto ss = mesh::to_set_system(p);
  auto hg = conflict::build_conflict_hypergraph(ss, 2);
  if (hg.rank() > 2) return;
  auto bh = blocking::build_blocking_hypergraph(ss, hg, 2);
  CHECK(bh.edges.empty());
}

TEST_CASE("blocking set enumeration equals brute force") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto p = oracles::random_partition_by_splits(3, 2 + seed % 3, seed + 50);
    auto ss = mesh::to_set_system(p);
    auto hg = conflict::build_conflict_hypergraph(ss, 3);
    auto bh = blocking::build_blocking_hypergraph(ss, hg, 3);
    // Oracle enumerates one size beyond d+1 and must find nothing there.
    auto oracle =
        oracles::minimal_blocking_bruteforce(ss.sets, hg.edges, 5);
    for (const auto& e : oracle) CHECK(e.size() <= 4);
    CHECK(bh.edges == oracle);
    // Every conflict edge of size >= 3 induces a rank-2 blocking edge.
    for (const auto& c : hg.edges) {
      if (c.size() < 3) continue;
      bool found = false;
      for (const auto& b : bh.edges)
        if (b.size() == 2) {
          std::set<int> uni;
          for (int i : b) uni.insert(ss.sets[i].begin(), ss.sets[i].end());
          if (std::includes(uni.begin(), uni.end(), c.begin(), c.end()))
            found = true;
        }
      CHECK(found);
    }
  }
}

TEST_CASE("coloring of the worked example uses three colors") {
  auto p = oracles::example_partition_b3();
  auto ss = mesh::to_set_system(p);
  auto hg = conflict::build_conflict_hypergraph(ss, 2);
  auto bh = blocking::build_blocking_hypergraph(ss, hg, 2);
  auto col = blocking::color_blocking(ss, bh);
  CHECK(col.q == 3);
  CHECK(blocking::coloring_valid(bh, col.gamma));
  // Color classes contain no blocking set.
  for (int c = 1; c <= col.q; ++c) {
    std::vector<int> k;
    for (int i = 0; i < 4; ++i)
      if (col.gamma[i] == c) k.push_back(i);
    for (const auto& b : bh.edges)
      CHECK_FALSE(std::includes(k.begin(), k.end(), b.begin(), b.end()));
  }
  // Patterns match the definition.
  for (int v = 0; v < ss.num_vertices; ++v) {
    std::set<int> expect;
    for (std::size_t i = 0; i < ss.sets.size(); ++i)
      if (std::binary_search(ss.sets[i].begin(), ss.sets[i].end(), v))
        expect.insert(col.gamma[i]);
    CHECK(col.patterns[v] == std::vector<int>(expect.begin(), expect.end()));
  }
}

TEST_CASE("empty blocking hypergraph needs one color") {
  mesh::SetSystem ss;
  ss.num_vertices = 4;
  ss.sets = {{0, 1, 2}, {1, 2, 3}};
  blocking::BlockingHypergraph bh;
  bh.num_sets = 2;
  auto col = blocking::color_blocking(ss, bh);
  CHECK(col.q == 1);
  CHECK(col.gamma == std::vector<int>{1, 1});
}

TEST_CASE("sat-minimized q equals the exhaustive chromatic number") {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 12 && seed < 80; ++seed) {
    auto p = oracles::random_partition_by_splits(3, 1 + seed % 3, seed * 3 + 2);
    auto ss = mesh::to_set_system(p);
    if (ss.sets.size() > 8) continue;
    auto hg = conflict::build_conflict_hypergraph(ss, 3);
    if (hg.rank() < 3) continue;
    auto bh = blocking::build_blocking_hypergraph(ss, hg, 3);
    if (bh.edges.empty()) continue;
    auto col = blocking::color_blocking(ss, bh);
    CHECK(blocking::coloring_valid(bh, col.gamma));
    int oracle = oracles::chromatic_bruteforce(
        static_cast<int>(ss.sets.size()), bh.edges);
    CHECK(col.q == oracle);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("sat solver handles tiny instances") {
  sat::Cnf f;
  int a = f.add_var(), b = f.add_var();
  f.add_clause({a, b});
  f.add_clause({-a, b});
  f.add_clause({a, -b});
  auto model = sat::solve(f);
  REQUIRE(model.has_value());
  CHECK((*model)[a]);
  CHECK((*model)[b]);
  f.add_clause({-a, -b});
  CHECK_FALSE(sat::solve(f).has_value());
  // Pigeonhole 3 -> 2 is unsatisfiable.
  sat::Cnf ph;
  int x[3][2];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) x[i][j] = ph.add_var();
  for (int i = 0; i < 3; ++i) ph.add_clause({x[i][0], x[i][1]});
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 3; ++i)
      for (int k = i + 1; k < 3; ++k) ph.add_clause({-x[i][j], -x[k][j]});
  CHECK_FALSE(sat::solve(ph).has_value());
}

TEST_CASE("cnf encoding round-trips to valid colorings") {
  auto p = oracles::example_partition_b3();
  auto ss = mesh::to_set_system(p);
  auto hg = conflict::build_conflict_hypergraph(ss, 2);
  auto bh = blocking::build_blocking_hypergraph(ss, hg, 2);
  for (int q = 2; q <= 4; ++q) {
    auto cnf = blocking::coloring_cnf(bh, q);
    auto model = sat::solve(cnf);
    int oracle = oracles::chromatic_bruteforce(4, bh.edges);
    if (q < oracle) {
      CHECK_FALSE(model.has_value());
    } else {
      REQUIRE(model.has_value());
      std::vector<int> gamma(4, 0);
      for (int i = 0; i < 4; ++i)
        for (int c = 0; c < q; ++c)
          if ((*model)[i * q + c + 1]) {
            gamma[i] = c + 1;
            break;
          }
      CHECK(blocking::coloring_valid(bh, gamma));
    }
  }
  // DIMACS export shape.
  auto d = sat::to_dimacs(blocking::coloring_cnf(bh, 3));
  CHECK(d.rfind("p cnf 12 ", 0) == 0);
}
