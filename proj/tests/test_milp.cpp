#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pwlmilp/biclique.hpp"
#include "pwlmilp/blocking.hpp"
#include "pwlmilp/conflict.hpp"
#include "pwlmilp/lp_format.hpp"
#include "pwlmilp/milp.hpp"
#include "pwlmilp/verify.hpp"

using namespace pwlmilp;

namespace {

// The worked example with its published cover and coloring.
milp::DisjunctionSpec b3_spec() {
  auto p = oracles::example_partition_b3();
  milp::DisjunctionSpec spec;
  spec.sets = mesh::to_set_system(p);
  biclique::Biclique bc;
  bc.a = {4};     // w
  bc.b = {0, 3};  // u, v3
  spec.cover.bicliques = {bc};
  spec.cover.host_edges = 2;
  blocking::Coloring col;
  col.q = 3;
  col.gamma = {1, 2, 3, 1};  // K1={S1,S4}, K2={S2}, K3={S3}
  col.patterns = {{1, 2, 3}, {1, 2}, {1, 3}, {2, 3}, {1}};
  spec.coloring = col;
  spec.has_rank3 = true;
  return spec;
}

milp::DisjunctionSpec spec_for(const mesh::SimplicialPartition& p,
                               std::uint64_t seed = 0) {
  milp::DisjunctionSpec spec;
  spec.sets = mesh::to_set_system(p);
  auto hg = conflict::build_conflict_hypergraph(spec.sets, p.dim);
  graph::Graph g(hg.num_vertices, hg.rank2_edges());
  biclique::CoverOptions copt;
  copt.seed = seed;
  spec.cover = biclique::cover_bicliques(g, copt);
  spec.has_rank3 = hg.rank() >= 3;
  if (spec.has_rank3) {
    auto bh = blocking::build_blocking_hypergraph(spec.sets, hg, p.dim);
    spec.coloring = blocking::color_blocking(spec.sets, bh);
  }
  return spec;
}

std::string constraint_to_string(const milp::MilpModel& m, std::size_t ci) {
  std::ostringstream os;
  const auto& c = m.cons[ci];
  os << c.name << ":";
  for (auto [vi, coef] : c.terms)
    os << ' ' << (coef < 0 ? "-" : "+") << std::abs(coef) << '*'
       << m.vars[vi].name;
  os << (c.sense == milp::Sense::LE ? " <= "
                                    : c.sense == milp::Sense::GE ? " >= " : " = ")
     << c.rhs;
  return os.str();
}

}  // namespace

TEST_CASE("gib on the worked example reproduces the published system") {
  auto model = milp::build_gib(b3_spec());
  // Variables: lam_0..lam_4, y_1, z_1..z_3.
  CHECK(model.vars.size() == 9);
  auto sz = model.size();
  CHECK(sz.binaries == 4);

  std::vector<std::string> got;
  for (std::size_t i = 0; i < model.cons.size(); ++i)
    got.push_back(constraint_to_string(model, i));
  std::vector<std::string> expected = {
      "conv: +1*lam_0 +1*lam_1 +1*lam_2 +1*lam_3 +1*lam_4 = 1",
      "bic_1_a: +1*lam_4 -1*y_1 <= 0",
      "bic_1_b: +1*lam_0 +1*lam_3 +1*y_1 <= 1",
      "col_sum: +1*z_1 +1*z_2 +1*z_3 = 1",
      "col_pat_1: +1*lam_0 -1*z_1 -1*z_2 -1*z_3 <= 0",
      "col_pat_2: +1*lam_1 -1*z_1 -1*z_2 <= 0",
      "col_pat_3: +1*lam_2 -1*z_1 -1*z_3 <= 0",
      "col_pat_4: +1*lam_3 -1*z_2 -1*z_3 <= 0",
      "col_pat_5: +1*lam_4 -1*z_1 <= 0",
  };
  CHECK(got == expected);
}

TEST_CASE("gib without rank-3 conflicts omits the color block") {
  auto p = oracles::random_delaunay_mesh(5, 3);
  auto spec = spec_for(p);
  REQUIRE_FALSE(spec.has_rank3);
  auto model = milp::build_gib(spec);
  for (const auto& v : model.vars) CHECK(v.name.rfind("z_", 0) != 0);

  // Single simplex: only the convexity row, zero binaries.
  mesh::SimplicialPartition single;
  single.dim = 2;
  single.vertices = {{0, 0}, {1, 0}, {0, 1}};
  single.values = {0, 0, 0};
  single.simplices = {{0, 1, 2}};
  auto sm = milp::build_gib(spec_for(single));
  CHECK(sm.size().binaries == 0);
  CHECK(sm.cons.size() == 1);
}

TEST_CASE("gib demands a coloring when rank-3 conflicts exist") {
  auto spec = b3_spec();
  spec.coloring.reset();
  CHECK_THROWS_AS(milp::build_gib(spec), Error);
}

TEST_CASE("baseline binary counts") {
  mesh::SimplicialPartition p;
  p.dim = 2;
  p.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  p.values = {0, 0, 0, 0};
  p.simplices = {{0, 1, 2}, {0, 2, 3}};
  auto spec = spec_for(p);
  CHECK(milp::build_baseline(spec, milp::BaselineKind::DLog).size().binaries == 1);
  CHECK(milp::build_baseline(spec, milp::BaselineKind::Inc).size().binaries == 1);
  CHECK(milp::build_baseline(spec, milp::BaselineKind::MC).size().binaries == 2);
  CHECK(milp::build_baseline(spec, milp::BaselineKind::DCC).size().binaries == 2);
  CHECK(milp::build_baseline(spec, milp::BaselineKind::CC).size().binaries == 2);

  // 12 interior points + 4 corners give 2*16-2-4 = 26 triangles;
  // ceil(log2 26) = 5.
  auto big = oracles::random_delaunay_mesh(12, 77);
  REQUIRE(big.num_simplices() == 26);
  auto bspec = spec_for(big);
  CHECK(milp::build_baseline(bspec, milp::BaselineKind::DLog).size().binaries == 5);
  CHECK(milp::build_baseline(bspec, milp::BaselineKind::MC).size().cols ==
        big.num_vertices() + 26 * 3 + 26 + 0);
}

TEST_CASE("inc requires a usable simplex ordering") {
  milp::DisjunctionSpec spec;
  spec.sets.num_vertices = 6;
  spec.sets.sets = {{0, 1, 2}, {3, 4, 5}};  // disjoint simplices
  CHECK_THROWS_AS(milp::build_baseline(spec, milp::BaselineKind::Inc), Error);
}

TEST_CASE("lp writer emits the documented dialect") {
  auto model = milp::build_gib(b3_spec());
  auto text = milp::write_lp(model);
  CHECK(text.rfind("Minimize\n obj: 0 lam_0\n", 0) == 0);
  CHECK(text.find("Subject To\n") != std::string::npos);
  CHECK(text.find("Binaries\n") != std::string::npos);
  CHECK(text.find(" y_1\n") != std::string::npos);
  CHECK(text.find("End\n") != std::string::npos);
  CHECK(text.find(" 0 <= lam_0 <= 1\n") != std::string::npos);
}

TEST_CASE("lp round trip reproduces the model") {
  auto model = milp::build_gib(b3_spec());
  model.obj.sense = milp::ObjSense::Maximize;
  model.obj.terms = {{0, 1.0}, {5, -0.125}};
  auto parsed = milp::parse_lp(milp::write_lp(model));
  CHECK(milp::models_equal(model, parsed));
  // Writing the parsed model again is stable.
  CHECK(milp::write_lp(parsed) == milp::write_lp(milp::parse_lp(milp::write_lp(parsed))));

  for (auto kind : {milp::BaselineKind::DLog, milp::BaselineKind::Inc,
                    milp::BaselineKind::MC, milp::BaselineKind::DCC,
                    milp::BaselineKind::CC}) {
    auto p = oracles::random_delaunay_mesh(4, 11);
    auto m2 = milp::build_baseline(spec_for(p), kind);
    CHECK(milp::models_equal(m2, milp::parse_lp(milp::write_lp(m2))));
  }
}

TEST_CASE("size bookkeeping equals a recount of the serialized model") {
  auto p = oracles::random_delaunay_mesh(6, 21);
  auto model = milp::build_baseline(spec_for(p), milp::BaselineKind::DCC);
  auto parsed = milp::parse_lp(milp::write_lp(model));
  auto a = model.size(), b = parsed.size();
  CHECK(a.rows == b.rows);
  CHECK(a.cols == b.cols);
  CHECK(a.binaries == b.binaries);
  CHECK(a.nonzeros == b.nonzeros);
}

TEST_CASE("golden lp file for the worked example") {
  auto model = milp::build_gib(b3_spec());
  auto text = milp::write_lp(model);
  std::ifstream in("tests/data/b3_gib.lp");
  REQUIRE_MESSAGE(in.good(), "golden file missing: tests/data/b3_gib.lp");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(text == ss.str());
}

TEST_CASE("verifier accepts the worked example and finds its supports") {
  auto spec = b3_spec();
  auto model = milp::build_gib(spec);
  auto rep = milp::verify_formulation(model, spec.sets);
  CHECK(rep.ok);
  auto expected = milp::maximal_sets(spec.sets.sets);
  CHECK(rep.reachable_supports == expected);
}

TEST_CASE("verifier flags a corrupted cover") {
  // Dropping u from the biclique leaves the (u, w) conflict uncovered;
  // the color block cannot absorb it because w's pattern is a subset of
  // u's.
  auto spec = b3_spec();
  spec.cover.bicliques[0].b = {3};
  auto model = milp::build_gib(spec);
  auto rep = milp::verify_formulation(model, spec.sets);
  CHECK_FALSE(rep.ok);
  bool found = false;
  const std::vector<int> pair = {0, 4};
  for (const auto& s : rep.infeasible_supports)
    if (std::includes(s.begin(), s.end(), pair.begin(), pair.end()))
      found = true;
  CHECK(found);
}

TEST_CASE("verifier rejects too many binaries") {
  auto p = oracles::random_delaunay_mesh(30, 5);  // 64 simplices
  milp::DisjunctionSpec spec;  // CC needs no cover
  spec.sets = mesh::to_set_system(p);
  auto model = milp::build_baseline(spec, milp::BaselineKind::CC);
  CHECK(model.size().binaries > 24);
  CHECK_THROWS_AS(milp::verify_formulation(model, spec.sets, 24), Error);
}

TEST_CASE("all six formulations are support-equivalent on small meshes") {
  int done = 0;
  for (std::uint64_t seed = 0; done < 4 && seed < 40; ++seed) {
    auto p = oracles::random_delaunay_mesh(3 + seed % 3, seed);
    if (p.num_simplices() > 12) continue;
    auto spec = spec_for(p, seed);
    auto expected = milp::maximal_sets(spec.sets.sets);

    auto check_model = [&](const milp::MilpModel& m) {
      auto rep = milp::verify_formulation(m, spec.sets);
      CHECK(rep.ok);
      CHECK(rep.reachable_supports == expected);
    };
    check_model(milp::build_gib(spec));
    check_model(milp::build_baseline(spec, milp::BaselineKind::CC));
    check_model(milp::build_baseline(spec, milp::BaselineKind::DCC));
    check_model(milp::build_baseline(spec, milp::BaselineKind::MC));
    check_model(milp::build_baseline(spec, milp::BaselineKind::DLog));
    check_model(milp::build_baseline(spec, milp::BaselineKind::Inc));
    ++done;
  }
  CHECK(done > 0);
}

TEST_CASE("support equivalence holds on a rank-3 instance") {
  auto p = oracles::random_rank3_mesh_2d(4, 9);
  auto spec = spec_for(p);
  REQUIRE(spec.has_rank3);
  auto expected = milp::maximal_sets(spec.sets.sets);
  auto gib = milp::verify_formulation(milp::build_gib(spec), spec.sets);
  CHECK(gib.ok);
  CHECK(gib.reachable_supports == expected);
  auto cc = milp::verify_formulation(
      milp::build_baseline(spec, milp::BaselineKind::CC), spec.sets);
  CHECK(cc.reachable_supports == expected);
}

TEST_CASE("explicit independent branching schemes verify") {
  // Two intervals sharing a midpoint: a depth-1 scheme.
  mesh::SetSystem s;
  s.num_vertices = 3;
  s.sets = {{0, 1}, {1, 2}};
  auto model = milp::build_ib_scheme(3, {{{0, 1}, {1, 2}}});
  auto rep = milp::verify_formulation(model, s);
  CHECK(rep.ok);
}
