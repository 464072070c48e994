#include "pwlmilp/biclique.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "pwlmilp/geometry.hpp"

namespace pwlmilp::biclique {

using geom::Vec2;

namespace {

enum class State : char { Undecided, A, B, Out };

class BranchAndBound {
 public:
  BranchAndBound(const graph::Graph& g, const graph::EdgeWeights& w)
      : g_(g), w_(w), state_(g.n(), State::Undecided) {
    order_.resize(g.n());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int x, int y) {
      return g_.degree(x) > g_.degree(y);
    });
  }

  Biclique run() {
    best_weight_ = -1.0;
    dfs(0, 0.0);
    if (best_weight_ < 0.0)
      throw Error(ErrorCode::Infeasible, "graph has no biclique");
    Biclique out;
    out.weight = best_weight_;
    out.a = best_a_;
    out.b = best_b_;
    std::sort(out.a.begin(), out.a.end());
    std::sort(out.b.begin(), out.b.end());
    return out;
  }

 private:
  double potential() const {
    // Optimistic bound: every positive edge with an undecided endpoint
    // could still be covered.
    double p = 0.0;
    for (auto [u, v] : g_.edges()) {
      double wuv = w_.get(u, v);
      if (wuv <= 0.0) continue;
      if (state_[u] == State::Undecided || state_[v] == State::Undecided)
        p += wuv;
    }
    return p;
  }

  void dfs(int pos, double weight) {
    if (pos == g_.n()) {
      if (!cur_a_.empty() && !cur_b_.empty() && weight > best_weight_) {
        best_weight_ = weight;
        best_a_ = cur_a_;
        best_b_ = cur_b_;
      }
      return;
    }
    if (best_weight_ >= 0.0 && weight + potential() <= best_weight_) return;
    int v = order_[pos];

    // v -> A: must be adjacent to every chosen B vertex.
    bool ok = true;
    for (int b : cur_b_)
      if (!g_.has_edge(v, b)) {
        ok = false;
        break;
      }
    if (ok) {
      double gain = 0.0;
      for (int b : cur_b_) gain += w_.get(v, b);
      state_[v] = State::A;
      cur_a_.push_back(v);
      dfs(pos + 1, weight + gain);
      cur_a_.pop_back();
    }
    // v -> B.
    ok = true;
    for (int a : cur_a_)
      if (!g_.has_edge(v, a)) {
        ok = false;
        break;
      }
    if (ok) {
      double gain = 0.0;
      for (int a : cur_a_) gain += w_.get(v, a);
      state_[v] = State::B;
      cur_b_.push_back(v);
      dfs(pos + 1, weight + gain);
      cur_b_.pop_back();
    }
    // v -> out.
    state_[v] = State::Out;
    dfs(pos + 1, weight);
    state_[v] = State::Undecided;
  }

  const graph::Graph& g_;
  const graph::EdgeWeights& w_;
  std::vector<int> order_;
  std::vector<State> state_;
  std::vector<int> cur_a_, cur_b_;
  double best_weight_ = -1.0;
  std::vector<int> best_a_, best_b_;
};

}  // namespace

Biclique max_weight_biclique_exact(const graph::Graph& g,
                                   const graph::EdgeWeights& w) {
  if (g.edges().empty())
    throw Error(ErrorCode::Infeasible, "graph has no edges");
  BranchAndBound bnb(g, w);
  return bnb.run();
}

Biclique planar_cut_biclique(const mesh::SimplicialPartition& embedding,
                             const graph::Graph& conflict_graph,
                             const graph::EdgeWeights& w, int n_lines,
                             std::uint64_t seed) {
  if (embedding.dim != 2)
    throw Error(ErrorCode::ValidationError, "embedding must be 2-D");
  const int n = static_cast<int>(embedding.vertices.size());
  auto pt = [&](int i) {
    return Vec2{embedding.vertices[i][0], embedding.vertices[i][1]};
  };
  // Interior mesh edges (two incident triangles): these are the primal
  // counterparts of the dual edges a cutting line may cross; boundary
  // edges have no dual edge once the outer face is removed.
  std::vector<std::pair<int, int>> interior_edges;
  {
    std::map<std::pair<int, int>, int> count;
    for (const auto& s : embedding.simplices)
      for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
          count[{s[i], s[j]}]++;
    for (const auto& [e, c] : count)
      if (c >= 2) interior_edges.push_back(e);
  }

  Vec2 lo = pt(0), hi = pt(0);
  for (int i = 0; i < n; ++i) {
    lo.x = std::min(lo.x, pt(i).x);
    lo.y = std::min(lo.y, pt(i).y);
    hi.x = std::max(hi.x, pt(i).x);
    hi.y = std::max(hi.y, pt(i).y);
  }
  Vec2 center = 0.5 * (lo + hi);
  double radius = 0.75 * geom::dist(lo, hi) + 1e-9;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);

  Biclique best;
  best.weight = -1.0;
  int produced = 0;
  const int retry_cap = 20 * std::max(n_lines, 1);
  for (int attempt = 0; attempt < retry_cap && produced < n_lines; ++attempt) {
    double t1 = uni(rng), t2 = uni(rng);
    Vec2 p1 = center + radius * Vec2{std::cos(t1), std::sin(t1)};
    Vec2 p2 = center + radius * Vec2{std::cos(t2), std::sin(t2)};
    if (geom::dist(p1, p2) < 1e-12) continue;

    // The line must avoid every mesh vertex for the cut to be clean.
    std::vector<int> side(n);
    bool touches_vertex = false;
    for (int i = 0; i < n; ++i) {
      side[i] = geom::orientation(p1, p2, pt(i));
      if (side[i] == 0) {
        touches_vertex = true;
        break;
      }
    }
    if (touches_vertex) continue;

    std::vector<char> on_path(n, 0);
    int crossings = 0;
    for (auto [u, v] : interior_edges)
      if (side[u] * side[v] < 0) {
        on_path[u] = on_path[v] = 1;
        ++crossings;
      }
    if (crossings == 0) continue;  // the line misses the dual embedding
    ++produced;

    std::vector<int> left, right;
    for (int i = 0; i < n; ++i) {
      if (on_path[i]) continue;
      (side[i] > 0 ? left : right).push_back(i);
    }
    if (left.empty() || right.empty()) continue;
    bool valid = true;
    double weight = 0.0;
    for (int a : left) {
      for (int b : right) {
        if (!conflict_graph.has_edge(a, b)) {
          valid = false;
          break;
        }
        weight += w.get(a, b);
      }
      if (!valid) break;
    }
    if (!valid) continue;
    if (weight > best.weight) {
      best.weight = weight;
      best.a = left;
      best.b = right;
    }
  }
  if (best.weight < 0.0)
    throw Error(ErrorCode::NoCandidate,
                "no cutting line produced a biclique candidate");
  return best;
}

BicliqueCover cover_bicliques(const graph::Graph& g, const CoverOptions& opt) {
  BicliqueCover cover;
  cover.host_edges = g.edges().size();
  if (g.edges().empty()) return cover;

  graph::EdgeWeights w(g, 1.0);
  std::size_t uncovered = g.edges().size();
  int iter = 0;
  while (uncovered > 0) {
    Biclique bc;
    bool use_geom = opt.strategy == CoverStrategy::GeomThenExact &&
                    iter < opt.geom_iterations && opt.embedding != nullptr;
    bool have = false;
    if (use_geom) {
      try {
        bc = planar_cut_biclique(*opt.embedding, g, w, opt.n_lines,
                                 opt.seed + static_cast<std::uint64_t>(iter));
        have = bc.weight > 0.0;
      } catch (const Error&) {
        have = false;
      }
    }
    if (!have) bc = max_weight_biclique_exact(g, w);
    if (bc.weight <= 0.0)
      throw Error(ErrorCode::ValidationError,
                  "covering loop failed to make progress");

    for (int a : bc.a)
      for (int b : bc.b) {
        if (w.get(a, b) > 0.0) --uncovered;
        w.set(a, b, 0.0);
      }
    cover.bicliques.push_back(std::move(bc));
    ++iter;
  }
  return cover;
}

bool cover_valid(const graph::Graph& g, const BicliqueCover& cover) {
  std::set<std::pair<int, int>> covered;
  for (const auto& bc : cover.bicliques) {
    for (int a : bc.a)
      for (int b : bc.b) {
        if (a == b || !g.has_edge(a, b)) return false;
        covered.insert({std::min(a, b), std::max(a, b)});
      }
    std::set<int> inter(bc.a.begin(), bc.a.end());
    for (int b : bc.b)
      if (inter.count(b)) return false;
    if (bc.a.empty() || bc.b.empty()) return false;
  }
  return covered.size() == g.edges().size();
}

}  // namespace pwlmilp::biclique
