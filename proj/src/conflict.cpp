#include "pwlmilp/conflict.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pwlmilp::conflict {

int ConflictHypergraph::rank() const {
  std::size_t r = 0;
  for (const auto& e : edges) r = std::max(r, e.size());
  return static_cast<int>(r);
}

std::vector<std::pair<int, int>> ConflictHypergraph::rank2_edges() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& e : edges)
    if (e.size() == 2) out.emplace_back(e[0], e[1]);
  return out;
}

std::size_t ConflictHypergraph::count_of_rank(int k) const {
  std::size_t c = 0;
  for (const auto& e : edges)
    if (static_cast<int>(e.size()) == k) ++c;
  return c;
}

namespace {

// Membership bitmasks: one bit per set, one mask per vertex.
struct Masks {
  int words = 0;
  std::vector<std::vector<std::uint64_t>> of;  // per vertex

  explicit Masks(const mesh::SetSystem& s) {
    words = static_cast<int>((s.sets.size() + 63) / 64);
    of.assign(s.num_vertices, std::vector<std::uint64_t>(words, 0));
    for (std::size_t i = 0; i < s.sets.size(); ++i)
      for (int v : s.sets[i]) of[v][i / 64] |= 1ull << (i % 64);
  }

  bool feasible(const std::vector<int>& subset) const {
    for (int w = 0; w < words; ++w) {
      std::uint64_t acc = ~0ull;
      for (int v : subset) acc &= of[v][w];
      if (acc) return true;
    }
    return false;
  }
};

void and_into(std::vector<std::uint64_t>& acc,
              const std::vector<std::uint64_t>& m) {
  for (std::size_t w = 0; w < acc.size(); ++w) acc[w] &= m[w];
}

bool nonzero(const std::vector<std::uint64_t>& m) {
  for (auto w : m)
    if (w) return true;
  return false;
}

struct Enumerator {
  const Masks& masks;
  int n;
  int max_size;
  std::size_t budget;
  std::size_t visits = 0;
  std::vector<int> prefix;
  std::vector<std::vector<std::uint64_t>> prefix_masks;  // AND along path
  std::vector<std::vector<int>>* out;

  void run() {
    for (int v = 0; v < n; ++v) {
      prefix = {v};
      prefix_masks = {masks.of[v]};
      extend();
    }
  }

  void extend() {
    if (static_cast<int>(prefix.size()) >= max_size) return;
    for (int next = prefix.back() + 1; next < n; ++next) {
      if (++visits > budget)
        throw Error(ErrorCode::SizeLimit,
                    "conflict enumeration exceeded its budget");
      auto acc = prefix_masks.back();
      and_into(acc, masks.of[next]);
      if (nonzero(acc)) {
        prefix.push_back(next);
        prefix_masks.push_back(std::move(acc));
        extend();
        prefix.pop_back();
        prefix_masks.pop_back();
      } else {
        // prefix + next is infeasible and prefix itself is feasible;
        // minimal iff every one-element-removed subset is feasible.
        bool minimal = true;
        for (std::size_t drop = 0; drop < prefix.size() && minimal; ++drop) {
          std::vector<std::uint64_t> acc2(masks.words, ~0ull);
          for (std::size_t i = 0; i < prefix.size(); ++i)
            if (i != drop) and_into(acc2, masks.of[prefix[i]]);
          and_into(acc2, masks.of[next]);
          if (!nonzero(acc2)) minimal = false;
        }
        if (minimal) {
          auto edge = prefix;
          edge.push_back(next);
          out->push_back(std::move(edge));
        }
      }
    }
  }
};

mesh::SetSystem split_set_system(const mesh::SetSystem& s, int u, int v,
                                 int w) {
  mesh::SetSystem out;
  out.num_vertices = std::max(s.num_vertices, w + 1);
  for (const auto& set : s.sets) {
    bool has_u = std::binary_search(set.begin(), set.end(), u);
    bool has_v = std::binary_search(set.begin(), set.end(), v);
    if (has_u && has_v) {
      std::vector<int> su, sv;
      for (int x : set) {
        if (x != u) su.push_back(x);
        if (x != v) sv.push_back(x);
      }
      su.push_back(w);
      sv.push_back(w);
      std::sort(su.begin(), su.end());
      std::sort(sv.begin(), sv.end());
      out.sets.push_back(std::move(su));
      out.sets.push_back(std::move(sv));
    } else {
      out.sets.push_back(set);
    }
  }
  return out;
}

bool is_minimal_infeasible(const Masks& m, const std::vector<int>& c) {
  if (m.feasible(c)) return false;
  std::vector<int> sub(c.begin(), c.end() - 1);
  for (std::size_t drop = 0; drop < c.size(); ++drop) {
    sub.clear();
    for (std::size_t i = 0; i < c.size(); ++i)
      if (i != drop) sub.push_back(c[i]);
    if (!m.feasible(sub)) return false;
  }
  return true;
}

// Size-k conflicts appearing after the split of (u, v) by w: generated
// from the splitting propositions, then verified exactly.
std::set<std::vector<int>> new_conflicts_of_size(
    const ConflictHypergraph& hg, const Masks& post_masks,
    const Masks& pre_masks, int u, int v, int w, int k) {
  std::set<std::vector<int>> candidates;
  auto add_candidate = [&](std::vector<int> c) {
    std::sort(c.begin(), c.end());
    candidates.insert(std::move(c));
  };
  for (const auto& e : hg.edges) {
    bool has_u = std::binary_search(e.begin(), e.end(), u);
    bool has_v = std::binary_search(e.begin(), e.end(), v);
    if (static_cast<int>(e.size()) == k) {
      // Cases i and ii: swap one endpoint for w (the other endpoint, if
      // present, stays; verification discards the impossible ones).
      if (has_u) {
        std::vector<int> c;
        for (int x : e)
          if (x != u) c.push_back(x);
        c.push_back(w);
        add_candidate(std::move(c));
      }
      if (has_v) {
        std::vector<int> c;
        for (int x : e)
          if (x != v) c.push_back(x);
        c.push_back(w);
        add_candidate(std::move(c));
      }
    } else if (static_cast<int>(e.size()) == k + 1 && has_u && has_v) {
      // Case iii: drop both endpoints, add w.
      std::vector<int> c;
      for (int x : e)
        if (x != u && x != v) c.push_back(x);
      c.push_back(w);
      add_candidate(std::move(c));
    }
  }
  std::set<std::vector<int>> out;
  for (const auto& c : candidates) {
    // Every member besides w must share a simplex with u and with v
    // before the split (necessary condition), then verify exactly.
    bool plausible = true;
    for (int x : c) {
      if (x == w) continue;
      if (!pre_masks.feasible({x, u}) || !pre_masks.feasible({x, v})) {
        plausible = false;
        break;
      }
    }
    if (plausible && is_minimal_infeasible(post_masks, c)) out.insert(c);
  }
  return out;
}

}  // namespace

ConflictHypergraph build_conflict_hypergraph(const mesh::SetSystem& s, int dim,
                                             const BuildOptions& opt) {
  ConflictHypergraph hg;
  hg.num_vertices = s.num_vertices;
  if (s.sets.empty()) return hg;
  Masks masks(s);
  Enumerator en{masks, s.num_vertices, dim + 1, opt.budget, 0, {}, {}, &hg.edges};
  en.run();
  std::sort(hg.edges.begin(), hg.edges.end());
  return hg;
}

std::pair<mesh::SimplicialPartition, SplitRecord> split_edge(
    const mesh::SimplicialPartition& p, int u, int v, ValueRule rule,
    const ValueOracle* oracle) {
  if (u > v) std::swap(u, v);
  bool found = false;
  for (const auto& s : p.simplices)
    if (std::binary_search(s.begin(), s.end(), u) &&
        std::binary_search(s.begin(), s.end(), v)) {
      found = true;
      break;
    }
  if (!found)
    throw Error(ErrorCode::NotAnEdge, "(" + std::to_string(u) + "," +
                                          std::to_string(v) +
                                          ") is not an edge of any simplex");

  mesh::SimplicialPartition out = p;
  const int w = static_cast<int>(out.vertices.size());
  mesh::Point mid(p.dim);
  for (int k = 0; k < p.dim; ++k)
    mid[k] = 0.5 * (p.vertices[u][k] + p.vertices[v][k]);
  out.vertices.push_back(mid);
  if (rule == ValueRule::Preserve) {
    out.values.push_back(0.5 * (p.values[u] + p.values[v]));
  } else {
    if (!oracle || !*oracle)
      throw Error(ErrorCode::SpecIncomplete,
                  "Evaluate rule needs a value oracle");
    out.values.push_back((*oracle)(mid));
  }

  std::vector<std::vector<int>> simplices;
  for (const auto& s : out.simplices) {
    bool has_u = std::binary_search(s.begin(), s.end(), u);
    bool has_v = std::binary_search(s.begin(), s.end(), v);
    if (has_u && has_v) {
      std::vector<int> su, sv;
      for (int x : s) {
        if (x != u) su.push_back(x);
        if (x != v) sv.push_back(x);
      }
      su.push_back(w);
      sv.push_back(w);
      std::sort(su.begin(), su.end());
      std::sort(sv.begin(), sv.end());
      simplices.push_back(std::move(su));
      simplices.push_back(std::move(sv));
    } else {
      simplices.push_back(s);
    }
  }
  out.simplices = std::move(simplices);

  SplitRecord rec;
  rec.u = u;
  rec.v = v;
  rec.w = w;
  return {std::move(out), rec};
}

std::pair<int, int> count_split_effect(const mesh::SetSystem& s,
                                       const ConflictHypergraph& hg, int u,
                                       int v, int k) {
  if (u > v) std::swap(u, v);
  int r = 0;
  for (const auto& e : hg.edges)
    if (static_cast<int>(e.size()) == k &&
        std::binary_search(e.begin(), e.end(), u) &&
        std::binary_search(e.begin(), e.end(), v))
      ++r;
  const int w = s.num_vertices;
  Masks pre(s);
  auto post = split_set_system(s, u, v, w);
  Masks post_masks(post);
  auto created = new_conflicts_of_size(hg, post_masks, pre, u, v, w, k);
  return {r, static_cast<int>(created.size())};
}

ConflictHypergraph apply_split(const mesh::SetSystem& before,
                               const ConflictHypergraph& hg, int u, int v,
                               int dim) {
  if (u > v) std::swap(u, v);
  const int w = before.num_vertices;
  auto post = split_set_system(before, u, v, w);
  Masks pre(before);
  Masks post_masks(post);

  ConflictHypergraph out;
  out.num_vertices = w + 1;
  for (const auto& e : hg.edges) {
    if (std::binary_search(e.begin(), e.end(), u) &&
        std::binary_search(e.begin(), e.end(), v))
      continue;  // eliminated by the split
    out.edges.push_back(e);
  }
  out.edges.push_back({u, v});
  // New rank-2 conflicts with w: vertices sharing no post-split simplex.
  for (int z = 0; z < w; ++z)
    if (z != u && z != v && !post_masks.feasible({z, w}))
      out.edges.push_back({z, w});
  for (int k = 3; k <= dim + 1; ++k)
    for (const auto& c : new_conflicts_of_size(hg, post_masks, pre, u, v, w, k))
      out.edges.push_back(c);
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

std::pair<mesh::SimplicialPartition, std::vector<SplitRecord>> reduce_rank(
    const mesh::SimplicialPartition& p, const ReduceOptions& opt) {
  mesh::SimplicialPartition part = p;
  std::vector<SplitRecord> records;
  auto ss = mesh::to_set_system(part);
  auto hg = build_conflict_hypergraph(ss, part.dim, opt.build);

  while (true) {
    int k = hg.rank();
    if (k < 3) break;
    std::set<std::pair<int, int>> ek;
    for (const auto& e : hg.edges) {
      if (static_cast<int>(e.size()) < k) continue;
      for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j)
          ek.insert({e[i], e[j]});
    }
    int best_delta = 0;
    std::pair<int, int> best_edge{-1, -1};
    int best_r = 0, best_c = 0;
    for (const auto& [u, v] : ek) {  // std::set iterates lexicographically
      auto [r, c] = count_split_effect(ss, hg, u, v, k);
      if (r - c > best_delta) {
        best_delta = r - c;
        best_edge = {u, v};
        best_r = r;
        best_c = c;
      }
    }
    if (best_edge.first < 0) break;  // best delta <= 0

    auto [next, rec] = split_edge(part, best_edge.first, best_edge.second,
                                  opt.rule, opt.oracle);
    rec.k = k;
    rec.eliminated = best_r;
    rec.created = best_c;
    auto next_hg = apply_split(ss, hg, best_edge.first, best_edge.second,
                               part.dim);
    part = std::move(next);
    ss = mesh::to_set_system(part);
    if (opt.debug_rebuild) {
      auto rebuilt = build_conflict_hypergraph(ss, part.dim, opt.build);
      if (rebuilt.edges != next_hg.edges)
        throw Error(ErrorCode::ValidationError,
                    "incremental hypergraph update disagrees with rebuild");
    }
    hg = std::move(next_hg);
    records.push_back(rec);
  }
  return {std::move(part), std::move(records)};
}

}  // namespace pwlmilp::conflict
