#include "pwlmilp/blocking.hpp"

#include <algorithm>
#include <numeric>

namespace pwlmilp::blocking {

int BlockingHypergraph::rank() const {
  std::size_t r = 0;
  for (const auto& e : edges) r = std::max(r, e.size());
  return static_cast<int>(r);
}

std::size_t BlockingHypergraph::count_rank2() const {
  std::size_t c = 0;
  for (const auto& e : edges)
    if (e.size() == 2) ++c;
  return c;
}

namespace {

using Bits = std::vector<std::uint64_t>;

Bits make_bits(int n) { return Bits((n + 63) / 64, 0); }

void set_bit(Bits& b, int i) { b[i / 64] |= 1ull << (i % 64); }

bool subset_of(const Bits& a, const Bits& b) {
  for (std::size_t w = 0; w < a.size(); ++w)
    if (a[w] & ~b[w]) return false;
  return true;
}

void or_into(Bits& acc, const Bits& m) {
  for (std::size_t w = 0; w < acc.size(); ++w) acc[w] |= m[w];
}

}  // namespace

BlockingHypergraph build_blocking_hypergraph(
    const mesh::SetSystem& s, const conflict::ConflictHypergraph& hg, int dim,
    const conflict::BuildOptions& opt) {
  BlockingHypergraph bh;
  bh.num_sets = static_cast<int>(s.sets.size());

  std::vector<Bits> high_edges;  // conflict edges of size >= 3
  for (const auto& e : hg.edges) {
    if (e.size() < 3) continue;
    Bits b = make_bits(s.num_vertices);
    for (int v : e) set_bit(b, v);
    high_edges.push_back(std::move(b));
  }
  if (high_edges.empty()) return bh;

  std::vector<Bits> set_bits(s.sets.size(), make_bits(s.num_vertices));
  for (std::size_t i = 0; i < s.sets.size(); ++i)
    for (int v : s.sets[i]) set_bit(set_bits[i], v);

  auto blocking = [&](const Bits& union_bits) {
    for (const auto& e : high_edges)
      if (subset_of(e, union_bits)) return true;
    return false;
  };

  // Frontier recursion over non-blocking prefixes (blocking is monotone
  // under inclusion, so supersets of blocking sets are never minimal).
  const int m = bh.num_sets;
  std::size_t visits = 0;
  std::vector<int> prefix;
  std::vector<Bits> unions;
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(prefix.size()) >= dim + 1) return;
    for (int next = (prefix.empty() ? 0 : prefix.back() + 1); next < m;
         ++next) {
      if (++visits > opt.budget)
        throw Error(ErrorCode::SizeLimit,
                    "blocking enumeration exceeded its budget");
      Bits u = prefix.empty() ? make_bits(s.num_vertices) : unions.back();
      or_into(u, set_bits[next]);
      if (!blocking(u)) {
        prefix.push_back(next);
        unions.push_back(std::move(u));
        self(self);
        prefix.pop_back();
        unions.pop_back();
        continue;
      }
      // prefix + next is blocking and the prefix is not; minimal iff
      // every one-element-removed subset is non-blocking.
      bool minimal = true;
      for (std::size_t drop = 0; drop < prefix.size() && minimal; ++drop) {
        Bits u2 = make_bits(s.num_vertices);
        for (std::size_t i = 0; i < prefix.size(); ++i)
          if (i != drop) or_into(u2, set_bits[prefix[i]]);
        or_into(u2, set_bits[next]);
        if (blocking(u2)) minimal = false;
      }
      if (minimal) {
        auto edge = prefix;
        edge.push_back(next);
        bh.edges.push_back(std::move(edge));
      }
    }
  };
  extend(extend);
  std::sort(bh.edges.begin(), bh.edges.end());
  return bh;
}

sat::Cnf coloring_cnf(const BlockingHypergraph& bh, int q) {
  sat::Cnf f;
  const int m = bh.num_sets;
  f.num_vars = m * q;
  auto var = [&](int set, int color) { return set * q + color + 1; };
  for (int i = 0; i < m; ++i) {
    std::vector<int> at_least;
    for (int c = 0; c < q; ++c) at_least.push_back(var(i, c));
    f.add_clause(std::move(at_least));
    for (int c = 0; c < q; ++c)
      for (int c2 = c + 1; c2 < q; ++c2)
        f.add_clause({-var(i, c), -var(i, c2)});
  }
  for (const auto& edge : bh.edges)
    for (int c = 0; c < q; ++c) {
      std::vector<int> cl;
      for (int i : edge) cl.push_back(-var(i, c));
      f.add_clause(std::move(cl));
    }
  return f;
}

bool coloring_valid(const BlockingHypergraph& bh,
                    const std::vector<int>& gamma) {
  for (const auto& edge : bh.edges) {
    bool mono = true;
    for (int i : edge)
      if (gamma[i] != gamma[edge[0]]) mono = false;
    if (mono) return false;
  }
  return true;
}

namespace {

std::vector<int> patterns_for(const mesh::SetSystem& s,
                              const std::vector<int>& gamma, int v) {
  std::vector<int> colors;
  for (std::size_t i = 0; i < s.sets.size(); ++i)
    if (std::binary_search(s.sets[i].begin(), s.sets[i].end(), v))
      colors.push_back(gamma[i]);
  std::sort(colors.begin(), colors.end());
  colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
  return colors;
}

}  // namespace

Coloring color_blocking(const mesh::SetSystem& s,
                        const BlockingHypergraph& bh) {
  const int m = static_cast<int>(s.sets.size());
  Coloring col;
  col.gamma.assign(m, 1);
  if (bh.edges.empty()) {
    col.q = 1;
  } else {
    // Greedy coloring of the rank-2 subgraph, largest degree first.
    std::vector<std::vector<int>> adj(m);
    for (const auto& e : bh.edges)
      if (e.size() == 2) {
        adj[e[0]].push_back(e[1]);
        adj[e[1]].push_back(e[0]);
      }
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return adj[a].size() > adj[b].size();
    });
    std::vector<int> greedy(m, 0);
    int q0 = 1;
    for (int i : order) {
      std::vector<bool> used(m + 2, false);
      for (int j : adj[i])
        if (greedy[j] > 0) used[greedy[j]] = true;
      int c = 1;
      while (used[c]) ++c;
      greedy[i] = c;
      q0 = std::max(q0, c);
    }

    // SAT bracket search from the greedy color count.
    auto try_q = [&](int q) -> std::optional<std::vector<int>> {
      auto model = sat::solve(coloring_cnf(bh, q));
      if (!model) return std::nullopt;
      std::vector<int> gamma(m, 1);
      for (int i = 0; i < m; ++i)
        for (int c = 0; c < q; ++c)
          if ((*model)[i * q + c + 1]) {
            gamma[i] = c + 1;
            break;
          }
      return gamma;
    };
    int q = q0;
    auto best = try_q(q);
    if (best) {
      while (q > 1) {
        auto next = try_q(q - 1);
        if (!next) break;
        best = next;
        --q;
      }
    } else {
      while (!best) {
        ++q;
        best = try_q(q);
      }
    }
    col.q = q;
    col.gamma = *best;
  }
  col.patterns.resize(s.num_vertices);
  for (int v = 0; v < s.num_vertices; ++v)
    col.patterns[v] = patterns_for(s, col.gamma, v);
  return col;
}

}  // namespace pwlmilp::blocking
