#include "pwlmilp/milp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pwlmilp::milp {

int MilpModel::add_var(const std::string& name, VarKind kind, double lb,
                       double ub) {
  vars.push_back({name, kind, lb, ub});
  return static_cast<int>(vars.size()) - 1;
}

void MilpModel::add_con(const std::string& name,
                        std::vector<std::pair<int, double>> terms, Sense sense,
                        double rhs) {
  cons.push_back({name, std::move(terms), sense, rhs});
}

int MilpModel::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

ModelSize MilpModel::size() const {
  ModelSize s;
  s.rows = cons.size();
  s.cols = vars.size();
  for (const auto& v : vars)
    if (v.kind == VarKind::Binary) ++s.binaries;
  for (const auto& c : cons) s.nonzeros += c.terms.size();
  return s;
}

double MilpModel::max_violation(
    const std::map<std::string, double>& point) const {
  std::vector<double> x(vars.size(), 0.0);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto it = point.find(vars[i].name);
    if (it != point.end()) x[i] = it->second;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    worst = std::max(worst, vars[i].lb - x[i]);
    worst = std::max(worst, x[i] - vars[i].ub);
  }
  for (const auto& c : cons) {
    double act = 0.0;
    for (auto [vi, coef] : c.terms) act += coef * x[vi];
    switch (c.sense) {
      case Sense::LE: worst = std::max(worst, act - c.rhs); break;
      case Sense::GE: worst = std::max(worst, c.rhs - act); break;
      case Sense::EQ: worst = std::max(worst, std::abs(act - c.rhs)); break;
    }
  }
  return worst;
}

bool models_equal(const MilpModel& a, const MilpModel& b) {
  auto varmap = [](const MilpModel& m) {
    std::map<std::string, std::tuple<VarKind, double, double>> out;
    for (const auto& v : m.vars) out[v.name] = {v.kind, v.lb, v.ub};
    return out;
  };
  if (varmap(a) != varmap(b)) return false;
  if (a.cons.size() != b.cons.size()) return false;
  auto conterms = [](const MilpModel& m, const Constraint& c) {
    std::map<std::string, double> t;
    for (auto [vi, coef] : c.terms) t[m.vars[vi].name] += coef;
    return t;
  };
  for (std::size_t i = 0; i < a.cons.size(); ++i) {
    const auto &ca = a.cons[i], &cb = b.cons[i];
    if (ca.name != cb.name || ca.sense != cb.sense || ca.rhs != cb.rhs)
      return false;
    if (conterms(a, ca) != conterms(b, cb)) return false;
  }
  if (a.obj.sense != b.obj.sense) return false;
  std::map<std::string, double> oa, ob;
  for (auto [vi, c] : a.obj.terms) oa[a.vars[vi].name] += c;
  for (auto [vi, c] : b.obj.terms) ob[b.vars[vi].name] += c;
  return oa == ob;
}

std::string lambda_name(int vertex_id) {
  return "lam_" + std::to_string(vertex_id);
}

int lambda_vertex(const std::string& var_name) {
  if (var_name.rfind("lam_", 0) != 0) return -1;
  try {
    std::size_t used = 0;
    int v = std::stoi(var_name.substr(4), &used);
    if (used != var_name.size() - 4) return -1;
    return v;
  } catch (...) {
    return -1;
  }
}

namespace {

void add_lambda_vars(MilpModel& m, int n) {
  for (int v = 0; v < n; ++v)
    m.add_var(lambda_name(v), VarKind::Continuous, 0.0, 1.0);
}

void add_convexity(MilpModel& m, int n) {
  std::vector<std::pair<int, double>> terms;
  for (int v = 0; v < n; ++v) terms.emplace_back(v, 1.0);
  m.add_con("conv", std::move(terms), Sense::EQ, 1.0);
}

}  // namespace

MilpModel build_gib(const DisjunctionSpec& spec) {
  const int n = spec.sets.num_vertices;
  if (spec.has_rank3 && !spec.coloring)
    throw Error(ErrorCode::SpecIncomplete,
                "rank-3 conflicts present but no coloring supplied");
  MilpModel m;
  m.name = "gib";
  add_lambda_vars(m, n);

  std::vector<int> yvar;
  for (std::size_t l = 0; l < spec.cover.bicliques.size(); ++l)
    yvar.push_back(m.add_var("y_" + std::to_string(l + 1), VarKind::Binary,
                             0.0, 1.0));

  std::vector<int> zvar;
  if (spec.has_rank3) {
    for (int c = 0; c < spec.coloring->q; ++c)
      zvar.push_back(m.add_var("z_" + std::to_string(c + 1), VarKind::Binary,
                               0.0, 1.0));
  }

  add_convexity(m, n);
  for (std::size_t l = 0; l < spec.cover.bicliques.size(); ++l) {
    const auto& bc = spec.cover.bicliques[l];
    std::vector<std::pair<int, double>> ta, tb;
    for (int v : bc.a) ta.emplace_back(v, 1.0);
    ta.emplace_back(yvar[l], -1.0);
    m.add_con("bic_" + std::to_string(l + 1) + "_a", std::move(ta), Sense::LE,
              0.0);
    for (int v : bc.b) tb.emplace_back(v, 1.0);
    tb.emplace_back(yvar[l], 1.0);
    m.add_con("bic_" + std::to_string(l + 1) + "_b", std::move(tb), Sense::LE,
              1.0);
  }
  if (spec.has_rank3) {
    std::vector<std::pair<int, double>> zsum;
    for (int z : zvar) zsum.emplace_back(z, 1.0);
    m.add_con("col_sum", std::move(zsum), Sense::EQ, 1.0);
    // Group vertices by color pattern; one constraint per pattern, in
    // order of each pattern's first vertex.
    std::map<std::vector<int>, std::vector<int>> groups;
    for (int v = 0; v < n; ++v)
      groups[spec.coloring->patterns[v]].push_back(v);
    std::vector<std::pair<int, const std::vector<int>*>> ordered;
    for (const auto& [pat, verts] : groups)
      ordered.emplace_back(verts.front(), &pat);
    std::sort(ordered.begin(), ordered.end());
    int idx = 0;
    for (const auto& [first_v, pat] : ordered) {
      (void)first_v;
      std::vector<std::pair<int, double>> terms;
      for (int v : groups[*pat]) terms.emplace_back(v, 1.0);
      for (int c : *pat) terms.emplace_back(zvar[c - 1], -1.0);
      m.add_con("col_pat_" + std::to_string(++idx), std::move(terms),
                Sense::LE, 0.0);
    }
  }
  return m;
}

MilpModel build_ib_scheme(
    int num_vertices,
    const std::vector<std::pair<std::vector<int>, std::vector<int>>>& scheme) {
  MilpModel m;
  m.name = "ib_scheme";
  add_lambda_vars(m, num_vertices);
  std::vector<int> zvar;
  for (std::size_t l = 0; l < scheme.size(); ++l)
    zvar.push_back(m.add_var("z_" + std::to_string(l + 1), VarKind::Binary,
                             0.0, 1.0));
  add_convexity(m, num_vertices);
  for (std::size_t l = 0; l < scheme.size(); ++l) {
    std::set<int> left(scheme[l].first.begin(), scheme[l].first.end());
    std::set<int> right(scheme[l].second.begin(), scheme[l].second.end());
    std::vector<std::pair<int, double>> tl, tr;
    for (int v = 0; v < num_vertices; ++v)
      if (!left.count(v)) tl.emplace_back(v, 1.0);
    tl.emplace_back(zvar[l], -1.0);
    m.add_con("ib_" + std::to_string(l + 1) + "_l", std::move(tl), Sense::LE,
              0.0);
    for (int v = 0; v < num_vertices; ++v)
      if (!right.count(v)) tr.emplace_back(v, 1.0);
    tr.emplace_back(zvar[l], 1.0);
    m.add_con("ib_" + std::to_string(l + 1) + "_r", std::move(tr), Sense::LE,
              1.0);
  }
  return m;
}

BaselineKind baseline_from_name(const std::string& name) {
  if (name == "dlog") return BaselineKind::DLog;
  if (name == "inc") return BaselineKind::Inc;
  if (name == "mc") return BaselineKind::MC;
  if (name == "dcc") return BaselineKind::DCC;
  if (name == "cc") return BaselineKind::CC;
  throw Error(ErrorCode::ParseError, "unknown formulation: " + name);
}

namespace {

std::string copy_name(int simplex, int vertex) {
  return "w_" + std::to_string(simplex + 1) + "_" + std::to_string(vertex);
}

// Copies w_i_v for v in S_i plus aggregation rows lam_v = sum_i w_i_v.
std::vector<std::vector<int>> add_copies_and_aggregation(
    MilpModel& m, const mesh::SetSystem& s) {
  const int n = s.num_vertices;
  std::vector<std::vector<int>> wvar(s.sets.size());
  for (std::size_t i = 0; i < s.sets.size(); ++i)
    for (int v : s.sets[i])
      wvar[i].push_back(m.add_var(copy_name(static_cast<int>(i), v),
                                  VarKind::Continuous, 0.0, 1.0));
  for (int v = 0; v < n; ++v) {
    std::vector<std::pair<int, double>> terms{{v, 1.0}};
    for (std::size_t i = 0; i < s.sets.size(); ++i)
      for (std::size_t k = 0; k < s.sets[i].size(); ++k)
        if (s.sets[i][k] == v) terms.emplace_back(wvar[i][k], -1.0);
    m.add_con("agg_" + std::to_string(v), std::move(terms), Sense::EQ, 0.0);
  }
  return wvar;
}

// Hamiltonian path in the given adjacency with iterative-deepening DFS
// and a node budget; empty when none found within budget.
std::vector<int> hamiltonian_path(const std::vector<std::vector<char>>& adj,
                                  std::size_t budget) {
  const int m = static_cast<int>(adj.size());
  std::vector<int> path, best;
  std::vector<char> used(m, 0);
  std::size_t nodes = 0;
  auto dfs = [&](auto&& self, int v) -> bool {
    if (++nodes > budget) return false;
    path.push_back(v);
    used[v] = 1;
    if (static_cast<int>(path.size()) == m) return true;
    for (int w = 0; w < m; ++w)
      if (!used[w] && adj[v][w] && self(self, w)) return true;
    path.pop_back();
    used[v] = 0;
    return false;
  };
  for (int start = 0; start < m && nodes <= budget; ++start) {
    path.clear();
    std::fill(used.begin(), used.end(), 0);
    if (dfs(dfs, start)) return path;
  }
  return {};
}

MilpModel build_inc(const mesh::SetSystem& s) {
  const int n = s.num_vertices;
  const int m_count = static_cast<int>(s.sets.size());
  const int d = static_cast<int>(s.sets.front().size()) - 1;

  auto shared = [&](int i, int j) {
    std::vector<int> out;
    std::set_intersection(s.sets[i].begin(), s.sets[i].end(),
                          s.sets[j].begin(), s.sets[j].end(),
                          std::back_inserter(out));
    return out;
  };

  // Prefer a facet path (d shared vertices); fall back to the weaker
  // vertex-sharing requirement.
  std::vector<std::vector<char>> facet_adj(m_count,
                                           std::vector<char>(m_count, 0));
  std::vector<std::vector<char>> vert_adj(m_count,
                                          std::vector<char>(m_count, 0));
  for (int i = 0; i < m_count; ++i)
    for (int j = i + 1; j < m_count; ++j) {
      auto sh = shared(i, j);
      if (static_cast<int>(sh.size()) == d)
        facet_adj[i][j] = facet_adj[j][i] = 1;
      if (!sh.empty()) vert_adj[i][j] = vert_adj[j][i] = 1;
    }
  std::vector<int> order = hamiltonian_path(facet_adj, 2000000);
  if (order.empty()) order = hamiltonian_path(vert_adj, 2000000);
  if (order.empty())
    throw Error(ErrorCode::OrderingUnavailable,
                "no simplex ordering with shared vertices exists");

  // Vertex orderings: the exit vertex of simplex i equals the entry
  // vertex of simplex i+1 and both lie in the shared set.
  std::vector<std::vector<int>> vord(m_count);  // vord[i][0..d]
  std::vector<int> entry(m_count, -1), exit_v(m_count, -1);
  for (int k = 0; k + 1 < m_count; ++k) {
    auto sh = shared(order[k], order[k + 1]);
    int link = -1;
    for (int cand : sh)
      if (cand != entry[k]) {
        link = cand;
        break;
      }
    if (link < 0)
      throw Error(ErrorCode::OrderingUnavailable,
                  "cannot choose distinct entry/exit vertices along the path");
    exit_v[k] = link;
    entry[k + 1] = link;
  }
  for (int k = 0; k < m_count; ++k) {
    const auto& set = s.sets[order[k]];
    std::vector<int> rest;
    for (int v : set)
      if (v != entry[k] && v != exit_v[k]) rest.push_back(v);
    std::vector<int> vo;
    vo.push_back(entry[k] >= 0 ? entry[k] : rest.front());
    if (entry[k] < 0) rest.erase(rest.begin());
    for (int v : rest) vo.push_back(v);
    if (exit_v[k] >= 0) vo.push_back(exit_v[k]);
    vord[k] = vo;
  }

  MilpModel m;
  m.name = "inc";
  add_lambda_vars(m, n);
  std::vector<std::vector<int>> dvar(m_count);
  for (int k = 0; k < m_count; ++k)
    for (int j = 1; j <= d; ++j)
      dvar[k].push_back(m.add_var("delta_" + std::to_string(k + 1) + "_" +
                                      std::to_string(j),
                                  VarKind::Continuous, 0.0, 1.0));
  std::vector<int> yvar;
  for (int k = 0; k + 1 < m_count; ++k)
    yvar.push_back(m.add_var("y_" + std::to_string(k + 1), VarKind::Binary,
                             0.0, 1.0));

  add_convexity(m, n);
  {
    std::vector<std::pair<int, double>> t;
    for (int j = 0; j < d; ++j) t.emplace_back(dvar[0][j], 1.0);
    m.add_con("inc_top", std::move(t), Sense::LE, 1.0);
  }
  for (int k = 0; k + 1 < m_count; ++k) {
    std::vector<std::pair<int, double>> up;
    for (int j = 0; j < d; ++j) up.emplace_back(dvar[k + 1][j], 1.0);
    up.emplace_back(yvar[k], -1.0);
    m.add_con("inc_up_" + std::to_string(k + 1), std::move(up), Sense::LE,
              0.0);
    m.add_con("inc_lo_" + std::to_string(k + 1),
              {{yvar[k], 1.0}, {dvar[k][d - 1], -1.0}}, Sense::LE, 0.0);
  }
  // lam_v = [v == first base] + sum of delta terms hitting v minus the
  // base-vertex telescoping terms.
  for (int v = 0; v < n; ++v) {
    std::map<int, double> coef;
    for (int k = 0; k < m_count; ++k) {
      for (int j = 1; j <= d; ++j) {
        if (vord[k][j] == v) coef[dvar[k][j - 1]] += 1.0;
        if (vord[k][0] == v) coef[dvar[k][j - 1]] -= 1.0;
      }
    }
    std::vector<std::pair<int, double>> terms{{v, 1.0}};
    for (auto [vi, c] : coef)
      if (c != 0.0) terms.emplace_back(vi, -c);
    double rhs = vord[0][0] == v ? 1.0 : 0.0;
    m.add_con("agg_" + std::to_string(v), std::move(terms), Sense::EQ, rhs);
  }
  return m;
}

}  // namespace

MilpModel build_baseline(const DisjunctionSpec& spec, BaselineKind kind) {
  const auto& s = spec.sets;
  const int n = s.num_vertices;
  const int m_count = static_cast<int>(s.sets.size());
  if (m_count == 0)
    throw Error(ErrorCode::ValidationError, "empty set system");

  if (kind == BaselineKind::Inc) return build_inc(s);

  MilpModel m;
  if (kind == BaselineKind::CC) {
    m.name = "cc";
    add_lambda_vars(m, n);
    std::vector<int> yvar;
    for (int i = 0; i < m_count; ++i)
      yvar.push_back(m.add_var("y_" + std::to_string(i + 1), VarKind::Binary,
                               0.0, 1.0));
    add_convexity(m, n);
    {
      std::vector<std::pair<int, double>> t;
      for (int y : yvar) t.emplace_back(y, 1.0);
      m.add_con("choice", std::move(t), Sense::EQ, 1.0);
    }
    for (int v = 0; v < n; ++v) {
      std::vector<std::pair<int, double>> t{{v, 1.0}};
      for (int i = 0; i < m_count; ++i)
        if (std::binary_search(s.sets[i].begin(), s.sets[i].end(), v))
          t.emplace_back(yvar[i], -1.0);
      m.add_con("cc_" + std::to_string(v), std::move(t), Sense::LE, 0.0);
    }
    return m;
  }

  if (kind == BaselineKind::DCC || kind == BaselineKind::MC) {
    m.name = kind == BaselineKind::DCC ? "dcc" : "mc";
    add_lambda_vars(m, n);
    std::vector<int> yvar;
    for (int i = 0; i < m_count; ++i)
      yvar.push_back(m.add_var("y_" + std::to_string(i + 1), VarKind::Binary,
                               0.0, 1.0));
    auto wvar = add_copies_and_aggregation(m, s);
    add_convexity(m, n);
    {
      std::vector<std::pair<int, double>> t;
      for (int y : yvar) t.emplace_back(y, 1.0);
      m.add_con("choice", std::move(t), Sense::EQ, 1.0);
    }
    if (kind == BaselineKind::DCC) {
      for (int i = 0; i < m_count; ++i) {
        std::vector<std::pair<int, double>> t;
        for (int w : wvar[i]) t.emplace_back(w, 1.0);
        t.emplace_back(yvar[i], -1.0);
        m.add_con("dcc_" + std::to_string(i + 1), std::move(t), Sense::EQ,
                  0.0);
      }
    } else {
      std::vector<std::pair<int, double>> mass;
      for (int i = 0; i < m_count; ++i)
        for (int w : wvar[i]) mass.emplace_back(w, 1.0);
      m.add_con("mass", std::move(mass), Sense::EQ, 1.0);
      for (int i = 0; i < m_count; ++i)
        for (std::size_t k = 0; k < wvar[i].size(); ++k)
          m.add_con("mc_" + std::to_string(i + 1) + "_" +
                        std::to_string(s.sets[i][k]),
                    {{wvar[i][k], 1.0}, {yvar[i], -1.0}}, Sense::LE, 0.0);
    }
    return m;
  }

  // DLog: bit binaries over the binary code of the simplex index.
  m.name = "dlog";
  add_lambda_vars(m, n);
  int bits = 0;
  while ((1 << bits) < m_count) ++bits;
  std::vector<int> bvar;
  for (int l = 0; l < bits; ++l)
    bvar.push_back(
        m.add_var("b_" + std::to_string(l + 1), VarKind::Binary, 0.0, 1.0));
  auto wvar = add_copies_and_aggregation(m, s);
  add_convexity(m, n);
  {
    std::vector<std::pair<int, double>> mass;
    for (int i = 0; i < m_count; ++i)
      for (int w : wvar[i]) mass.emplace_back(w, 1.0);
    m.add_con("mass", std::move(mass), Sense::EQ, 1.0);
  }
  for (int l = 0; l < bits; ++l) {
    std::vector<std::pair<int, double>> t1, t0;
    for (int i = 0; i < m_count; ++i) {
      auto& dst = (i >> l) & 1 ? t1 : t0;
      for (int w : wvar[i]) dst.emplace_back(w, 1.0);
    }
    t1.emplace_back(bvar[l], -1.0);
    m.add_con("dlog_" + std::to_string(l + 1) + "_1", std::move(t1), Sense::LE,
              0.0);
    t0.emplace_back(bvar[l], 1.0);
    m.add_con("dlog_" + std::to_string(l + 1) + "_0", std::move(t0), Sense::LE,
              1.0);
  }
  return m;
}

}  // namespace pwlmilp::milp
