#include "pwlmilp/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "pwlmilp/predicates.hpp"

namespace pwlmilp::geom {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }
double dist(Vec2 a, Vec2 b) { return norm(a - b); }

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  return orient2d(a.x, a.y, b.x, b.y, c.x, c.y);
}

int incircle_test(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  double pa[2] = {a.x, a.y}, pb[2] = {b.x, b.y}, pc[2] = {c.x, c.y},
         pd[2] = {d.x, d.y};
  return incircle(pa, pb, pc, pd);
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  Vec2 u = b - a, v = c - a;
  double d = 2.0 * cross(u, v);
  double uu = dot(u, u), vv = dot(v, v);
  return {a.x + (v.y * uu - u.y * vv) / d, a.y + (u.x * vv - v.x * uu) / d};
}

double min_angle_deg(Vec2 a, Vec2 b, Vec2 c) {
  auto angle_at = [](Vec2 p, Vec2 q, Vec2 r) {
    Vec2 u = q - p, v = r - p;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
  };
  double m = std::min({angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
  return m * 180.0 / M_PI;
}

namespace {

// Closest distance between the convex hulls of two small point sets,
// by enumerating candidate support faces and solving the affine
// least-squares problem on each.
double hull_distance(const std::vector<Eigen::VectorXd>& as,
                     const std::vector<Eigen::VectorXd>& bs) {
  const double coord_tol = 1e-12;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t na = as.size(), nb = bs.size();
  for (std::size_t ma = 1; ma < (1u << na); ++ma) {
    std::vector<int> ia;
    for (std::size_t i = 0; i < na; ++i)
      if (ma & (1u << i)) ia.push_back(static_cast<int>(i));
    for (std::size_t mb = 1; mb < (1u << nb); ++mb) {
      std::vector<int> ib;
      for (std::size_t j = 0; j < nb; ++j)
        if (mb & (1u << j)) ib.push_back(static_cast<int>(j));
      const int ka = static_cast<int>(ia.size()), kb = static_cast<int>(ib.size());
      const int dim = static_cast<int>(as[0].size());
      Eigen::MatrixXd M(dim, ka - 1 + kb - 1);
      for (int i = 1; i < ka; ++i) M.col(i - 1) = as[ia[i]] - as[ia[0]];
      for (int j = 1; j < kb; ++j)
        M.col(ka - 1 + j - 1) = -(bs[ib[j]] - bs[ib[0]]);
      Eigen::VectorXd rhs = bs[ib[0]] - as[ia[0]];
      Eigen::VectorXd z;
      if (M.cols() == 0) {
        z.resize(0);
      } else {
        z = M.colPivHouseholderQr().solve(rhs);
      }
      double alpha0 = 1.0, beta0 = 1.0;
      bool ok = true;
      for (int i = 1; i < ka; ++i) {
        alpha0 -= z(i - 1);
        if (z(i - 1) < -coord_tol) ok = false;
      }
      for (int j = 1; j < kb; ++j) {
        beta0 -= z(ka - 1 + j - 1);
        if (z(ka - 1 + j - 1) < -coord_tol) ok = false;
      }
      if (alpha0 < -coord_tol || beta0 < -coord_tol) ok = false;
      if (!ok) continue;
      Eigen::VectorXd x = alpha0 * as[ia[0]], y = beta0 * bs[ib[0]];
      for (int i = 1; i < ka; ++i) x += z(i - 1) * as[ia[i]];
      for (int j = 1; j < kb; ++j) y += z(ka - 1 + j - 1) * bs[ib[j]];
      best = std::min(best, (x - y).norm());
    }
  }
  return best;
}

}  // namespace

SimplexMetrics simplex_metrics(const std::vector<std::vector<double>>& verts,
                               double volume_tol) {
  const std::size_t n = verts.size();
  if (n < 2) throw Error(ErrorCode::Degenerate, "simplex needs >= 2 vertices");
  const std::size_t d = n - 1;
  for (const auto& v : verts)
    if (v.size() != d)
      throw Error(ErrorCode::Degenerate, "vertex dimension mismatch");

  SimplexMetrics m;
  std::vector<Eigen::VectorXd> vs(n);
  for (std::size_t i = 0; i < n; ++i)
    vs[i] = Eigen::Map<const Eigen::VectorXd>(verts[i].data(), d);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      m.ell_max = std::max(m.ell_max, (vs[i] - vs[j]).norm());

  Eigen::MatrixXd E(d, d);
  for (std::size_t i = 1; i < n; ++i) E.col(i - 1) = vs[i] - vs[0];
  double fact = 1.0;
  for (std::size_t i = 2; i <= d; ++i) fact *= static_cast<double>(i);
  m.volume = std::abs(E.determinant()) / fact;
  if (m.volume <= volume_tol * std::pow(m.ell_max, static_cast<double>(d)))
    throw Error(ErrorCode::Degenerate, "simplex volume below tolerance");

  // delta_min over complementary vertex splits; smaller disjoint face
  // pairs are subsets of some split so never closer.
  m.delta_min = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask + 1 < (1u << n); ++mask) {
    if (!(mask & 1)) continue;  // fix vertex 0 on side A, halving the scan
    std::vector<Eigen::VectorXd> as, bs;
    for (std::size_t i = 0; i < n; ++i)
      (mask & (1u << i) ? as : bs).push_back(vs[i]);
    m.delta_min = std::min(m.delta_min, hull_distance(as, bs));
  }

  if (d == 2) {
    Vec2 a{verts[0][0], verts[0][1]}, b{verts[1][0], verts[1][1]},
        c{verts[2][0], verts[2][1]};
    m.alpha_min = min_angle_deg(a, b, c);
  } else {
    m.alpha_min = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Triangulation2D

namespace {

constexpr int kInterior = -1;

std::pair<int, int> norm_edge(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

int Triangulation2D::neighbor_slot(int t, int n) const {
  for (int j = 0; j < 3; ++j)
    if (tris_[t].nbr[j] == n) return j;
  assert(false && "adjacency is inconsistent");
  return -1;
}

void Triangulation2D::set_neighbor(int t, int old_nbr, int new_nbr) {
  if (t < 0) return;
  for (int j = 0; j < 3; ++j) {
    if (tris_[t].nbr[j] == old_nbr) {
      tris_[t].nbr[j] = new_nbr;
      return;
    }
  }
  assert(false && "neighbor to replace not found");
}

int Triangulation2D::locate_internal(Vec2 p, int hint, int& edge_out) const {
  int t = hint;
  if (t < 0 || t >= static_cast<int>(tris_.size())) t = 0;
  std::size_t steps = 0;
  const std::size_t cap = 4 * tris_.size() + 64;
  while (true) {
    bool moved = false;
    int zero_edge = -1, zero_count = 0;
    for (int k = 0; k < 3; ++k) {
      // Vary the scan offset to avoid walking cycles.
      int i = static_cast<int>((k + steps) % 3);
      Vec2 a = pts_[tris_[t].v[(i + 1) % 3]];
      Vec2 b = pts_[tris_[t].v[(i + 2) % 3]];
      int o = orientation(a, b, p);
      if (o < 0) {
        int n = tris_[t].nbr[i];
        if (n < 0) return -1;  // walked out of the domain
        t = n;
        moved = true;
        break;
      }
      if (o == 0) {
        ++zero_count;
        zero_edge = i;
      }
    }
    if (!moved) {
      if (zero_count == 0) {
        edge_out = kInterior;
      } else if (zero_count == 1) {
        edge_out = zero_edge;
      } else {
        // Two incident edges are collinear with p: p is a vertex.
        edge_out = 3;
      }
      walk_hint_ = t;
      return t;
    }
    if (++steps > cap) {
      // Fallback: exhaustive scan (the walk should never cycle with
      // exact predicates, but stay safe).
      for (int ti = 0; ti < static_cast<int>(tris_.size()); ++ti) {
        const auto& tr = tris_[ti];
        int zc = 0, ze = -1;
        bool outside = false;
        for (int i = 0; i < 3; ++i) {
          int o = orientation(pts_[tr.v[(i + 1) % 3]], pts_[tr.v[(i + 2) % 3]], p);
          if (o < 0) {
            outside = true;
            break;
          }
          if (o == 0) {
            ++zc;
            ze = i;
          }
        }
        if (outside) continue;
        edge_out = zc == 0 ? kInterior : (zc == 1 ? ze : 3);
        walk_hint_ = ti;
        return ti;
      }
      return -1;
    }
  }
}

int Triangulation2D::locate(Vec2 p) const {
  int edge;
  return locate_internal(p, walk_hint_, edge);
}

int Triangulation2D::insert_interior(int t, int vid) {
  Tri old = tris_[t];
  int t1 = static_cast<int>(tris_.size());
  int t2 = t1 + 1;
  const int a = old.v[0], b = old.v[1], c = old.v[2];
  tris_[t] = Tri{{vid, b, c}, {old.nbr[0], t1, t2}};
  tris_.push_back(Tri{{vid, c, a}, {old.nbr[1], t2, t}});
  tris_.push_back(Tri{{vid, a, b}, {old.nbr[2], t, t1}});
  set_neighbor(old.nbr[1], t, t1);
  set_neighbor(old.nbr[2], t, t2);
  legalize(t, 0, vid);
  legalize(t1, 0, vid);
  legalize(t2, 0, vid);
  return vid;
}

int Triangulation2D::insert_on_edge(int t, int e, int vid) {
  Tri told = tris_[t];
  const int c = told.v[e], a = told.v[(e + 1) % 3], b = told.v[(e + 2) % 3];
  const int na = told.nbr[(e + 1) % 3];  // across (b, c)
  const int nb = told.nbr[(e + 2) % 3];  // across (c, a)
  const int u = told.nbr[e];

  auto split_segment = [&](int sa, int sb, int mid) {
    auto it = segments_.find(norm_edge(sa, sb));
    if (it != segments_.end()) {
      segments_.erase(it);
      segments_.insert(norm_edge(sa, mid));
      segments_.insert(norm_edge(mid, sb));
    }
  };

  if (u < 0) {
    int t1 = static_cast<int>(tris_.size());
    tris_[t] = Tri{{c, a, vid}, {-1, t1, nb}};
    tris_.push_back(Tri{{c, vid, b}, {-1, na, t}});
    set_neighbor(na, t, t1);
    split_segment(a, b, vid);
    legalize(t, 2, vid);
    legalize(t1, 1, vid);
    return vid;
  }

  Tri uold = tris_[u];
  int j = neighbor_slot(u, t);
  const int d = uold.v[j];
  assert(uold.v[(j + 1) % 3] == b && uold.v[(j + 2) % 3] == a);
  const int ma = uold.nbr[(j + 2) % 3];  // across (d, b)
  const int mb = uold.nbr[(j + 1) % 3];  // across (a, d)

  int t1 = static_cast<int>(tris_.size());
  int u1 = t1 + 1;
  tris_[t] = Tri{{c, a, vid}, {u1, t1, nb}};
  tris_[u] = Tri{{d, b, vid}, {t1, u1, ma}};
  tris_.push_back(Tri{{c, vid, b}, {u, na, t}});
  tris_.push_back(Tri{{d, vid, a}, {t, mb, u}});
  set_neighbor(na, t, t1);
  set_neighbor(mb, u, u1);
  split_segment(a, b, vid);
  legalize(t, 2, vid);
  legalize(t1, 1, vid);
  legalize(u, 2, vid);
  legalize(u1, 1, vid);
  return vid;
}

void Triangulation2D::flip(int t, int e) {
  Tri told = tris_[t];
  const int n = told.nbr[e];
  Tri nold = tris_[n];
  const int j = neighbor_slot(n, t);
  const int x = told.v[e], a = told.v[(e + 1) % 3], b = told.v[(e + 2) % 3];
  const int d = nold.v[j];
  const int bb = nold.nbr[(j + 1) % 3];  // across (a, d)
  const int aa = nold.nbr[(j + 2) % 3];  // across (d, b)
  const int cc = told.nbr[(e + 2) % 3];  // across (x, a)
  const int dd = told.nbr[(e + 1) % 3];  // across (b, x)

  tris_[t] = Tri{{x, a, d}, {bb, n, cc}};
  tris_[n] = Tri{{x, d, b}, {aa, dd, t}};
  set_neighbor(bb, n, t);
  set_neighbor(dd, t, n);
}

void Triangulation2D::legalize(int t0, int e0, int vid) {
  std::vector<std::pair<int, int>> stack{{t0, e0}};
  while (!stack.empty()) {
    auto [t, e] = stack.back();
    stack.pop_back();
    if (tris_[t].v[e] != vid) {
      // The triangle was rewritten by a later flip; find vid again.
      e = -1;
      for (int i = 0; i < 3; ++i)
        if (tris_[t].v[i] == vid) e = i;
      if (e < 0) continue;
    }
    int n = tris_[t].nbr[e];
    if (n < 0) continue;
    int j = neighbor_slot(n, t);
    int d = tris_[n].v[j];
    const auto& tv = tris_[t].v;
    if (incircle_test(pts_[tv[0]], pts_[tv[1]], pts_[tv[2]], pts_[d]) > 0) {
      flip(t, e);
      stack.emplace_back(t, 0);
      stack.emplace_back(n, 0);
    }
  }
}

int Triangulation2D::insert(Vec2 p) {
  int edge;
  int t = locate_internal(p, walk_hint_, edge);
  if (t < 0)
    throw Error(ErrorCode::DegenerateInput, "point lies outside the domain");
  if (edge >= 3)
    throw Error(ErrorCode::DuplicatePoint, "point coincides with a vertex");
  int vid = static_cast<int>(pts_.size());
  pts_.push_back(p);
  if (edge == kInterior)
    insert_interior(t, vid);
  else
    insert_on_edge(t, edge, vid);
  return vid;
}

Triangulation2D Triangulation2D::delaunay(const std::vector<Vec2>& points) {
  const std::size_t n = points.size();
  if (n < 3)
    throw Error(ErrorCode::DegenerateInput, "need at least 3 points");

  Vec2 lo{points[0]}, hi{points[0]};
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorCode::DegenerateInput, "non-finite coordinate");
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  const double diag = dist(lo, hi);
  if (diag == 0.0)
    throw Error(ErrorCode::DegenerateInput, "all points coincide");

  // Duplicate detection with a hash grid at the merge tolerance.
  const double tol = 1e-12 * diag;
  {
    std::unordered_map<long long, std::vector<int>> grid;
    auto key = [&](double x, double y) {
      long long gx = static_cast<long long>(std::floor((x - lo.x) / tol));
      long long gy = static_cast<long long>(std::floor((y - lo.y) / tol));
      return gx * 0x9E3779B97F4A7C15LL + gy;
    };
    for (int i = 0; i < static_cast<int>(n); ++i) {
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy) {
          auto it = grid.find(key(points[i].x + dx * tol, points[i].y + dy * tol));
          if (it == grid.end()) continue;
          for (int j : it->second)
            if (dist(points[i], points[j]) <= tol)
              throw Error(ErrorCode::DuplicatePoint,
                          "points " + std::to_string(j) + " and " +
                              std::to_string(i) + " are closer than the merge tolerance");
        }
      grid[key(points[i].x, points[i].y)].push_back(i);
    }
  }

  bool collinear = true;
  for (std::size_t i = 2; i < n && collinear; ++i)
    if (orientation(points[0], points[1], points[i]) != 0) collinear = false;
  if (collinear)
    throw Error(ErrorCode::DegenerateInput, "all points are collinear");

  int bl = -1, br = -1, tr = -1, tl = -1;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    if (points[i].x == lo.x && points[i].y == lo.y) bl = i;
    if (points[i].x == hi.x && points[i].y == lo.y) br = i;
    if (points[i].x == hi.x && points[i].y == hi.y) tr = i;
    if (points[i].x == lo.x && points[i].y == hi.y) tl = i;
  }
  if (bl < 0 || br < 0 || tr < 0 || tl < 0)
    throw Error(ErrorCode::DegenerateInput,
                "the four corner points of the bounding rectangle must be present");

  Triangulation2D T;
  T.pts_ = points;
  T.lo_ = lo;
  T.hi_ = hi;
  // The four corners are cocircular; the tie goes to the diagonal
  // through the lowest vertex index.
  int lowest = std::min({bl, br, tr, tl});
  if (lowest == bl || lowest == tr) {
    T.tris_.push_back(Tri{{bl, br, tr}, {-1, 1, -1}});
    T.tris_.push_back(Tri{{bl, tr, tl}, {-1, -1, 0}});
  } else {
    T.tris_.push_back(Tri{{br, tr, tl}, {-1, 1, -1}});
    T.tris_.push_back(Tri{{br, tl, bl}, {-1, -1, 0}});
  }

  for (int i = 0; i < static_cast<int>(n); ++i) {
    if (i == bl || i == br || i == tr || i == tl) continue;
    int edge;
    int t = T.locate_internal(points[i], T.walk_hint_, edge);
    if (t < 0 || edge >= 3)
      throw Error(ErrorCode::DuplicatePoint, "unexpected duplicate vertex");
    if (edge == kInterior)
      T.insert_interior(t, i);
    else
      T.insert_on_edge(t, edge, i);
  }

  // Boundary edges become the constrained subsegments.
  for (const auto& t : T.tris_)
    for (int i = 0; i < 3; ++i)
      if (t.nbr[i] < 0)
        T.segments_.insert(norm_edge(t.v[(i + 1) % 3], t.v[(i + 2) % 3]));
  return T;
}

std::vector<std::array<int, 3>> Triangulation2D::triangles() const {
  std::vector<std::array<int, 3>> out;
  out.reserve(tris_.size());
  for (const auto& t : tris_) {
    std::array<int, 3> s = t.v;
    std::sort(s.begin(), s.end());
    out.push_back(s);
  }
  return out;
}

std::vector<std::array<int, 3>> Triangulation2D::adjacency() const {
  std::vector<std::array<int, 3>> out;
  out.reserve(tris_.size());
  for (const auto& t : tris_) out.push_back(t.nbr);
  return out;
}

std::vector<std::pair<int, int>> Triangulation2D::constrained_segments() const {
  return {segments_.begin(), segments_.end()};
}

std::size_t Triangulation2D::num_triangles() const { return tris_.size(); }

std::size_t Triangulation2D::refine(double alpha_lb_deg,
                                    std::size_t max_insertions) {
  if (!(alpha_lb_deg > 0.0 && alpha_lb_deg < 20.0))
    throw Error(ErrorCode::DegenerateInput,
                "alpha_lb must be in (0, 20) degrees");

  auto encroached_by = [&](int sa, int sb, Vec2 p) {
    // Strictly inside the diametral circle of segment (sa, sb).
    return dot(pts_[sa] - p, pts_[sb] - p) < 0.0;
  };

  // In a Delaunay triangulation it suffices to test the apexes of the
  // triangles adjacent to each subsegment.
  auto find_encroached = [&](int& sa, int& sb) {
    for (const auto& t : tris_) {
      for (int i = 0; i < 3; ++i) {
        int a = t.v[(i + 1) % 3], b = t.v[(i + 2) % 3];
        if (!segments_.count(norm_edge(a, b))) continue;
        if (encroached_by(a, b, pts_[t.v[i]])) {
          sa = a;
          sb = b;
          return true;
        }
      }
    }
    return false;
  };

  std::size_t inserted = 0;
  std::set<std::array<int, 3>> unsplittable;
  while (true) {
    if (inserted > max_insertions)
      throw Error(ErrorCode::RefinementLimit,
                  "refinement exceeded the insertion cap");
    int sa, sb;
    if (find_encroached(sa, sb)) {
      Vec2 mid = 0.5 * (pts_[sa] + pts_[sb]);
      insert(mid);
      ++inserted;
      continue;
    }

    // Worst skinny triangle (smallest minimum angle).
    int worst = -1;
    double worst_angle = alpha_lb_deg;
    for (int ti = 0; ti < static_cast<int>(tris_.size()); ++ti) {
      const auto& t = tris_[ti];
      std::array<int, 3> key = t.v;
      std::sort(key.begin(), key.end());
      if (unsplittable.count(key)) continue;
      double ang = min_angle_deg(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]]);
      if (ang < worst_angle) {
        worst_angle = ang;
        worst = ti;
      }
    }
    if (worst < 0) break;

    const auto& tv = tris_[worst].v;
    Vec2 cc = circumcenter(pts_[tv[0]], pts_[tv[1]], pts_[tv[2]]);

    // Segments whose diametral circle contains the candidate point are
    // split instead of inserting it (Ruppert's rule).
    std::vector<std::pair<int, int>> hit;
    for (const auto& s : segments_)
      if (encroached_by(s.first, s.second, cc)) hit.push_back(s);
    if (!hit.empty()) {
      for (const auto& s : hit) {
        if (!segments_.count(s)) continue;  // split by an earlier midpoint
        Vec2 mid = 0.5 * (pts_[s.first] + pts_[s.second]);
        insert(mid);
        ++inserted;
      }
      continue;
    }

    int edge;
    int loc = locate_internal(cc, worst, edge);
    if (loc < 0) {
      // Circumcenter escaped the domain without encroaching any
      // subsegment; split the boundary segment nearest to it.
      double best = std::numeric_limits<double>::infinity();
      std::pair<int, int> bseg{-1, -1};
      for (const auto& s : segments_) {
        Vec2 m = 0.5 * (pts_[s.first] + pts_[s.second]);
        double dd = dist(m, cc);
        if (dd < best) {
          best = dd;
          bseg = s;
        }
      }
      Vec2 mid = 0.5 * (pts_[bseg.first] + pts_[bseg.second]);
      insert(mid);
      ++inserted;
      continue;
    }
    if (edge >= 3) {
      // Circumcenter coincides with an existing vertex; this triangle
      // cannot be improved by Ruppert's step.
      std::array<int, 3> key = tv;
      std::sort(key.begin(), key.end());
      unsplittable.insert(key);
      continue;
    }
    int vid = static_cast<int>(pts_.size());
    pts_.push_back(cc);
    if (edge == kInterior)
      insert_interior(loc, vid);
    else
      insert_on_edge(loc, edge, vid);
    ++inserted;
  }
  return inserted;
}

}  // namespace pwlmilp::geom
