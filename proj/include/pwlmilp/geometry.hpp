#ifndef PWLMILP_GEOMETRY_HPP
#define PWLMILP_GEOMETRY_HPP

#include <array>
#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "pwlmilp/errors.hpp"

namespace pwlmilp::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);
double dist(Vec2 a, Vec2 b);

/// Sign of the signed area of triangle abc (+1 counterclockwise).
int orientation(Vec2 a, Vec2 b, Vec2 c);

/// +1 iff d lies strictly inside the circumcircle of CCW triangle abc.
int incircle_test(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c);

/// Smallest angle of triangle abc, in degrees.
double min_angle_deg(Vec2 a, Vec2 b, Vec2 c);

struct SimplexMetrics {
  double ell_max = 0.0;    // longest edge
  double delta_min = 0.0;  // min distance between disjoint faces
  double alpha_min = 0.0;  // smallest angle in degrees; only set for d == 2
  double volume = 0.0;
};

/// Metrics of a full-dimensional d-simplex given its d+1 vertices
/// (each of size d). Throws Degenerate when the volume vanishes.
SimplexMetrics simplex_metrics(const std::vector<std::vector<double>>& verts,
                               double volume_tol = 1e-14);

/// Planar triangulation of a rectangle domain, maintained Delaunay.
///
/// Vertices are immutable once inserted; triangles are stored with CCW
/// orientation and per-edge adjacency. The rectangle boundary is kept as
/// a set of constrained subsegments which refine() may split.
class Triangulation2D {
 public:
  /// Delaunay triangulation of the given points. The axis-aligned
  /// bounding box of the input is the domain; its four corners must be
  /// present among the points. Cocircular ties resolve in favor of the
  /// configuration created by the lowest-index vertices (fixed insertion
  /// order, strict incircle test).
  static Triangulation2D delaunay(const std::vector<Vec2>& points);

  /// Ruppert refinement until every triangle's smallest angle exceeds
  /// alpha_lb_deg. Requires 0 < alpha_lb_deg < 20. Inserted vertices are
  /// appended to points(). Returns the number of insertions.
  std::size_t refine(double alpha_lb_deg,
                     std::size_t max_insertions = 1000000);

  const std::vector<Vec2>& points() const { return pts_; }

  /// Alive triangles as sorted vertex triples, in deterministic order.
  std::vector<std::array<int, 3>> triangles() const;

  /// Neighbor triangle ids aligned with triangles(); -1 on the boundary.
  std::vector<std::array<int, 3>> adjacency() const;

  /// Constrained boundary subsegments as sorted index pairs.
  std::vector<std::pair<int, int>> constrained_segments() const;

  std::size_t num_triangles() const;

  Vec2 domain_lo() const { return lo_; }
  Vec2 domain_hi() const { return hi_; }

  /// Index into triangles() of a triangle containing p, or -1 if p is
  /// outside the domain. Points on shared edges report the first
  /// triangle encountered by the walk.
  int locate(Vec2 p) const;

  /// Inserts a point strictly inside the domain (or on a boundary edge)
  /// and restores the Delaunay property. Returns the new vertex id.
  int insert(Vec2 p);

 private:
  struct Tri {
    std::array<int, 3> v;    // CCW
    std::array<int, 3> nbr;  // nbr[i] shares the edge opposite v[i]
  };

  int locate_internal(Vec2 p, int hint, int& edge_out) const;
  int insert_interior(int t, int vid);
  int insert_on_edge(int t, int e, int vid);
  void legalize(int t, int e, int vid);
  void flip(int t, int e);
  int neighbor_slot(int t, int n) const;
  void set_neighbor(int t, int old_nbr, int new_nbr);

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::set<std::pair<int, int>> segments_;
  Vec2 lo_, hi_;
  mutable int walk_hint_ = 0;
};

}  // namespace pwlmilp::geom

#endif  // PWLMILP_GEOMETRY_HPP
