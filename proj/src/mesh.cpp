#include "pwlmilp/mesh.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace pwlmilp::mesh {

using geom::Vec2;
using nlohmann::json;

SetSystem to_set_system(const SimplicialPartition& p) {
  SetSystem s;
  s.num_vertices = static_cast<int>(p.vertices.size());
  std::set<std::vector<int>> seen;
  for (const auto& simplex : p.simplices) {
    std::vector<int> ids = simplex;
    std::sort(ids.begin(), ids.end());
    if (seen.insert(ids).second) s.sets.push_back(std::move(ids));
  }
  return s;
}

namespace {

bool strictly_between(Vec2 a, Vec2 b, Vec2 p) {
  // Assumes collinear. True when p lies in the open segment.
  if (a.x != b.x) return (a.x < p.x) != (b.x < p.x);
  return (a.y < p.y) != (b.y < p.y);
}

// Exact pairwise check of the polyhedral-partition property for d = 2.
void validate_2d(const SimplicialPartition& p) {
  const auto& vs = p.vertices;
  auto pt = [&](int i) { return Vec2{vs[i][0], vs[i][1]}; };

  std::vector<std::array<int, 3>> tris;
  for (const auto& s : p.simplices) {
    std::array<int, 3> t = {s[0], s[1], s[2]};
    if (geom::orientation(pt(t[0]), pt(t[1]), pt(t[2])) == 0)
      throw Error(ErrorCode::ValidationError, "degenerate triangle");
    tris.push_back(t);
  }
  auto edges_of = [](const std::array<int, 3>& t) {
    return std::array<std::pair<int, int>, 3>{
        std::make_pair(t[0], t[1]), std::make_pair(t[1], t[2]),
        std::make_pair(t[0], t[2])};
  };
  for (std::size_t i = 0; i < tris.size(); ++i) {
    for (std::size_t j = i + 1; j < tris.size(); ++j) {
      const auto &ti = tris[i], &tj = tris[j];
      int shared = 0;
      for (int a : ti)
        for (int b : tj)
          if (a == b) ++shared;
      if (shared == 3)
        throw Error(ErrorCode::ValidationError, "duplicate simplex");

      // Proper or collinear-overlap edge crossings.
      for (auto [a, b] : edges_of(ti)) {
        for (auto [c, d] : edges_of(tj)) {
          if ((a == c && b == d) || (a == d && b == c)) continue;
          int o1 = geom::orientation(pt(a), pt(b), pt(c));
          int o2 = geom::orientation(pt(a), pt(b), pt(d));
          int o3 = geom::orientation(pt(c), pt(d), pt(a));
          int o4 = geom::orientation(pt(c), pt(d), pt(b));
          if (o1 * o2 < 0 && o3 * o4 < 0)
            throw Error(ErrorCode::ValidationError,
                        "edges cross between simplices " + std::to_string(i) +
                            " and " + std::to_string(j));
          if (o1 == 0 && o2 == 0) {
            // Collinear: overlapping interiors are invalid.
            int inside = 0;
            if (c != a && c != b && strictly_between(pt(a), pt(b), pt(c)))
              ++inside;
            if (d != a && d != b && strictly_between(pt(a), pt(b), pt(d)))
              ++inside;
            if (a != c && a != d && strictly_between(pt(c), pt(d), pt(a)))
              ++inside;
            if (b != c && b != d && strictly_between(pt(c), pt(d), pt(b)))
              ++inside;
            if (inside > 0)
              throw Error(ErrorCode::ValidationError,
                          "collinear overlapping edges between simplices " +
                              std::to_string(i) + " and " + std::to_string(j));
          }
        }
      }
      // A vertex of one triangle inside the other, or on an edge interior
      // (T-junction).
      auto point_in = [&](int v, const std::array<int, 3>& t) {
        bool is_vert = v == t[0] || v == t[1] || v == t[2];
        if (is_vert) return;
        Vec2 q = pt(v);
        int s0 = geom::orientation(pt(t[0]), pt(t[1]), q);
        int s1 = geom::orientation(pt(t[1]), pt(t[2]), q);
        int s2 = geom::orientation(pt(t[2]), pt(t[0]), q);
        int ref = geom::orientation(pt(t[0]), pt(t[1]), pt(t[2]));
        if (ref < 0) {
          s0 = -s0;
          s1 = -s1;
          s2 = -s2;
        }
        if (s0 >= 0 && s1 >= 0 && s2 >= 0)
          throw Error(ErrorCode::ValidationError,
                      "vertex " + std::to_string(v) +
                          " lies inside or on another simplex");
      };
      for (int v : ti) point_in(v, tj);
      for (int v : tj) point_in(v, ti);
    }
  }
}

void validate_sampled(const SimplicialPartition& p) {
  const int d = p.dim;
  for (std::size_t i = 0; i < p.simplices.size(); ++i) {
    Point centroid(d, 0.0);
    for (int v : p.simplices[i])
      for (int k = 0; k < d; ++k) centroid[k] += p.vertices[v][k] / (d + 1.0);
    for (std::size_t j = 0; j < p.simplices.size(); ++j) {
      if (i == j) continue;
      auto bc = barycentric(p, static_cast<int>(j), centroid);
      bool strictly_inside = true;
      for (double c : bc)
        if (c < 1e-9) strictly_inside = false;
      if (strictly_inside)
        throw Error(ErrorCode::ValidationError,
                    "simplices " + std::to_string(i) + " and " +
                        std::to_string(j) + " overlap (sampled check)");
    }
  }
}

}  // namespace

void validate(const SimplicialPartition& p) {
  if (p.dim < 1)
    throw Error(ErrorCode::ValidationError, "dim must be >= 1");
  if (p.vertices.size() != p.values.size())
    throw Error(ErrorCode::ValidationError, "values/vertices length mismatch");
  const int n = static_cast<int>(p.vertices.size());
  for (const auto& v : p.vertices) {
    if (static_cast<int>(v.size()) != p.dim)
      throw Error(ErrorCode::ValidationError, "vertex dimension mismatch");
    for (double c : v)
      if (!std::isfinite(c))
        throw Error(ErrorCode::ValidationError, "non-finite coordinate");
  }
  std::vector<bool> referenced(n, false);
  for (const auto& s : p.simplices) {
    if (static_cast<int>(s.size()) != p.dim + 1)
      throw Error(ErrorCode::ValidationError,
                  "simplex must have dim+1 vertices");
    std::set<int> uniq(s.begin(), s.end());
    if (static_cast<int>(uniq.size()) != p.dim + 1)
      throw Error(ErrorCode::ValidationError, "repeated vertex in simplex");
    for (int v : s) {
      if (v < 0 || v >= n)
        throw Error(ErrorCode::ValidationError, "vertex id out of range");
      referenced[v] = true;
    }
  }
  for (int v = 0; v < n; ++v)
    if (!referenced[v])
      throw Error(ErrorCode::ValidationError,
                  "vertex " + std::to_string(v) + " is not referenced");
  if (p.simplices.empty())
    throw Error(ErrorCode::ValidationError, "empty simplex list");

  if (p.dim == 2)
    validate_2d(p);
  else if (p.dim >= 3)
    validate_sampled(p);
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string mesh_to_json(const SimplicialPartition& p) {
  // Hand-rolled writer so numeric fields keep 17 significant digits.
  std::ostringstream os;
  os << "{\n  \"dim\": " << p.dim << ",\n  \"vertices\": [\n";
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    os << "    {\"x\": [";
    for (std::size_t k = 0; k < p.vertices[i].size(); ++k) {
      if (k) os << ", ";
      os << fmt17(p.vertices[i][k]);
    }
    os << "], \"f\": " << fmt17(p.values[i]) << "}";
    os << (i + 1 < p.vertices.size() ? ",\n" : "\n");
  }
  os << "  ],\n  \"simplices\": [\n";
  for (std::size_t i = 0; i < p.simplices.size(); ++i) {
    os << "    [";
    for (std::size_t k = 0; k < p.simplices[i].size(); ++k) {
      if (k) os << ", ";
      os << p.simplices[i][k];
    }
    os << "]" << (i + 1 < p.simplices.size() ? ",\n" : "\n");
  }
  os << "  ],\n  \"provenance\": " << json(p.provenance).dump() << "\n}\n";
  return os.str();
}

SimplicialPartition parse_mesh_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("mesh JSON: ") + e.what());
  }
  SimplicialPartition p;
  try {
    p.dim = j.at("dim").get<int>();
    for (const auto& v : j.at("vertices")) {
      p.vertices.push_back(v.at("x").get<Point>());
      p.values.push_back(v.at("f").get<double>());
    }
    p.simplices = j.at("simplices").get<std::vector<std::vector<int>>>();
    if (j.contains("provenance")) p.provenance = j["provenance"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("mesh JSON: ") + e.what());
  }
  for (auto& s : p.simplices) std::sort(s.begin(), s.end());
  validate(p);
  return p;
}

SimplicialPartition load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open mesh file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mesh_json(ss.str());
}

void save_mesh(const SimplicialPartition& p, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write mesh file: " + path);
  out << mesh_to_json(p);
}

SimplicialPartition grid_triangulation(int nx, int ny, Vec2 lo, Vec2 hi,
                                       DiagRule rule, std::uint64_t seed) {
  if (nx < 1 || ny < 1)
    throw Error(ErrorCode::ValidationError, "grid needs nx, ny >= 1");
  SimplicialPartition p;
  p.dim = 2;
  p.provenance = "grid " + std::to_string(nx) + "x" + std::to_string(ny);
  for (int iy = 0; iy <= ny; ++iy)
    for (int ix = 0; ix <= nx; ++ix) {
      double x = lo.x + (hi.x - lo.x) * ix / nx;
      double y = lo.y + (hi.y - lo.y) * iy / ny;
      p.vertices.push_back({x, y});
      p.values.push_back(0.0);
    }
  std::mt19937_64 rng(seed);
  auto id = [&](int ix, int iy) { return iy * (nx + 1) + ix; };
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      int bl = id(ix, iy), br = id(ix + 1, iy);
      int tl = id(ix, iy + 1), tr = id(ix + 1, iy + 1);
      bool main_diag = rule == DiagRule::Fixed ? true : (rng() & 1) != 0;
      if (main_diag) {  // bl-tr diagonal
        p.simplices.push_back({bl, br, tr});
        p.simplices.push_back({bl, tr, tl});
      } else {  // br-tl diagonal
        p.simplices.push_back({bl, br, tl});
        p.simplices.push_back({br, tr, tl});
      }
    }
  for (auto& s : p.simplices) std::sort(s.begin(), s.end());
  return p;
}

SimplicialPartition from_triangulation(const geom::Triangulation2D& t,
                                       const std::vector<double>& values) {
  if (values.size() != t.points().size())
    throw Error(ErrorCode::ValidationError, "values length mismatch");
  SimplicialPartition p;
  p.dim = 2;
  for (const auto& q : t.points()) p.vertices.push_back({q.x, q.y});
  p.values = values;
  for (const auto& tri : t.triangles())
    p.simplices.push_back({tri[0], tri[1], tri[2]});
  return p;
}

std::vector<double> barycentric(const SimplicialPartition& p, int simplex,
                                const Point& x) {
  const int d = p.dim;
  const auto& ids = p.simplices[simplex];
  Eigen::MatrixXd A(d + 1, d + 1);
  Eigen::VectorXd b(d + 1);
  for (int j = 0; j <= d; ++j) {
    for (int k = 0; k < d; ++k) A(k, j) = p.vertices[ids[j]][k];
    A(d, j) = 1.0;
  }
  for (int k = 0; k < d; ++k) b(k) = x[k];
  b(d) = 1.0;
  Eigen::VectorXd lam = A.fullPivLu().solve(b);
  return {lam.data(), lam.data() + d + 1};
}

std::vector<double> simplex_volume_all(const SimplicialPartition& p) {
  std::vector<double> out;
  out.reserve(p.simplices.size());
  for (const auto& s : p.simplices) {
    std::vector<std::vector<double>> verts;
    for (int v : s) verts.push_back(p.vertices[v]);
    out.push_back(geom::simplex_metrics(verts).volume);
  }
  return out;
}

}  // namespace pwlmilp::mesh
