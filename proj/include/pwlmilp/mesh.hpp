#ifndef PWLMILP_MESH_HPP
#define PWLMILP_MESH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pwlmilp/errors.hpp"
#include "pwlmilp/geometry.hpp"

namespace pwlmilp::mesh {

using Point = std::vector<double>;

/// Simplicial partition of a bounded domain in R^d with a function value
/// attached to every vertex. This is the exchange format between the
/// fitting, conflict-analysis and model-emission stages.
struct SimplicialPartition {
  int dim = 2;
  std::vector<Point> vertices;
  std::vector<double> values;
  std::vector<std::vector<int>> simplices;  // sorted vertex ids, size dim+1
  std::string provenance;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_simplices() const { return simplices.size(); }
};

struct SetSystem {
  int num_vertices = 0;
  std::vector<std::vector<int>> sets;  // sorted, deduplicated
};

SetSystem to_set_system(const SimplicialPartition& p);

/// Structural and geometric validation. The polyhedral-partition
/// property is checked exactly for d == 2 (via robust predicates) and by
/// centroid-in-other-simplex sampling for d >= 3.
void validate(const SimplicialPartition& p);

SimplicialPartition load_mesh(const std::string& path);
void save_mesh(const SimplicialPartition& p, const std::string& path);

SimplicialPartition parse_mesh_json(const std::string& text);
std::string mesh_to_json(const SimplicialPartition& p);

enum class DiagRule { Random, Fixed };

/// Orthogonal grid triangulation: 2*nx*ny triangles on (nx+1)*(ny+1)
/// points; cell diagonals chosen per rule. Vertex values are zero.
SimplicialPartition grid_triangulation(int nx, int ny, geom::Vec2 lo,
                                       geom::Vec2 hi, DiagRule rule,
                                       std::uint64_t seed);

SimplicialPartition from_triangulation(const geom::Triangulation2D& t,
                                       const std::vector<double>& values);

/// Barycentric coordinates of x in the given simplex; size dim+1.
std::vector<double> barycentric(const SimplicialPartition& p, int simplex,
                                const Point& x);

std::vector<double> simplex_volume_all(const SimplicialPartition& p);

}  // namespace pwlmilp::mesh

#endif  // PWLMILP_MESH_HPP
