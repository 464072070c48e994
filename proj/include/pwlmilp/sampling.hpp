#ifndef PWLMILP_SAMPLING_HPP
#define PWLMILP_SAMPLING_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "pwlmilp/mesh.hpp"

namespace pwlmilp::sampling {

struct SampleSet {
  int simplex_id = -1;
  double r_cover = 0.0;
  double r_min = 0.0;
  std::vector<mesh::Point> points;
};

/// Maximal Poisson-disk sampling of a d-simplex (d <= 4): the produced
/// points cover the simplex with radius r_cover and are pairwise more
/// than r_min apart. Deterministic for a fixed seed.
///
/// A background grid with cell diameter <= r_cover/sqrt(d) is laid over
/// the simplex; every active cell draws a candidate by rejection
/// sampling (30 attempts), accepted candidates retire their cell, and
/// cells that stay uncovered are split into 2^d subcells for the next
/// round.
SampleSet mps_sample(const std::vector<mesh::Point>& simplex_vertices,
                     double r_cover, double r_min, std::uint64_t seed,
                     int simplex_id = -1);

/// Streaming variant: samples are handed to the visitor as (coords, d)
/// and not stored. Returns the number of samples generated.
std::size_t mps_sample_visit(const std::vector<mesh::Point>& simplex_vertices,
                             double r_cover, double r_min, std::uint64_t seed,
                             const std::function<void(const double*)>& visit);

}  // namespace pwlmilp::sampling

#endif  // PWLMILP_SAMPLING_HPP
