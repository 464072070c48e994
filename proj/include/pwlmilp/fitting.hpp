#ifndef PWLMILP_FITTING_HPP
#define PWLMILP_FITTING_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pwlmilp/functions.hpp"
#include "pwlmilp/geometry.hpp"
#include "pwlmilp/mesh.hpp"

namespace pwlmilp::fitting {

struct FitConfig {
  double eps = 0.1;
  double alpha_lb = 18.0;  // degrees, must stay below 20
  double theta = 0.5;      // r_T = theta*eps/(L+Lhat_T); stop at (1-theta)*eps
  std::uint64_t seed = 0;
  std::size_t max_iter = 20000;  // inserted error points

  void check() const;
};

struct IterationRecord {
  int iteration = 0;
  int num_points = 0;
  int num_triangles = 0;
  double eps_hat_max = 0.0;
  std::optional<geom::Vec2> inserted_point;
};

struct FitReport {
  std::vector<IterationRecord> iterations;
  double final_eps_hat_max = 0.0;
  double certified_bound = 0.0;  // eps_hat_max + theta*eps
  bool converged = false;
};

struct GradientInfo {
  std::vector<double> grad;
  double norm = 0.0;
};

/// Gradient of the affine interpolant through the simplex vertices and
/// their values (the (d+1)x(d+1) system f(v_i) = g.v_i + b).
GradientInfo interpolant_gradient(const std::vector<mesh::Point>& verts,
                                  const std::vector<double>& values);
GradientInfo interpolant_gradient(const mesh::SimplicialPartition& p,
                                  int simplex);

struct LipschitzBounds {
  double bound_general = 0.0;  // L * ell_max / delta_min
  double bound_2d = 0.0;       // L / sin(alpha_min), d == 2 only
};
LipschitzBounds lipschitz_bound_check(const mesh::SimplicialPartition& p,
                                      int simplex, double L);

/// Piecewise-linear interpolant over a 2-D partition with a bucket-grid
/// point locator.
class PwlFunction {
 public:
  explicit PwlFunction(mesh::SimplicialPartition p);
  double operator()(double x, double y) const;
  /// Simplex containing (x, y), or -1.
  int locate(double x, double y) const;
  const mesh::SimplicialPartition& partition() const { return part_; }

 private:
  mesh::SimplicialPartition part_;
  geom::Vec2 lo_, hi_;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> buckets_;
};

struct ErrorEstimate {
  double eps_hat_max = 0.0;
  geom::Vec2 p_max;
  int argmax_simplex = -1;
  int argmax_sample = -1;
};

/// Per-simplex sampling error estimator with a cache keyed by vertex
/// triples. Sampling is a pure function of (key, seed), so a triangle
/// that survives re-triangulation reuses its cached statistics and
/// incremental estimation equals a full pass bit-exactly.
class ErrorEstimator {
 public:
  ErrorEstimator(const fitfn::TargetFunction& f, const FitConfig& cfg);

  struct TriangleStats {
    double lhat = 0.0;
    double r_cover = 0.0;
    double max_err = 0.0;
    geom::Vec2 argmax;
    int argmax_index = -1;  // within the deterministic sample stream
    std::size_t sample_count = 0;
  };

  ErrorEstimate run(const std::vector<geom::Vec2>& points,
                    const std::vector<double>& values,
                    const std::vector<std::array<int, 3>>& triangles);

  const TriangleStats& cached(const std::array<int, 3>& key) const;
  std::size_t cache_size() const { return cache_.size(); }

  /// Best sample of one triangle while skipping the given stream
  /// indices; replays the deterministic sample stream.
  TriangleStats best_excluding(const std::vector<geom::Vec2>& points,
                               const std::vector<double>& values,
                               const std::array<int, 3>& key,
                               const std::set<int>& skip) const;

 private:
  TriangleStats sample_triangle(const std::vector<geom::Vec2>& points,
                                const std::vector<double>& values,
                                const std::array<int, 3>& key,
                                const std::set<int>* skip) const;

  const fitfn::TargetFunction& f_;
  FitConfig cfg_;
  std::map<std::array<int, 3>, TriangleStats> cache_;
};

ErrorEstimate estimate_error(const mesh::SimplicialPartition& p,
                             const fitfn::TargetFunction& f,
                             const FitConfig& cfg);

/// Iterative fitting loop: Delaunay on the domain corners, then
/// refine-to-angle-bound, sample, and insert the worst point until the
/// sampled error drops to (1-theta)*eps.
std::pair<mesh::SimplicialPartition, FitReport> fit(
    const fitfn::TargetFunction& f, const FitConfig& cfg);

/// Max |f - fhat| over an (n+1)x(n+1) grid on the domain.
double audit_max_error(const PwlFunction& fhat, const fitfn::TargetFunction& f,
                       int grid_n);

/// Audit step from the fitted mesh: min over simplices of r_T/5.
double audit_step(const mesh::SimplicialPartition& p,
                  const fitfn::TargetFunction& f, const FitConfig& cfg);

void write_report_csv(const FitReport& r, const std::string& path);
void write_convergence_svg(const FitReport& r, double eps,
                           const std::string& path);

}  // namespace pwlmilp::fitting

#endif  // PWLMILP_FITTING_HPP
