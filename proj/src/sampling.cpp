#include "pwlmilp/sampling.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>
#include <unordered_map>

namespace pwlmilp::sampling {

namespace {

constexpr int kRejectionAttempts = 30;
constexpr int kMaxRounds = 80;  // cells halve per round; defensive only
constexpr int kMaxDim = 4;

struct Cell {
  std::array<double, kMaxDim> lo;
  double size;
};

// Uniform hash grid over accepted samples for separation and coverage
// queries.
class SampleGrid {
 public:
  SampleGrid(int d, double cell) : d_(d), cell_(cell) {}

  void add(const std::array<double, kMaxDim>& p) {
    int id = static_cast<int>(pts_.size());
    pts_.push_back(p);
    map_[key(p)].push_back(id);
  }

  bool any_within(const std::array<double, kMaxDim>& p, double r) const {
    return scan(p, r, [&](const std::array<double, kMaxDim>& q) {
      return dist2(p, q) <= r * r;
    });
  }

  /// True iff the whole cell lies in one sample's ball of radius r.
  bool cell_covered(const Cell& c, double r) const {
    std::array<double, kMaxDim> center{};
    double half_diag2 = 0.0;
    for (int k = 0; k < d_; ++k) {
      center[k] = c.lo[k] + c.size / 2.0;
      half_diag2 += (c.size / 2.0) * (c.size / 2.0);
    }
    double reach = r + std::sqrt(half_diag2);
    return scan(center, reach, [&](const std::array<double, kMaxDim>& q) {
      double far2 = 0.0;
      for (int k = 0; k < d_; ++k) {
        double m = std::max(std::abs(q[k] - c.lo[k]),
                            std::abs(q[k] - (c.lo[k] + c.size)));
        far2 += m * m;
      }
      return far2 <= r * r;
    });
  }

  std::size_t size() const { return pts_.size(); }

 private:
  template <class Pred>
  bool scan(const std::array<double, kMaxDim>& p, double r,
            const Pred& pred) const {
    int ring = static_cast<int>(std::ceil(r / cell_));
    std::array<long long, kMaxDim> base{};
    for (int k = 0; k < d_; ++k)
      base[k] = static_cast<long long>(std::floor(p[k] / cell_));
    std::array<int, kMaxDim> off{};
    for (int k = 0; k < d_; ++k) off[k] = -ring;
    while (true) {
      long long h = 14695981039346656037ull;
      for (int k = 0; k < d_; ++k)
        h = (h ^ (base[k] + off[k])) * 1099511628211ull;
      auto it = map_.find(h);
      if (it != map_.end())
        for (int id : it->second)
          if (pred(pts_[id])) return true;
      int k = 0;
      while (k < d_ && ++off[k] > ring) off[k++] = -ring;
      if (k == d_) break;
    }
    return false;
  }

  long long key(const std::array<double, kMaxDim>& p) const {
    long long h = 14695981039346656037ull;
    for (int k = 0; k < d_; ++k)
      h = (h ^ static_cast<long long>(std::floor(p[k] / cell_))) *
          1099511628211ull;
    return h;
  }

  double dist2(const std::array<double, kMaxDim>& a,
               const std::array<double, kMaxDim>& b) const {
    double s = 0.0;
    for (int k = 0; k < d_; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
  }

  int d_;
  double cell_;
  std::vector<std::array<double, kMaxDim>> pts_;
  std::unordered_map<long long, std::vector<int>> map_;
};

}  // namespace

std::size_t mps_sample_visit(
    const std::vector<mesh::Point>& verts, double r_cover, double r_min,
    std::uint64_t seed, const std::function<void(const double*)>& visit) {
  const int d = static_cast<int>(verts.size()) - 1;
  if (d < 1 || d > kMaxDim || r_cover <= 0.0 || r_min >= r_cover ||
      r_min < 0.0)
    throw Error(ErrorCode::DegenerateInput,
                "mps_sample needs 1 <= d <= 4 and 0 <= r_min < r_cover");

  // Barycentric functionals lam_i(x) = B(i, 0..d-1) . x + B(i, d).
  Eigen::MatrixXd A(d + 1, d + 1);
  for (int j = 0; j <= d; ++j) {
    for (int k = 0; k < d; ++k) A(k, j) = verts[j][k];
    A(d, j) = 1.0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw Error(ErrorCode::Degenerate, "degenerate simplex");
  Eigen::MatrixXd B = lu.inverse();
  auto inside = [&](const std::array<double, kMaxDim>& x) {
    for (int i = 0; i <= d; ++i) {
      double s = B(i, d);
      for (int k = 0; k < d; ++k) s += B(i, k) * x[k];
      if (s < 0.0) return false;
    }
    return true;
  };
  auto may_intersect = [&](const Cell& c) {
    // max of each barycentric functional over the box must be >= 0.
    for (int i = 0; i <= d; ++i) {
      double s = B(i, d);
      for (int k = 0; k < d; ++k) {
        double g = B(i, k);
        s += g * c.lo[k] + (g > 0.0 ? g * c.size : 0.0);
      }
      if (s < 0.0) return false;
    }
    return true;
  };

  std::array<double, kMaxDim> lo{}, hi{};
  for (int k = 0; k < d; ++k) lo[k] = hi[k] = verts[0][k];
  for (const auto& v : verts)
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }

  // Cell side s gives diameter s*sqrt(d) <= r_cover/sqrt(d).
  const double cell_size = r_cover / d;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  SampleGrid grid(d, std::max(r_min, r_cover / 4.0));
  std::size_t count = 0;

  auto try_cell = [&](const Cell& c) {
    // Rejection-sample one candidate in cell ∩ simplex.
    std::array<double, kMaxDim> p{};
    for (int att = 0; att < kRejectionAttempts; ++att) {
      for (int k = 0; k < d; ++k) p[k] = c.lo[k] + c.size * uni(rng);
      if (!inside(p)) continue;
      if (r_min > 0.0 && grid.any_within(p, r_min)) return false;
      grid.add(p);
      visit(p.data());
      ++count;
      return true;
    }
    return false;
  };

  // Round 0 enumerates grid cells lazily; survivors are kept.
  std::vector<Cell> active;
  {
    std::array<int, kMaxDim> counts{}, idx{};
    for (int k = 0; k < d; ++k)
      counts[k] = std::max(
          1, static_cast<int>(std::ceil((hi[k] - lo[k]) / cell_size)));
    while (true) {
      Cell c;
      c.size = cell_size;
      for (int k = 0; k < d; ++k) c.lo[k] = lo[k] + idx[k] * cell_size;
      if (may_intersect(c) && !try_cell(c) && !grid.cell_covered(c, r_cover))
        active.push_back(c);
      int k = 0;
      while (k < d && ++idx[k] == counts[k]) idx[k++] = 0;
      if (k == d) break;
    }
  }

  for (int round = 1; round <= kMaxRounds && !active.empty(); ++round) {
    std::vector<Cell> next;
    for (const Cell& c : active) {
      std::array<int, kMaxDim> bits{};
      while (true) {
        Cell sub;
        sub.size = c.size / 2.0;
        for (int k = 0; k < d; ++k) sub.lo[k] = c.lo[k] + bits[k] * sub.size;
        if (may_intersect(sub) && !grid.cell_covered(sub, r_cover) &&
            !try_cell(sub) && !grid.cell_covered(sub, r_cover))
          next.push_back(sub);
        int k = 0;
        while (k < d && ++bits[k] == 2) bits[k++] = 0;
        if (k == d) break;
      }
    }
    active = std::move(next);
  }
  if (!active.empty())
    throw Error(ErrorCode::SizeLimit, "mps_sample hit the defensive round cap");
  return count;
}

SampleSet mps_sample(const std::vector<mesh::Point>& verts, double r_cover,
                     double r_min, std::uint64_t seed, int simplex_id) {
  const int d = static_cast<int>(verts.size()) - 1;
  SampleSet out;
  out.simplex_id = simplex_id;
  out.r_cover = r_cover;
  out.r_min = r_min;
  mps_sample_visit(verts, r_cover, r_min, seed, [&](const double* p) {
    out.points.emplace_back(p, p + d);
  });
  return out;
}

}  // namespace pwlmilp::sampling
