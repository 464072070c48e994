#include "pwlmilp/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "pwlmilp/sampling.hpp"

namespace pwlmilp::fitting {

using geom::Vec2;

void FitConfig::check() const {
  if (!(eps > 0.0))
    throw Error(ErrorCode::DegenerateInput, "eps must be positive");
  if (!(alpha_lb > 0.0 && alpha_lb < 20.0))
    throw Error(ErrorCode::DegenerateInput, "alpha_lb must be in (0, 20)");
  if (!(theta > 0.0 && theta <= 0.5))
    throw Error(ErrorCode::DegenerateInput, "theta must be in (0, 0.5]");
}

GradientInfo interpolant_gradient(const std::vector<mesh::Point>& verts,
                                  const std::vector<double>& values) {
  const int d = static_cast<int>(verts.size()) - 1;
  if (d < 1 || values.size() != verts.size())
    throw Error(ErrorCode::Degenerate, "need d+1 vertices with values");
  Eigen::MatrixXd A(d + 1, d + 1);
  Eigen::VectorXd b(d + 1);
  for (int i = 0; i <= d; ++i) {
    for (int k = 0; k < d; ++k) A(i, k) = verts[i][k];
    A(i, d) = 1.0;
    b(i) = values[i];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw Error(ErrorCode::Degenerate, "simplex is degenerate");
  Eigen::VectorXd sol = lu.solve(b);
  GradientInfo g;
  g.grad.assign(sol.data(), sol.data() + d);
  g.norm = sol.head(d).norm();
  return g;
}

GradientInfo interpolant_gradient(const mesh::SimplicialPartition& p,
                                  int simplex) {
  std::vector<mesh::Point> verts;
  std::vector<double> vals;
  for (int v : p.simplices[simplex]) {
    verts.push_back(p.vertices[v]);
    vals.push_back(p.values[v]);
  }
  return interpolant_gradient(verts, vals);
}

LipschitzBounds lipschitz_bound_check(const mesh::SimplicialPartition& p,
                                      int simplex, double L) {
  std::vector<std::vector<double>> verts;
  for (int v : p.simplices[simplex]) verts.push_back(p.vertices[v]);
  auto m = geom::simplex_metrics(verts);
  LipschitzBounds out;
  out.bound_general = L * m.ell_max / m.delta_min;
  out.bound_2d = p.dim == 2
                     ? L / std::sin(m.alpha_min * M_PI / 180.0)
                     : std::numeric_limits<double>::quiet_NaN();
  return out;
}

// ---------------------------------------------------------------------------
// PwlFunction

PwlFunction::PwlFunction(mesh::SimplicialPartition p) : part_(std::move(p)) {
  if (part_.dim != 2)
    throw Error(ErrorCode::ValidationError, "PwlFunction needs d = 2");
  lo_ = {part_.vertices[0][0], part_.vertices[0][1]};
  hi_ = lo_;
  for (const auto& v : part_.vertices) {
    lo_.x = std::min(lo_.x, v[0]);
    lo_.y = std::min(lo_.y, v[1]);
    hi_.x = std::max(hi_.x, v[0]);
    hi_.y = std::max(hi_.y, v[1]);
  }
  int m = static_cast<int>(part_.simplices.size());
  int res = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(m))));
  nx_ = ny_ = res;
  buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  auto bx = [&](double x) {
    int i = static_cast<int>((x - lo_.x) / (hi_.x - lo_.x) * nx_);
    return std::clamp(i, 0, nx_ - 1);
  };
  auto by = [&](double y) {
    int i = static_cast<int>((y - lo_.y) / (hi_.y - lo_.y) * ny_);
    return std::clamp(i, 0, ny_ - 1);
  };
  for (int t = 0; t < m; ++t) {
    const auto& s = part_.simplices[t];
    double xl = part_.vertices[s[0]][0], xh = xl;
    double yl = part_.vertices[s[0]][1], yh = yl;
    for (int v : s) {
      xl = std::min(xl, part_.vertices[v][0]);
      xh = std::max(xh, part_.vertices[v][0]);
      yl = std::min(yl, part_.vertices[v][1]);
      yh = std::max(yh, part_.vertices[v][1]);
    }
    for (int i = bx(xl); i <= bx(xh); ++i)
      for (int j = by(yl); j <= by(yh); ++j)
        buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(t);
  }
}

int PwlFunction::locate(double x, double y) const {
  auto in_tri = [&](int t, double tol) {
    auto bc = mesh::barycentric(part_, t, {x, y});
    return bc[0] >= -tol && bc[1] >= -tol && bc[2] >= -tol;
  };
  int i = std::clamp(static_cast<int>((x - lo_.x) / (hi_.x - lo_.x) * nx_), 0,
                     nx_ - 1);
  int j = std::clamp(static_cast<int>((y - lo_.y) / (hi_.y - lo_.y) * ny_), 0,
                     ny_ - 1);
  const auto& cand = buckets_[static_cast<std::size_t>(j) * nx_ + i];
  for (int t : cand)
    if (in_tri(t, 1e-12)) return t;
  for (int t : cand)
    if (in_tri(t, 1e-9)) return t;
  // Roundoff pushed the point just outside every bucket candidate.
  for (int t = 0; t < static_cast<int>(part_.simplices.size()); ++t)
    if (in_tri(t, 1e-9)) return t;
  return -1;
}

double PwlFunction::operator()(double x, double y) const {
  int t = locate(x, y);
  if (t < 0)
    throw Error(ErrorCode::DomainMismatch, "point outside the partition");
  auto bc = mesh::barycentric(part_, t, {x, y});
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += bc[k] * part_.values[part_.simplices[t][k]];
  return s;
}

// ---------------------------------------------------------------------------
// Error estimation

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t triangle_seed(std::uint64_t base, const std::array<int, 3>& key) {
  std::uint64_t h = mix64(base);
  for (int v : key) h = mix64(h ^ static_cast<std::uint64_t>(v));
  return h;
}

}  // namespace

ErrorEstimator::ErrorEstimator(const fitfn::TargetFunction& f,
                               const FitConfig& cfg)
    : f_(f), cfg_(cfg) {
  cfg_.check();
}

const ErrorEstimator::TriangleStats& ErrorEstimator::cached(
    const std::array<int, 3>& key) const {
  return cache_.at(key);
}

ErrorEstimator::TriangleStats ErrorEstimator::sample_triangle(
    const std::vector<Vec2>& points, const std::vector<double>& values,
    const std::array<int, 3>& key, const std::set<int>* skip) const {
  TriangleStats ts;
  std::vector<mesh::Point> verts;
  std::vector<double> vals;
  for (int v : key) {
    verts.push_back({points[v].x, points[v].y});
    vals.push_back(values[v]);
  }
  auto gi = interpolant_gradient(verts, vals);
  ts.lhat = gi.norm;
  ts.r_cover = cfg_.theta * cfg_.eps / (f_.lipschitz + ts.lhat);
  // Affine interpolant of this triangle, evaluated directly.
  const double gx = gi.grad[0], gy = gi.grad[1];
  const double b = vals[0] - gx * verts[0][0] - gy * verts[0][1];
  ts.max_err = -1.0;
  int index = 0;
  sampling::mps_sample_visit(
      verts, ts.r_cover, ts.r_cover / 2.0, triangle_seed(cfg_.seed, key),
      [&](const double* p) {
        int si = index++;
        if (skip && skip->count(si)) return;
        double fhat = gx * p[0] + gy * p[1] + b;
        double err = std::abs(f_.eval(p[0], p[1]) - fhat);
        if (err > ts.max_err) {
          ts.max_err = err;
          ts.argmax = {p[0], p[1]};
          ts.argmax_index = si;
        }
      });
  ts.sample_count = static_cast<std::size_t>(index);
  return ts;
}

ErrorEstimator::TriangleStats ErrorEstimator::best_excluding(
    const std::vector<Vec2>& points, const std::vector<double>& values,
    const std::array<int, 3>& key, const std::set<int>& skip) const {
  return sample_triangle(points, values, key, &skip);
}

ErrorEstimate ErrorEstimator::run(
    const std::vector<Vec2>& points, const std::vector<double>& values,
    const std::vector<std::array<int, 3>>& triangles) {
  ErrorEstimate best;
  best.eps_hat_max = -1.0;
  for (std::size_t ti = 0; ti < triangles.size(); ++ti) {
    std::array<int, 3> key = triangles[ti];
    std::sort(key.begin(), key.end());
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, sample_triangle(points, values, key, nullptr))
               .first;
    const auto& ts = it->second;
    if (ts.max_err > best.eps_hat_max) {
      best.eps_hat_max = ts.max_err;
      best.p_max = ts.argmax;
      best.argmax_simplex = static_cast<int>(ti);
      best.argmax_sample = ts.argmax_index;
    }
  }
  if (best.eps_hat_max < 0.0) best.eps_hat_max = 0.0;
  return best;
}

ErrorEstimate estimate_error(const mesh::SimplicialPartition& p,
                             const fitfn::TargetFunction& f,
                             const FitConfig& cfg) {
  if (p.dim != 2)
    throw Error(ErrorCode::ValidationError, "estimate_error needs d = 2");
  std::vector<Vec2> pts;
  for (const auto& v : p.vertices) pts.push_back({v[0], v[1]});
  std::vector<std::array<int, 3>> tris;
  for (const auto& s : p.simplices) tris.push_back({s[0], s[1], s[2]});
  ErrorEstimator est(f, cfg);
  return est.run(pts, p.values, tris);
}

// ---------------------------------------------------------------------------
// The fitting loop

std::pair<mesh::SimplicialPartition, FitReport> fit(
    const fitfn::TargetFunction& f, const FitConfig& cfg) {
  cfg.check();
  const Vec2 lo = f.lo, hi = f.hi;
  if (!(hi.x > lo.x && hi.y > lo.y))
    throw Error(ErrorCode::DegenerateInput, "empty domain");
  const double diag = geom::dist(lo, hi);
  const double merge_tol = 1e-12 * diag;

  std::vector<Vec2> points = {
      {lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};
  std::vector<double> values;
  for (const auto& p : points) values.push_back(f.eval(p.x, p.y));

  auto tri = geom::Triangulation2D::delaunay(points);
  ErrorEstimator estimator(f, cfg);
  FitReport report;
  std::map<std::array<int, 3>, std::set<int>> excluded;

  std::size_t iter = 0;
  while (true) {
    tri.refine(cfg.alpha_lb);
    while (values.size() < tri.points().size()) {
      Vec2 p = tri.points()[values.size()];
      values.push_back(f.eval(p.x, p.y));
    }
    points = tri.points();

    auto triangles = tri.triangles();
    auto est = estimator.run(points, values, triangles);

    IterationRecord rec;
    rec.iteration = static_cast<int>(iter);
    rec.num_points = static_cast<int>(points.size());
    rec.num_triangles = static_cast<int>(triangles.size());
    rec.eps_hat_max = est.eps_hat_max;

    if (est.eps_hat_max <= (1.0 - cfg.theta) * cfg.eps) {
      report.iterations.push_back(rec);
      report.final_eps_hat_max = est.eps_hat_max;
      report.certified_bound = est.eps_hat_max + cfg.theta * cfg.eps;
      report.converged = true;
      break;
    }

    // Pick the worst sample point; fall back to the next-worst when it
    // collides with an existing vertex (floating-point near-duplicate).
    Vec2 pmax{};
    bool have = false;
    while (!have) {
      double best_err = -1.0;
      std::array<int, 3> best_key{};
      int best_index = -1;
      Vec2 best_pt{};
      for (const auto& t : triangles) {
        std::array<int, 3> key = t;
        std::sort(key.begin(), key.end());
        auto ex = excluded.find(key);
        ErrorEstimator::TriangleStats ts =
            ex == excluded.end()
                ? estimator.cached(key)
                : estimator.best_excluding(points, values, key, ex->second);
        if (ts.argmax_index >= 0 && ts.max_err > best_err) {
          best_err = ts.max_err;
          best_key = key;
          best_index = ts.argmax_index;
          best_pt = ts.argmax;
        }
      }
      if (best_index < 0) break;  // every sample excluded
      bool dup = false;
      for (const auto& q : points)
        if (geom::dist(q, best_pt) <= merge_tol) {
          dup = true;
          break;
        }
      if (dup) {
        excluded[best_key].insert(best_index);
        continue;
      }
      pmax = best_pt;
      have = true;
    }
    if (!have) {
      // Every candidate collides; cannot make progress.
      report.iterations.push_back(rec);
      report.final_eps_hat_max = est.eps_hat_max;
      report.certified_bound = est.eps_hat_max + cfg.theta * cfg.eps;
      report.converged = false;
      break;
    }
    rec.inserted_point = pmax;
    report.iterations.push_back(rec);

    if (++iter > cfg.max_iter) {
      report.final_eps_hat_max = est.eps_hat_max;
      report.certified_bound = est.eps_hat_max + cfg.theta * cfg.eps;
      report.converged = false;
      break;
    }
    points.push_back(pmax);
    values.push_back(f.eval(pmax.x, pmax.y));
    tri = geom::Triangulation2D::delaunay(points);
  }

  auto part = mesh::from_triangulation(tri, values);
  part.provenance = "fit " + f.name + " eps=" + std::to_string(cfg.eps) +
                    " seed=" + std::to_string(cfg.seed);
  return {std::move(part), std::move(report)};
}

double audit_max_error(const PwlFunction& fhat, const fitfn::TargetFunction& f,
                       int grid_n) {
  const auto& p = fhat.partition();
  double xl = p.vertices[0][0], xh = xl, yl = p.vertices[0][1], yh = yl;
  for (const auto& v : p.vertices) {
    xl = std::min(xl, v[0]);
    xh = std::max(xh, v[0]);
    yl = std::min(yl, v[1]);
    yh = std::max(yh, v[1]);
  }
  double worst = 0.0;
  for (int i = 0; i <= grid_n; ++i) {
    double x = xl + (xh - xl) * i / grid_n;
    for (int j = 0; j <= grid_n; ++j) {
      double y = yl + (yh - yl) * j / grid_n;
      worst = std::max(worst, std::abs(f.eval(x, y) - fhat(x, y)));
    }
  }
  return worst;
}

double audit_step(const mesh::SimplicialPartition& p,
                  const fitfn::TargetFunction& f, const FitConfig& cfg) {
  double rmin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < p.simplices.size(); ++t) {
    auto gi = interpolant_gradient(p, static_cast<int>(t));
    rmin = std::min(rmin, cfg.theta * cfg.eps / (f.lipschitz + gi.norm));
  }
  return rmin / 5.0;
}

void write_report_csv(const FitReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << "iteration,n_points,n_triangles,eps_hat_max\n";
  char buf[64];
  for (const auto& it : r.iterations) {
    std::snprintf(buf, sizeof(buf), "%.17g", it.eps_hat_max);
    out << it.iteration << ',' << it.num_points << ',' << it.num_triangles
        << ',' << buf << '\n';
  }
}

void write_convergence_svg(const FitReport& r, double eps,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  const int W = 720, H = 480, ml = 70, mr = 20, mt = 20, mb = 50;
  double ymin = eps, ymax = eps;
  for (const auto& it : r.iterations) {
    if (it.eps_hat_max > 0.0) {
      ymin = std::min(ymin, it.eps_hat_max);
      ymax = std::max(ymax, it.eps_hat_max);
    }
  }
  ymin = std::max(ymin / 2.0, 1e-12);
  ymax *= 2.0;
  double lmin = std::log10(ymin), lmax = std::log10(ymax);
  int n = std::max<int>(1, static_cast<int>(r.iterations.size()) - 1);
  auto X = [&](double i) { return ml + (W - ml - mr) * i / n; };
  auto Y = [&](double v) {
    double t = (std::log10(std::max(v, ymin)) - lmin) / (lmax - lmin);
    return H - mb - (H - mt - mb) * t;
  };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << Y(eps) << "\" x2=\"" << W - mr
      << "\" y2=\"" << Y(eps)
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  out << "<text x=\"" << W - mr - 4 << "\" y=\"" << Y(eps) - 4
      << "\" text-anchor=\"end\" font-size=\"12\">target " << eps
      << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"crimson\" stroke-width=\"1.5\" "
         "points=\"";
  for (std::size_t i = 0; i < r.iterations.size(); ++i)
    out << X(static_cast<double>(i)) << ',' << Y(r.iterations[i].eps_hat_max)
        << ' ';
  out << "\"/>\n";
  out << "<text x=\"" << (W + ml) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">iteration</text>\n";
  out << "<text x=\"16\" y=\"" << (H - mb + mt) / 2
      << "\" font-size=\"13\" transform=\"rotate(-90 16 " << (H - mb + mt) / 2
      << ")\" text-anchor=\"middle\">max sampled error</text>\n";
  out << "</svg>\n";
}

}  // namespace pwlmilp::fitting
