#include "pwlmilp/sths.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pwlmilp::sths {

void Scenario::check() const {
  if (periods < 1) throw Error(ErrorCode::ValidationError, "periods < 1");
  if (static_cast<int>(price.size()) != periods ||
      static_cast<int>(inflow.size()) != periods)
    throw Error(ErrorCode::ValidationError, "series length != periods");
  if (!(r_min <= r_init && r_init <= r_max))
    throw Error(ErrorCode::ValidationError, "need R_min <= r_init <= R_max");
  if (!(q_pump < 0.0))
    throw Error(ErrorCode::ValidationError, "pump flow Q- must be negative");
  if (!(q_min < q_max) || !(r_min < r_max))
    throw Error(ErrorCode::ValidationError, "empty flow or volume range");
}

double Hpf::lipschitz_normalized(double qmax, double rmin, double rmax) const {
  double head_hi = k0 + std::max(std::abs(k1) * rmax, std::abs(k1) * rmin) +
                   std::abs(k2) * std::max(rmin * rmin, rmax * rmax);
  double dq = std::abs(scale) * (head_hi + 3.0 * std::abs(rho) * qmax * qmax);
  double dr = std::abs(scale) * qmax *
              (std::abs(k1) + 2.0 * std::abs(k2) * std::max(std::abs(rmin), std::abs(rmax)));
  double gx = dq * qmax;            // after q -> q/qmax rescale
  double gy = dr * (rmax - rmin);   // after r rescale
  return std::hypot(gx, gy);
}

Scenario make_scenario(const PlantConfig& plant,
                       const std::vector<double>& price,
                       const std::vector<double>& inflow) {
  Scenario sc;
  sc.periods = static_cast<int>(price.size());
  sc.price = price;
  sc.inflow = inflow;
  sc.r_init = plant.r_init;
  sc.r_final_min = plant.r_final_min;
  sc.r_min = plant.r_min;
  sc.r_max = plant.r_max;
  sc.q_min = plant.q_min;
  sc.q_max = plant.q_max;
  sc.q_pump = plant.q_pump;
  sc.p_pump = plant.p_pump;
  sc.check();
  return sc;
}

Scenario load_scenario_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scenario: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::ParseError, "empty scenario file");
  auto strip = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  {
    std::stringstream hs(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(hs, col, ',')) cols.push_back(strip(col));
    if (cols.size() < 3 || cols[0] != "period" || cols[1] != "price" ||
        cols[2] != "inflow")
      throw Error(ErrorCode::ParseError,
                  "scenario header must be period,price,inflow");
  }
  Scenario sc;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(strip(cell));
    if (cells.size() < 3)
      throw Error(ErrorCode::ParseError,
                  "scenario line " + std::to_string(lineno) + ": need 3 columns");
    try {
      sc.price.push_back(std::stod(cells[1]));
      sc.inflow.push_back(std::stod(cells[2]));
    } catch (...) {
      throw Error(ErrorCode::ParseError,
                  "scenario line " + std::to_string(lineno) + ": bad number");
    }
  }
  sc.periods = static_cast<int>(sc.price.size());
  return sc;  // bounds arrive from the plant config; check() runs later
}

PlantConfig load_plant_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open plant config: " + path);
  PlantConfig pc;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto strip = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    std::string key = strip(line.substr(0, eq));
    std::string val = strip(line.substr(eq + 1));
    if (key.empty()) continue;
    double x;
    try {
      x = std::stod(val);
    } catch (...) {
      throw Error(ErrorCode::ParseError, "plant config line " +
                                             std::to_string(lineno) +
                                             ": bad value for " + key);
    }
    if (key == "r_init") pc.r_init = x;
    else if (key == "r_final_min") pc.r_final_min = x;
    else if (key == "r_min") pc.r_min = x;
    else if (key == "r_max") pc.r_max = x;
    else if (key == "q_min") pc.q_min = x;
    else if (key == "q_max") pc.q_max = x;
    else if (key == "q_pump") pc.q_pump = x;
    else if (key == "p_pump") pc.p_pump = x;
    else if (key == "hpf_scale") pc.hpf.scale = x;
    else if (key == "hpf_k0") pc.hpf.k0 = x;
    else if (key == "hpf_k1") pc.hpf.k1 = x;
    else if (key == "hpf_k2") pc.hpf.k2 = x;
    else if (key == "hpf_rho") pc.hpf.rho = x;
    else
      throw Error(ErrorCode::ParseError,
                  "plant config: unknown key " + key);
  }
  return pc;
}

namespace {

const double kSecondsPerPeriod = 3600.0;

std::string tname(const char* base, int t) {
  return std::string(base) + "_" + std::to_string(t);
}

}  // namespace

milp::MilpModel build_sths(const Scenario& sc,
                           const mesh::SimplicialPartition& hpf_mesh,
                           const biclique::BicliqueCover& cover,
                           const std::optional<blocking::Coloring>& coloring) {
  sc.check();
  if (hpf_mesh.dim != 2)
    throw Error(ErrorCode::DomainMismatch, "HPF mesh must be bivariate");
  double xl = hpf_mesh.vertices[0][0], xh = xl;
  double yl = hpf_mesh.vertices[0][1], yh = yl;
  for (const auto& v : hpf_mesh.vertices) {
    xl = std::min(xl, v[0]);
    xh = std::max(xh, v[0]);
    yl = std::min(yl, v[1]);
    yh = std::max(yh, v[1]);
  }
  double scale_q = std::max(std::abs(sc.q_min), std::abs(sc.q_max));
  double scale_r = std::max(std::abs(sc.r_min), std::abs(sc.r_max));
  auto close = [](double a, double b, double s) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, s);
  };
  if (!close(xl, sc.q_min, scale_q) || !close(xh, sc.q_max, scale_q) ||
      !close(yl, sc.r_min, scale_r) || !close(yh, sc.r_max, scale_r))
    throw Error(ErrorCode::DomainMismatch,
                "mesh does not cover [Q_min,Q_max] x [R_min,R_max]");

  const int n = static_cast<int>(hpf_mesh.vertices.size());
  const int T = sc.periods;
  double pmax = 0.0;
  for (double val : hpf_mesh.values) pmax = std::max(pmax, std::abs(val));
  milp::MilpModel m;
  m.name = "sths";

  // Per-period variables.
  std::vector<std::vector<int>> lam(T + 1);
  std::vector<std::vector<int>> y(T + 1), z(T + 1);
  std::vector<int> g(T + 1), u(T + 1), p(T + 1), q(T + 1), r(T + 2);
  for (int t = 1; t <= T; ++t) {
    for (int v = 0; v < n; ++v)
      lam[t].push_back(m.add_var(
          "lam_" + std::to_string(t) + "_" + std::to_string(v),
          milp::VarKind::Continuous, 0.0, 1.0));
    for (std::size_t l = 0; l < cover.bicliques.size(); ++l)
      y[t].push_back(m.add_var(
          "y_" + std::to_string(t) + "_" + std::to_string(l + 1),
          milp::VarKind::Binary, 0.0, 1.0));
    if (coloring)
      for (int c = 0; c < coloring->q; ++c)
        z[t].push_back(m.add_var(
            "z_" + std::to_string(t) + "_" + std::to_string(c + 1),
            milp::VarKind::Binary, 0.0, 1.0));
    g[t] = m.add_var(tname("g", t), milp::VarKind::Binary, 0.0, 1.0);
    u[t] = m.add_var(tname("u", t), milp::VarKind::Binary, 0.0, 1.0);
    p[t] = m.add_var(tname("p", t), milp::VarKind::Continuous,
                     -std::abs(sc.p_pump) - pmax, pmax + std::abs(sc.p_pump));
    q[t] = m.add_var(tname("q", t), milp::VarKind::Continuous,
                     std::min(sc.q_pump, sc.q_min), sc.q_max);
  }
  for (int t = 1; t <= T + 1; ++t) {
    double lb = sc.r_min, ub = sc.r_max;
    if (t == 1) lb = ub = sc.r_init;
    if (t == T + 1) lb = std::max(lb, sc.r_final_min);
    r[t] = m.add_var(tname("r", t), milp::VarKind::Continuous, lb, ub);
  }

  for (int t = 1; t <= T; ++t) {
    // Power and flow as convex combinations plus the pump contribution.
    std::vector<std::pair<int, double>> hp{{p[t], 1.0}};
    for (int v = 0; v < n; ++v)
      hp.emplace_back(lam[t][v], -hpf_mesh.values[v]);
    hp.emplace_back(u[t], -sc.p_pump);
    m.add_con(tname("hpf", t), std::move(hp), milp::Sense::EQ, 0.0);

    std::vector<std::pair<int, double>> fl{{q[t], 1.0}};
    for (int v = 0; v < n; ++v)
      fl.emplace_back(lam[t][v], -hpf_mesh.vertices[v][0]);
    fl.emplace_back(u[t], -sc.q_pump);
    m.add_con(tname("flow", t), std::move(fl), milp::Sense::EQ, 0.0);

    std::vector<std::pair<int, double>> vlo{{r[t], 1.0}};
    std::vector<std::pair<int, double>> vhi{{r[t], 1.0}};
    for (int v = 0; v < n; ++v) {
      vlo.emplace_back(lam[t][v], -hpf_mesh.vertices[v][1]);
      vhi.emplace_back(lam[t][v], -hpf_mesh.vertices[v][1]);
    }
    vlo.emplace_back(u[t], -sc.r_min);
    vhi.emplace_back(u[t], -sc.r_max);
    m.add_con(tname("vol_lo", t), std::move(vlo), milp::Sense::GE, 0.0);
    m.add_con(tname("vol_hi", t), std::move(vhi), milp::Sense::LE, 0.0);

    std::vector<std::pair<int, double>> cv;
    for (int v = 0; v < n; ++v) cv.emplace_back(lam[t][v], 1.0);
    cv.emplace_back(g[t], -1.0);
    m.add_con(tname("conv", t), std::move(cv), milp::Sense::EQ, 0.0);

    for (std::size_t l = 0; l < cover.bicliques.size(); ++l) {
      const auto& bc = cover.bicliques[l];
      std::vector<std::pair<int, double>> ta, tb;
      for (int v : bc.a) ta.emplace_back(lam[t][v], 1.0);
      ta.emplace_back(y[t][l], -1.0);
      m.add_con("bic_" + std::to_string(t) + "_" + std::to_string(l + 1) + "_a",
                std::move(ta), milp::Sense::LE, 0.0);
      for (int v : bc.b) tb.emplace_back(lam[t][v], 1.0);
      tb.emplace_back(y[t][l], 1.0);
      m.add_con("bic_" + std::to_string(t) + "_" + std::to_string(l + 1) + "_b",
                std::move(tb), milp::Sense::LE, 1.0);
    }

    if (coloring) {
      std::vector<std::pair<int, double>> zs;
      for (int c = 0; c < coloring->q; ++c) zs.emplace_back(z[t][c], 1.0);
      zs.emplace_back(g[t], -1.0);
      m.add_con(tname("col_sum", t), std::move(zs), milp::Sense::EQ, 0.0);
      std::map<std::vector<int>, std::vector<int>> groups;
      for (int v = 0; v < n; ++v) groups[coloring->patterns[v]].push_back(v);
      std::vector<std::pair<int, const std::vector<int>*>> ordered;
      for (const auto& [pat, verts] : groups)
        ordered.emplace_back(verts.front(), &pat);
      std::sort(ordered.begin(), ordered.end());
      int idx = 0;
      for (const auto& [fv, pat] : ordered) {
        (void)fv;
        std::vector<std::pair<int, double>> terms;
        for (int v : groups[*pat]) terms.emplace_back(lam[t][v], 1.0);
        for (int c : *pat) terms.emplace_back(z[t][c - 1], -1.0);
        m.add_con("col_pat_" + std::to_string(t) + "_" + std::to_string(++idx),
                  std::move(terms), milp::Sense::LE, 0.0);
      }
    }

    m.add_con(tname("mode", t), {{g[t], 1.0}, {u[t], 1.0}}, milp::Sense::LE,
              1.0);
    // r_{t+1} = r_t + 3600*(inflow_t - q_t)
    m.add_con(tname("bal", t),
              {{r[t + 1], 1.0}, {r[t], -1.0}, {q[t], kSecondsPerPeriod}},
              milp::Sense::EQ, kSecondsPerPeriod * sc.inflow[t - 1]);
  }

  m.obj.sense = milp::ObjSense::Maximize;
  for (int t = 1; t <= T; ++t) m.obj.terms.emplace_back(p[t], sc.price[t - 1]);
  return m;
}

ScheduleEvaluation evaluate_schedule(
    const std::map<std::string, double>& solution, const Scenario& sc,
    const Hpf& hpf) {
  auto get = [&](const std::string& name) {
    auto it = solution.find(name);
    return it == solution.end() ? 0.0 : it->second;
  };
  ScheduleEvaluation ev;
  double err_sum = 0.0;
  for (int t = 1; t <= sc.periods; ++t) {
    double pt = get(tname("p", t));
    double qt = get(tname("q", t));
    double rt = get(tname("r", t));
    double gt = get(tname("g", t));
    double ut = get(tname("u", t));
    ev.pwl_obj += sc.price[t - 1] * pt;
    bool generating = gt > 0.5;
    double nl_power = generating ? hpf(qt, rt) + (ut > 0.5 ? sc.p_pump : 0.0)
                                 : (ut > 0.5 ? sc.p_pump : 0.0);
    ev.nl_obj += sc.price[t - 1] * nl_power;
    if (generating) {
      ++ev.generating_periods;
      err_sum += std::abs(pt - nl_power);
    }
    double next_r = get(tname("r", t + 1));
    double residual =
        next_r - rt - kSecondsPerPeriod * (sc.inflow[t - 1] - qt);
    ev.max_conservation_residual =
        std::max(ev.max_conservation_residual, std::abs(residual));
  }
  ev.rel_err = ev.nl_obj == 0.0
                   ? (ev.pwl_obj == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                   : std::abs(ev.pwl_obj - ev.nl_obj) / std::abs(ev.nl_obj);
  ev.avg_abs_hpf_err =
      ev.generating_periods > 0 ? err_sum / ev.generating_periods : 0.0;
  return ev;
}

std::string evaluation_to_json(const ScheduleEvaluation& ev) {
  nlohmann::json j;
  j["pwl_obj"] = ev.pwl_obj;
  j["nl_obj"] = ev.nl_obj;
  j["rel_err"] = ev.rel_err;
  j["avg_abs_hpf_err"] = ev.avg_abs_hpf_err;
  j["generating_periods"] = ev.generating_periods;
  j["max_conservation_residual"] = ev.max_conservation_residual;
  return j.dump(2) + "\n";
}

}  // namespace pwlmilp::sths
