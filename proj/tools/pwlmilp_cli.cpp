// Command-line pipeline: fit a PWL surrogate, analyze its conflict
// structure, reduce rank, cover pairwise conflicts, emit MILP models,
// verify them, and generate hydropower scheduling instances.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pwlmilp/biclique.hpp"
#include "pwlmilp/blocking.hpp"
#include "pwlmilp/conflict.hpp"
#include "pwlmilp/fitting.hpp"
#include "pwlmilp/functions.hpp"
#include "pwlmilp/graph.hpp"
#include "pwlmilp/lp_format.hpp"
#include "pwlmilp/mesh.hpp"
#include "pwlmilp/milp.hpp"
#include "pwlmilp/sat.hpp"
#include "pwlmilp/solver.hpp"
#include "pwlmilp/sths.hpp"
#include "pwlmilp/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pwlmilp;

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::MaxIterExceeded:
    case ErrorCode::RefinementLimit:
      return 2;
    case ErrorCode::SizeLimit:
    case ErrorCode::TooManyBinaries:
      return 4;
    default:
      return 3;
  }
}

struct PipelineResult {
  mesh::SimplicialPartition part;
  conflict::ConflictHypergraph hg;
  blocking::BlockingHypergraph bh;
  std::optional<blocking::Coloring> coloring;
  biclique::BicliqueCover cover;
  std::vector<conflict::SplitRecord> splits;
};

graph::Graph conflict_graph_of(const conflict::ConflictHypergraph& hg) {
  return graph::Graph(hg.num_vertices, hg.rank2_edges());
}

// The right-hand panel of the pipeline: conflict hypergraph, optional
// rank reduction, blocking/coloring when needed, biclique cover.
PipelineResult run_pipeline(const mesh::SimplicialPartition& input,
                            bool reduce, const std::string& strategy,
                            int geom_iters, int n_lines, std::uint64_t seed,
                            std::size_t budget) {
  PipelineResult out;
  out.part = input;
  conflict::BuildOptions bopt;
  bopt.budget = budget;
  auto ss = mesh::to_set_system(out.part);
  out.hg = conflict::build_conflict_hypergraph(ss, out.part.dim, bopt);

  if (reduce && out.hg.rank() >= 3) {
    conflict::ReduceOptions ropt;
    ropt.build = bopt;
    auto [reduced, records] = conflict::reduce_rank(out.part, ropt);
    out.part = std::move(reduced);
    out.splits = std::move(records);
    ss = mesh::to_set_system(out.part);
    out.hg = conflict::build_conflict_hypergraph(ss, out.part.dim, bopt);
  }

  if (out.hg.rank() > 2) {
    out.bh = blocking::build_blocking_hypergraph(ss, out.hg, out.part.dim, bopt);
    out.coloring = blocking::color_blocking(ss, out.bh);
  }

  auto g = conflict_graph_of(out.hg);
  biclique::CoverOptions copt;
  copt.seed = seed;
  copt.geom_iterations = geom_iters;
  copt.n_lines = n_lines;
  bool want_geom = strategy == "geom" ||
                   (strategy == "auto" && out.part.dim == 2 && g.n() > 30);
  if (want_geom && out.part.dim == 2) {
    copt.strategy = biclique::CoverStrategy::GeomThenExact;
    copt.embedding = &out.part;
  }
  out.cover = biclique::cover_bicliques(g, copt);
  return out;
}

json analysis_json(const PipelineResult& r) {
  json j;
  j["n_vertices"] = r.part.num_vertices();
  j["n_simplices"] = r.part.num_simplices();
  j["rank"] = r.hg.rank();
  j["nu_rank2_edges"] = r.hg.rank2_edges().size();
  std::size_t mu = 0;
  for (const auto& e : r.hg.edges)
    if (e.size() >= 3) ++mu;
  j["mu_higher_rank_edges"] = mu;
  j["beta_blocking_edges"] = r.bh.edges.size();
  j["q_colors"] = r.coloring ? r.coloring->q : 1;
  j["biclique_cover_size"] = r.cover.bicliques.size();
  j["splits_applied"] = r.splits.size();
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
}

fitfn::TargetFunction make_target(const std::string& fn,
                                  const std::string& expr, double lipschitz,
                                  const std::vector<double>& domain) {
  fitfn::TargetFunction f;
  if (!fn.empty()) {
    f = fitfn::builtin(fn);
  } else if (!expr.empty()) {
    f = fitfn::from_expression(expr, {domain[0], domain[1]},
                               {domain[2], domain[3]}, lipschitz);
    if (!f.lipschitz_verified)
      std::cerr << "warning: Lipschitz constant estimated numerically ("
                << f.lipschitz << "), the fitted error bound is unverified\n";
  } else {
    throw Error(ErrorCode::ParseError, "need --fn or --expr");
  }
  if (!fn.empty()) {
    f.lo = {domain[0], domain[1]};
    f.hi = {domain[2], domain[3]};
    if (lipschitz > 0.0) f.lipschitz = lipschitz;
  }
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"piecewise-linear fitting and disjunctive MILP toolkit"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::uint64_t seed = 0;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "global random seed")->capture_default_str();

  // ---- fit ----
  auto* cmd_fit = app.add_subcommand("fit", "fit a PWL interpolant");
  std::string fit_fn, fit_expr;
  double fit_eps = 0.1, fit_lip = 0.0, fit_alpha = 18.0, fit_theta = 0.5;
  std::vector<double> fit_domain{0.0, 0.0, 1.0, 1.0};
  std::size_t fit_max_iter = 20000;
  int fit_audit = 0;
  cmd_fit->add_option("--fn", fit_fn, "builtin function name (f1..f5, ripple)");
  cmd_fit->add_option("--expr", fit_expr, "expression in x and y");
  cmd_fit->add_option("--eps", fit_eps, "target absolute error")
      ->capture_default_str();
  cmd_fit->add_option("--lipschitz", fit_lip,
                      "Lipschitz constant (required for --expr unless estimated)");
  cmd_fit->add_option("--domain", fit_domain, "x0 y0 x1 y1")->expected(4);
  cmd_fit->add_option("--alpha-lb", fit_alpha, "Ruppert angle bound (deg)")
      ->capture_default_str();
  cmd_fit->add_option("--theta", fit_theta, "sampling radius factor")
      ->capture_default_str();
  cmd_fit->add_option("--max-iter", fit_max_iter, "insertion cap")
      ->capture_default_str();
  cmd_fit->add_option("--audit-grid", fit_audit,
                      "post-hoc audit grid resolution (0 = skip)");

  // ---- analyze ----
  auto* cmd_analyze = app.add_subcommand("analyze", "conflict analysis of a mesh");
  std::string an_mesh, an_dimacs, an_strategy = "auto";
  std::size_t an_budget = 100000000;
  bool an_reduce = false;
  cmd_analyze->add_option("--mesh", an_mesh, "mesh JSON")->required();
  cmd_analyze->add_option("--dimacs", an_dimacs, "export coloring CNF here");
  cmd_analyze->add_option("--strategy", an_strategy,
                          "cover strategy: exact|geom|auto");
  cmd_analyze->add_option("--budget", an_budget, "enumeration budget");
  cmd_analyze->add_flag("--reduce", an_reduce, "apply rank reduction first");

  // ---- reduce ----
  auto* cmd_reduce = app.add_subcommand("reduce", "rank reduction by edge splits");
  std::string rd_mesh;
  cmd_reduce->add_option("--mesh", rd_mesh, "mesh JSON")->required();

  // ---- cover ----
  auto* cmd_cover = app.add_subcommand("cover", "biclique cover of the conflict graph");
  std::string cv_mesh, cv_graph, cv_strategy = "exact";
  int cv_geom_iters = 4, cv_lines = 1000;
  cmd_cover->add_option("--mesh", cv_mesh, "mesh JSON (conflict graph derived)");
  cmd_cover->add_option("--graph", cv_graph, "graph JSON");
  cmd_cover->add_option("--strategy", cv_strategy, "exact|geom");
  cmd_cover->add_option("--geom-iters", cv_geom_iters,
                        "heuristic iterations before exact")
      ->capture_default_str();
  cmd_cover->add_option("--lines", cv_lines, "random lines per iteration")
      ->capture_default_str();

  // ---- formulate ----
  auto* cmd_form = app.add_subcommand("formulate", "emit a MILP formulation");
  std::string fm_mesh, fm_formulation = "gib", fm_strategy = "auto";
  bool fm_no_reduce = false;
  std::size_t fm_budget = 100000000;
  cmd_form->add_option("--mesh", fm_mesh, "mesh JSON")->required();
  cmd_form->add_option("--formulation", fm_formulation,
                       "gib|dlog|inc|mc|dcc|cc")
      ->capture_default_str();
  cmd_form->add_flag("--no-reduce", fm_no_reduce, "skip rank reduction");
  cmd_form->add_option("--strategy", fm_strategy, "cover strategy");
  cmd_form->add_option("--budget", fm_budget, "enumeration budget");

  // ---- verify ----
  auto* cmd_verify = app.add_subcommand("verify", "support-enumeration check of a model");
  std::string vf_model, vf_mesh;
  cmd_verify->add_option("--model", vf_model, "LP file")->required();
  cmd_verify->add_option("--mesh", vf_mesh, "mesh JSON")->required();

  // ---- sths ----
  auto* cmd_sths = app.add_subcommand("sths", "hydropower scheduling model");
  std::string st_scenario, st_plant, st_mesh, st_solver;
  bool st_solve = false;
  double st_tl = 60.0;
  cmd_sths->add_option("--scenario", st_scenario, "CSV: period,price,inflow")
      ->required();
  cmd_sths->add_option("--plant", st_plant, "plant key=value config")->required();
  cmd_sths->add_option("--mesh", st_mesh, "HPF mesh JSON")->required();
  cmd_sths->add_flag("--solve", st_solve, "solve and evaluate");
  cmd_sths->add_option("--solver", st_solver,
                       "solver command template ({lp} {sol} {tl})");
  cmd_sths->add_option("--tl", st_tl, "solver time limit (s)")
      ->capture_default_str();

  // ---- solve ----
  auto* cmd_solve = app.add_subcommand("solve", "run the external solver on an LP");
  std::string sl_model, sl_solver;
  double sl_tl = 60.0;
  cmd_solve->add_option("--model", sl_model, "LP file")->required();
  cmd_solve->add_option("--solver", sl_solver, "solver command template");
  cmd_solve->add_option("--tl", sl_tl, "time limit (s)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);

    if (*cmd_fit) {
      auto f = make_target(fit_fn, fit_expr, fit_lip, fit_domain);
      fitting::FitConfig cfg;
      cfg.eps = fit_eps;
      cfg.alpha_lb = fit_alpha;
      cfg.theta = fit_theta;
      cfg.seed = seed;
      cfg.max_iter = fit_max_iter;
      auto [part, report] = fitting::fit(f, cfg);
      mesh::save_mesh(part, out_dir + "/mesh.json");
      fitting::write_report_csv(report, out_dir + "/report.csv");
      fitting::write_convergence_svg(report, cfg.eps,
                                     out_dir + "/convergence.svg");
      std::cout << "points " << part.num_vertices() << "  triangles "
                << part.num_simplices() << "  eps_hat "
                << report.final_eps_hat_max << "  certified "
                << report.certified_bound << "\n";
      if (fit_audit > 0) {
        fitting::PwlFunction fhat(part);
        double worst = fitting::audit_max_error(fhat, f, fit_audit);
        std::cout << "audit max|f-fhat| = " << worst << " on " << fit_audit
                  << "x" << fit_audit << " grid\n";
      }
      if (!report.converged) {
        std::cerr << "fit did not converge within the iteration cap\n";
        return 2;
      }
      return 0;
    }

    if (*cmd_analyze) {
      auto part = mesh::load_mesh(an_mesh);
      auto r = run_pipeline(part, an_reduce, an_strategy, 4, 1000, seed,
                            an_budget);
      auto j = analysis_json(r);
      write_text(out_dir + "/analysis.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
      if (!an_dimacs.empty()) {
        int q = r.coloring ? r.coloring->q : 1;
        write_text(an_dimacs, sat::to_dimacs(blocking::coloring_cnf(r.bh, q)));
      }
      return 0;
    }

    if (*cmd_reduce) {
      auto part = mesh::load_mesh(rd_mesh);
      auto [reduced, records] = conflict::reduce_rank(part);
      mesh::save_mesh(reduced, out_dir + "/reduced_mesh.json");
      for (const auto& rec : records)
        std::cout << "split (" << rec.u << "," << rec.v << ") -> vertex "
                  << rec.w << "  rank " << rec.k << "  eliminated "
                  << rec.eliminated << "  created " << rec.created << "\n";
      std::cout << "splits: " << records.size() << "\n";
      return 0;
    }

    if (*cmd_cover) {
      graph::Graph g;
      const mesh::SimplicialPartition* embedding = nullptr;
      mesh::SimplicialPartition part;
      if (!cv_mesh.empty()) {
        part = mesh::load_mesh(cv_mesh);
        auto hg = conflict::build_conflict_hypergraph(
            mesh::to_set_system(part), part.dim);
        g = conflict_graph_of(hg);
        if (part.dim == 2) embedding = &part;
      } else if (!cv_graph.empty()) {
        g = graph::load_graph(cv_graph);
      } else {
        throw Error(ErrorCode::ParseError, "need --mesh or --graph");
      }
      biclique::CoverOptions copt;
      copt.seed = seed;
      copt.geom_iterations = cv_geom_iters;
      copt.n_lines = cv_lines;
      if (cv_strategy == "geom") {
        if (!embedding)
          throw Error(ErrorCode::ParseError,
                      "geom strategy needs --mesh with a 2-D embedding");
        copt.strategy = biclique::CoverStrategy::GeomThenExact;
        copt.embedding = embedding;
      }
      auto cover = biclique::cover_bicliques(g, copt);
      json j;
      j["host_edges"] = cover.host_edges;
      j["size"] = cover.bicliques.size();
      auto& arr = j["bicliques"] = json::array();
      for (const auto& bc : cover.bicliques)
        arr.push_back({{"a", bc.a}, {"b", bc.b}});
      write_text(out_dir + "/cover.json", j.dump(2) + "\n");
      std::cout << "edges " << cover.host_edges << "  cover size "
                << cover.bicliques.size() << "\n";
      for (const auto& bc : cover.bicliques) {
        std::cout << "  A={";
        for (std::size_t i = 0; i < bc.a.size(); ++i)
          std::cout << (i ? "," : "") << bc.a[i];
        std::cout << "} B={";
        for (std::size_t i = 0; i < bc.b.size(); ++i)
          std::cout << (i ? "," : "") << bc.b[i];
        std::cout << "}\n";
      }
      return 0;
    }

    if (*cmd_form) {
      auto part = mesh::load_mesh(fm_mesh);
      auto r = run_pipeline(part, !fm_no_reduce, fm_strategy, 4, 1000, seed,
                            fm_budget);
      if (!r.splits.empty())
        mesh::save_mesh(r.part, out_dir + "/reduced_mesh.json");
      milp::DisjunctionSpec spec;
      spec.sets = mesh::to_set_system(r.part);
      spec.cover = r.cover;
      spec.coloring = r.coloring;
      spec.has_rank3 = r.hg.rank() >= 3;
      milp::MilpModel model = fm_formulation == "gib"
                                  ? milp::build_gib(spec)
                                  : milp::build_baseline(
                                        spec, milp::baseline_from_name(fm_formulation));
      milp::write_lp_file(model, out_dir + "/model.lp");
      auto j = analysis_json(r);
      auto sz = model.size();
      j["model"] = {{"formulation", model.name},
                    {"rows", sz.rows},
                    {"cols", sz.cols},
                    {"binaries", sz.binaries},
                    {"nonzeros", sz.nonzeros}};
      write_text(out_dir + "/analysis.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*cmd_verify) {
      auto model = milp::load_lp_file(vf_model);
      auto part = mesh::load_mesh(vf_mesh);
      auto rep = milp::verify_formulation(model, mesh::to_set_system(part));
      std::cout << "assignments " << rep.assignments_total << "  feasible "
                << rep.assignments_feasible << "\n";
      std::cout << "maximal reachable supports: "
                << rep.reachable_supports.size() << "\n";
      for (const auto& s : rep.infeasible_supports) {
        std::cout << "INFEASIBLE support reachable: {";
        for (std::size_t i = 0; i < s.size(); ++i)
          std::cout << (i ? "," : "") << s[i];
        std::cout << "}\n";
      }
      for (int i : rep.unreachable_sets)
        std::cout << "set " << i << " is unreachable\n";
      std::cout << (rep.ok ? "VERIFY OK" : "VERIFY FAILED") << "\n";
      return rep.ok ? 0 : 1;
    }

    if (*cmd_sths) {
      auto plant = sths::load_plant_config(st_plant);
      auto sc_series = sths::load_scenario_csv(st_scenario);
      auto sc = sths::make_scenario(plant, sc_series.price, sc_series.inflow);
      auto part = mesh::load_mesh(st_mesh);
      auto r = run_pipeline(part, true, "auto", 4, 1000, seed, 100000000);
      auto model = sths::build_sths(sc, r.part, r.cover, r.coloring);
      milp::write_lp_file(model, out_dir + "/sths.lp");
      auto sz = model.size();
      std::cout << "sths model: rows " << sz.rows << " cols " << sz.cols
                << " binaries " << sz.binaries << " nonzeros " << sz.nonzeros
                << "\n";
      if (st_solve) {
        std::string cmd = st_solver.empty() ? solver::solver_from_env() : st_solver;
        auto res = solver::solve_external(model, cmd, st_tl, out_dir);
        std::cout << "status " << solver::to_string(res.status)
                  << "  objective " << res.objective << "\n";
        if (res.status == solver::SolveStatus::Optimal ||
            res.status == solver::SolveStatus::Feasible) {
          auto ev = sths::evaluate_schedule(res.values, sc, plant.hpf);
          write_text(out_dir + "/evaluation.json", sths::evaluation_to_json(ev));
          std::cout << sths::evaluation_to_json(ev);
        }
      }
      return 0;
    }

    if (*cmd_solve) {
      auto model = milp::load_lp_file(sl_model);
      std::string cmd = sl_solver.empty() ? solver::solver_from_env() : sl_solver;
      auto res = solver::solve_external(model, cmd, sl_tl, out_dir);
      std::cout << "status " << solver::to_string(res.status) << "  objective "
                << res.objective << "  wall " << res.wall_seconds << "s\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
