#include "pqsys/subcommands.hpp"

#include "pqsys/eigenvalue.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace pqsys {

namespace {

namespace fs = std::filesystem;

std::string fmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail("cannot create output directory '" + dir + "': " + ec.message());
}

RefinementHierarchy build_domain(const RunConfig& config, int extra_levels = 0) {
  return build_hierarchy(generate_unit_square(config.cells), config.levels + extra_levels);
}

int cmd_mesh(const RunConfig& config) {
  ensure_output_dir(config.output_directory);
  const RefinementHierarchy hierarchy = build_domain(config);
  std::ostringstream summary;
  summary << "level,vertices,triangles,interior_dofs,measure\n";
  for (int l = 0; l < hierarchy.num_levels(); ++l) {
    const Mesh& mesh = hierarchy.mesh(l);
    std::ostringstream os;
    write_mesh(os, mesh);
    write_file_atomic(config.output_directory + "/mesh_level" + std::to_string(l) + ".txt", os.str());
    summary << l << ',' << mesh.num_vertices() << ',' << mesh.num_triangles() << ','
            << mesh.num_interior() << ',' << fmt(mesh.domain_measure) << "\n";
  }
  write_file_atomic(config.output_directory + "/mesh_report.csv", summary.str());
  std::cout << summary.str();
  return EXIT_OK;
}

int cmd_eigen(const RunConfig& config) {
  ensure_output_dir(config.output_directory);
  const RefinementHierarchy hierarchy = build_domain(config);
  std::ostringstream csv;
  csv << "r,level,lambda,iterations,residual\n";
  for (int l = 0; l < hierarchy.num_levels(); ++l) {
    try {
      const EigenEstimate est =
          estimate_lambda1(config.eigen_r, hierarchy, l, config.eigen_tol, config.eigen_max_iterations);
      csv << fmt(est.r) << ',' << est.level << ',' << fmt(est.lambda) << ',' << est.iterations
          << ',' << fmt(est.residual) << "\n";
    } catch (const EigenError& err) {
      std::cerr << "eigen: " << err.what() << "\n";
      return EXIT_SOLVER;
    }
  }
  write_file_atomic(config.output_directory + "/eigen_report.csv", csv.str());
  std::cout << csv.str();
  return EXIT_OK;
}

std::string check_report_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream csv;
  csv << "hypothesis,samples_tested,violations,margin_seven,conditional,passed\n";
  for (const CheckReport& r : reports) {
    csv << r.hypothesis << ',' << r.samples_tested << ',' << r.violations.size() << ','
        << (r.margin_seven ? fmt(*r.margin_seven) : "") << ','
        << (r.conditional ? "true" : "false") << ',' << (r.passed ? "true" : "false") << "\n";
  }
  return csv.str();
}

std::string violations_csv(const std::vector<CheckReport>& reports) {
  std::ostringstream csv;
  csv << "hypothesis,equation,sample_index,x,y,s,t,xi1,xi2,nu1,nu2,lhs,rhs\n";
  for (const CheckReport& r : reports) {
    std::size_t shown = 0;
    for (const Violation& v : r.violations) {
      if (++shown > 100) break;
      csv << r.hypothesis << ',' << v.equation << ',' << v.sample_index << ',' << fmt(v.x.x())
          << ',' << fmt(v.x.y()) << ',' << fmt(v.s) << ',' << fmt(v.t) << ',' << fmt(v.xi.x())
          << ',' << fmt(v.xi.y()) << ',' << fmt(v.nu.x()) << ',' << fmt(v.nu.y()) << ','
          << fmt(v.lhs) << ',' << fmt(v.rhs) << "\n";
    }
  }
  return csv.str();
}

int cmd_check(const RunConfig& config) {
  ensure_output_dir(config.output_directory);
  const RefinementHierarchy hierarchy = build_domain(config);
  const BuiltProblem built = build_problem(config, hierarchy.mesh(0));

  const int top = std::min(config.levels - 1, config.eigen_level_cap);
  std::vector<EigenEstimate> lam1, lam2;
  for (int l = 0; l <= top; ++l) {
    lam1.push_back(estimate_lambda1(built.spec.p1, hierarchy, l, config.eigen_tol));
    lam2.push_back(estimate_lambda1(built.spec.p2, hierarchy, l, config.eigen_tol));
  }
  Real drift = 0.0;
  if (lam1.size() >= 2) {
    drift = std::max(std::abs(lam1[lam1.size() - 2].lambda - lam1.back().lambda) / lam1.back().lambda,
                     std::abs(lam2[lam2.size() - 2].lambda - lam2.back().lambda) / lam2.back().lambda);
  }

  SamplingPlan plan;
  plan.domain_mesh = &hierarchy.mesh(0);
  plan.n_samples = config.samples;
  plan.max_magnitude = config.max_magnitude;
  plan.seed = config.seed;

  std::vector<CheckReport> reports;
  reports.push_back(check_H1(built.spec.f1, built.spec.f2, built.spec, built.constants, plan));
  if (built.constants.D1 && built.constants.D2 && built.constants.r1 && built.constants.r2)
    reports.push_back(check_H1prime(built.spec.f1, built.spec.f2, built.spec, built.constants, plan));
  reports.push_back(check_H2(built.spec.f1, built.spec.f2, built.spec, built.constants,
                             lam1.back(), lam2.back(), plan, drift));

  const std::string csv = check_report_csv(reports);
  write_file_atomic(config.output_directory + "/check_report.csv", csv);
  if (std::any_of(reports.begin(), reports.end(),
                  [](const CheckReport& r) { return !r.violations.empty(); }))
    write_file_atomic(config.output_directory + "/violations.csv", violations_csv(reports));
  std::cout << csv;

  std::cout << "lambda(p1=" << fmt(built.spec.p1) << "): coarsest " << fmt(lam1.front().lambda)
            << " (level " << lam1.front().level << "), finest " << fmt(lam1.back().lambda)
            << " (level " << lam1.back().level << ")\n";
  std::cout << "lambda(p2=" << fmt(built.spec.p2) << "): coarsest " << fmt(lam2.front().lambda)
            << " (level " << lam2.front().level << "), finest " << fmt(lam2.back().lambda)
            << " (level " << lam2.back().level << ")\n";
  bool all = true;
  for (const CheckReport& r : reports) {
    std::cout << r.hypothesis << ": " << (r.passed ? "pass" : "FAIL") << " ("
              << r.violations.size() << " violation(s) in " << r.samples_tested << " samples";
    if (r.margin_seven) {
      std::cout << ", margin " << fmt(*r.margin_seven);
      if (r.conditional) std::cout << ", conditional on the eigenvalue trend";
    }
    std::cout << ")\n";
    all = all && r.passed;
  }
  return all ? EXIT_OK : EXIT_HYPOTHESIS;
}

int cmd_solve(const RunConfig& config) {
  ensure_output_dir(config.output_directory);
  if (config.levels < 2) fail("solve needs at least two levels");
  const RefinementHierarchy hierarchy = build_domain(config, /*extra_levels=*/1);
  const BuiltProblem built = build_problem(config, hierarchy.mesh(0));
  HierarchyControls controls = hierarchy_controls(config, hierarchy.mesh(0));

  const SolveReport report =
      run_hierarchy(built.spec, hierarchy, config.levels, config.tol, controls);

  std::ostringstream csv;
  csv << "level,dofs,pair_norm,R,residual_linf,condition_b_max,condition_c,condition_c_prime,"
         "strong_convergence\n";
  for (std::size_t l = 0; l < report.levels.size(); ++l) {
    const LevelSolution& sol = report.levels[l];
    const Mesh& mesh = hierarchy.mesh(static_cast<int>(l));
    csv << l << ',' << 2 * mesh.num_interior() << ',' << fmt(sol.pair_norm) << ','
        << fmt(report.radius) << ',' << fmt(sol.residual_linf) << ','
        << (l < report.condition_b.size() ? fmt(report.condition_b[l]) : "") << ','
        << (l < report.condition_c.size() ? fmt(report.condition_c[l]) : "") << ','
        << (l < report.condition_c_prime.size() ? fmt(report.condition_c_prime[l]) : "") << ','
        << (l < report.strong_convergence.size() ? fmt(report.strong_convergence[l]) : "") << "\n";
  }
  write_file_atomic(config.output_directory + "/solve_report.csv", csv.str());
  std::cout << csv.str();

  if (!report.hypothesis_reports.empty())
    write_file_atomic(config.output_directory + "/check_report.csv",
                      check_report_csv(report.hypothesis_reports));

  for (std::size_t l = 0; l < report.levels.size(); ++l) {
    const Mesh& mesh = hierarchy.mesh(static_cast<int>(l));
    std::ostringstream fields;
    write_fields_csv(fields, mesh, report.levels[l].state.u, report.levels[l].state.v);
    write_file_atomic(config.output_directory + "/fields_level" + std::to_string(l) + ".csv",
                      fields.str());
    std::ostringstream meshfile;
    write_mesh(meshfile, mesh);
    write_file_atomic(config.output_directory + "/mesh_level" + std::to_string(l) + ".txt",
                      meshfile.str());
  }

  if (report.failure == "hypothesis checks failed" ||
      report.failure == "no hypothesis constants supplied and override not set") {
    std::cerr << "solve: " << report.failure << "\n";
    return EXIT_HYPOTHESIS;
  }
  if (!report.failure.empty() || !report.all_converged) {
    std::cerr << "solve: " << (report.failure.empty() ? "levels failed to converge" : report.failure)
              << "\n";
    return EXIT_SOLVER;
  }
  return EXIT_OK;
}

int cmd_probe(const RunConfig& config) {
  ensure_output_dir(config.output_directory);
  const RefinementHierarchy hierarchy = build_domain(config);
  const int level = std::min(config.levels - 1, 2);
  const Mesh& mesh = hierarchy.mesh(level);
  const FemFunction f0 = interpolate(
      mesh, [](Real x, Real y) { return std::sin(M_PI * x) * std::sin(M_PI * y); });
  const std::vector<Real> grid =
      probe_default_grid(mesh, f0, config.p1, config.q1, config.probe_mu, config.probe_points);
  const auto samples = probe_nonmonotonicity(mesh, f0, config.p1, config.q1, config.probe_mu, grid);
  std::ostringstream csv;
  csv << "t,energy\n";
  for (const auto& [t, e] : samples) csv << fmt(t) << ',' << fmt(e) << "\n";
  write_file_atomic(config.output_directory + "/probe.csv", csv.str());
  std::cout << csv.str();
  return EXIT_OK;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) fail("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail("rename '" + tmp + "' -> '" + path + "' failed: " + ec.message());
}

int run_subcommand(const std::string& name, const RunConfig& config) {
  if (name == "mesh") return cmd_mesh(config);
  if (name == "eigen") return cmd_eigen(config);
  if (name == "check") return cmd_check(config);
  if (name == "solve") return cmd_solve(config);
  if (name == "probe") return cmd_probe(config);
  fail("unknown subcommand '" + name + "'");
}

}  // namespace pqsys
