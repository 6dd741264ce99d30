#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args, const std::string& workdir) {
  const std::string out_file = workdir + "/stdout.txt";
  const std::string cmd = std::string(PQSYS_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(status), ss.str()};
}

std::string fresh_dir(const std::string& name) {
  const std::string dir = (fs::temp_directory_path() / ("pqsys_cli_" + name)).string();
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("probe emits a sign change and exit 0") {
  const std::string dir = fresh_dir("probe");
  const RunResult r = run_cli("probe --mu 1.0 --levels 2 --output " + dir + "/out", dir);
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.rfind("t,energy\n", 0) == 0);
  bool negative = false, positive = false;
  std::istringstream lines(r.stdout_text);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    const auto comma = line.find(',');
    const double e = std::atof(line.c_str() + comma + 1);
    negative = negative || e < 0;
    positive = positive || e > 0;
  }
  CHECK(negative);
  CHECK(positive);
  CHECK(fs::exists(dir + "/out/probe.csv"));
}

TEST_CASE("mesh writes level exports") {
  const std::string dir = fresh_dir("mesh");
  const RunResult r = run_cli("mesh --levels 2 --output " + dir + "/out", dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir + "/out/mesh_level0.txt"));
  CHECK(fs::exists(dir + "/out/mesh_level1.txt"));
  CHECK(fs::exists(dir + "/out/mesh_report.csv"));
  CHECK(slurp(dir + "/out/mesh_level0.txt").rfind("vertices 13 triangles 16", 0) == 0);
  CHECK(!fs::exists(dir + "/out/mesh_level0.txt.tmp"));  // atomic rename cleaned up
}

TEST_CASE("eigen subcommand prints the certificate rows") {
  const std::string dir = fresh_dir("eigen");
  const RunResult r = run_cli("eigen --r 2.0 --levels 3 --output " + dir + "/out", dir);
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.rfind("r,level,lambda,iterations,residual\n", 0) == 0);
  // last level lambda within a few percent of 2 pi^2
  std::istringstream lines(r.stdout_text);
  std::string line, last;
  std::getline(lines, line);
  while (std::getline(lines, line))
    if (!line.empty()) last = line;
  double rr, lambda, res;
  int level, its;
  CHECK(std::sscanf(last.c_str(), "%lf,%d,%lf,%d,%lf", &rr, &level, &lambda, &its, &res) == 5);
  CHECK(level == 2);
  CHECK(std::abs(lambda - 19.7392) / 19.7392 < 0.03);
}

TEST_CASE("check passes on the family defaults; failing margins exit 2 before solving") {
  const std::string dir = fresh_dir("check");
  const RunResult ok = run_cli(
      "check --levels 2 --set hypotheses.samples=5000 --set eigen.level_cap=1 --output " + dir +
          "/ok",
      dir);
  CHECK(ok.exit_code == 0);
  CHECK(ok.stdout_text.find("H1,5000,0") != std::string::npos);
  CHECK(ok.stdout_text.find("H2,5000,0") != std::string::npos);

  const RunResult bad = run_cli(
      "solve --levels 2 --set hypotheses.c1=0.6 --set hypotheses.c2=0.6 "
      "--set hypotheses.samples=500 --set eigen.level_cap=0 --output " +
          dir + "/bad",
      dir);
  CHECK(bad.exit_code == 2);
  CHECK(!fs::exists(dir + "/bad/fields_level0.csv"));  // no assembly happened
}

TEST_CASE("solve writes the report, fields and meshes") {
  const std::string dir = fresh_dir("solve");
  const RunResult r = run_cli(
      "solve --levels 2 --set hypotheses.samples=2000 --set eigen.level_cap=0 "
      "--set solver.tol=1e-9 --output " +
          dir + "/out",
      dir);
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.rfind("level,dofs,pair_norm,R,", 0) == 0);
  CHECK(fs::exists(dir + "/out/solve_report.csv"));
  CHECK(fs::exists(dir + "/out/fields_level0.csv"));
  CHECK(fs::exists(dir + "/out/fields_level1.csv"));
  CHECK(fs::exists(dir + "/out/mesh_level1.txt"));
  CHECK(fs::exists(dir + "/out/check_report.csv"));
  CHECK(slurp(dir + "/out/fields_level0.csv").rfind("vertex_id,x,y,u_value,v_value\n", 0) == 0);
}

TEST_CASE("identical config and seed give bit-identical outputs") {
  const std::string dir = fresh_dir("determinism");
  const std::string args =
      "check --levels 2 --seed 9 --set hypotheses.samples=3000 --set eigen.level_cap=1 --output ";
  CHECK(run_cli(args + dir + "/a", dir).exit_code == 0);
  CHECK(run_cli(args + dir + "/b", dir).exit_code == 0);
  CHECK(slurp(dir + "/a/check_report.csv") == slurp(dir + "/b/check_report.csv"));
  CHECK(slurp(dir + "/a/check_report.csv").size() > 0);

  const std::string solve_args =
      "solve --levels 2 --seed 9 --set hypotheses.samples=1000 --set eigen.level_cap=0 --output ";
  CHECK(run_cli(solve_args + dir + "/sa", dir).exit_code == 0);
  CHECK(run_cli(solve_args + dir + "/sb", dir).exit_code == 0);
  CHECK(slurp(dir + "/sa/solve_report.csv") == slurp(dir + "/sb/solve_report.csv"));
  CHECK(slurp(dir + "/sa/fields_level1.csv") == slurp(dir + "/sb/fields_level1.csv"));
}

TEST_CASE("solver failures exit with code 3") {
  const std::string dir = fresh_dir("solverfail");
  // eigen: unreachable tolerance within two iterations
  const RunResult r = run_cli(
      "eigen --r 1.5 --levels 2 --set eigen.max_iterations=2 --set eigen.tol=1e-15 --output " +
          dir + "/out",
      dir);
  CHECK(r.exit_code == 3);
}

TEST_CASE("environment variable overrides the output directory") {
  const std::string dir = fresh_dir("envdir");
  const std::string out_file = dir + "/stdout.txt";
  const std::string cmd = "PQSYS_OUTPUT_DIR=" + dir + "/env_out " + PQSYS_CLI_PATH +
                          " mesh --levels 1 > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(dir + "/env_out/mesh_level0.txt"));
}

TEST_CASE("config file loading, overrides and parse failures") {
  const std::string dir = fresh_dir("configfile");
  {
    std::ofstream cfg(dir + "/run.cfg");
    cfg << "[problem]\nmu1 = 1.0\n[solver]\ntol = 1e-9\n";
  }
  const RunResult ok =
      run_cli("probe " + dir + "/run.cfg --levels 2 --output " + dir + "/out", dir);
  CHECK(ok.exit_code == 0);

  {
    std::ofstream cfg(dir + "/bad.cfg");
    cfg << "[problem]\np1 = 2.5\n";
  }
  const RunResult parse_fail = run_cli("probe " + dir + "/bad.cfg", dir);
  CHECK(parse_fail.exit_code == 1);
  CHECK(parse_fail.stdout_text.find("p_i < N = 2") != std::string::npos);

  const RunResult missing = run_cli("probe " + dir + "/nonexistent.cfg", dir);
  CHECK(missing.exit_code == 4);

  const RunResult bad_override = run_cli("probe --set problem.q1=1.9", dir);
  CHECK(bad_override.exit_code == 1);
}

TEST_SUITE_END();
