#include "pqsys/subcommands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

/// Applies a `section.key=value` override by splicing it into the canonical
/// serialized form and re-parsing, so overrides share the config validation.
std::string apply_overrides(std::string text, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const std::size_t dot = item.find('.');
    const std::size_t eq = item.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq)
      throw pqsys::ConfigError("override must look like section.key=value, got '" + item + "'", 0, 0);
    const std::string section = item.substr(0, dot);
    const std::string key = item.substr(dot + 1, eq - dot - 1);
    const std::string value = item.substr(eq + 1);
    text += "\n[" + section + "]\n" + key + " = " + value + "\n";
  }
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galerkin solver and hypothesis auditor for Dirichlet systems with competing "
               "(p,q)-Laplacians and convection"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  int levels = -1;
  double eigen_r = 0.0;
  double probe_mu = std::numeric_limits<double>::quiet_NaN();
  long seed = -1;

  for (const char* name : {"mesh", "eigen", "check", "solve", "probe"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "config file (key = value sections); defaults apply if omitted");
    sub->add_option("--set", overrides, "override any key as section.key=value")->take_all();
    sub->add_option("--output", output_dir, "output directory override");
    sub->add_option("--levels", levels, "number of mesh levels");
    sub->add_option("--seed", seed, "sampler seed");
    if (std::string(name) == "eigen") sub->add_option("--r", eigen_r, "exponent r of the eigenvalue problem");
    if (std::string(name) == "probe") sub->add_option("--mu", probe_mu, "competition coefficient mu");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  std::string text;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot read config file '" << config_path << "'\n";
      return pqsys::EXIT_IO;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }

  pqsys::RunConfig config;
  try {
    text = apply_overrides(text, overrides);
    config = pqsys::parse_config(text);
  } catch (const std::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return pqsys::EXIT_PARSE;
  }

  if (levels > 0) config.levels = levels;
  if (eigen_r > 0.0) config.eigen_r = eigen_r;
  if (!std::isnan(probe_mu)) config.probe_mu = probe_mu;
  if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
  if (!output_dir.empty()) config.output_directory = output_dir;
  if (const char* env = std::getenv("PQSYS_OUTPUT_DIR"); env && *env)
    config.output_directory = env;

  try {
    return pqsys::run_subcommand(subcommand, config);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return pqsys::EXIT_PARSE;
  } catch (const std::runtime_error& err) {
    const std::string what = err.what();
    std::cerr << "error: " << what << "\n";
    if (what.find("cannot") != std::string::npos || what.find("write") != std::string::npos ||
        what.find("rename") != std::string::npos)
      return pqsys::EXIT_IO;
    return pqsys::EXIT_SOLVER;
  }
}
