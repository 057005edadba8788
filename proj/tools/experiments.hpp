#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bdsde::tools {

/// Resolved settings for one run. Every subcommand reads the fields it needs
/// and ignores the rest.
struct ExperimentConfig {
  std::string model = "linear";
  std::vector<double> params;
  double horizon = 1.0;
  int n = 16;
  std::vector<int> n_list{8, 16, 32, 64};
  std::string scheme = "implicit";
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  std::string out;
  bool keep_tree = false;
  // picard-diagnose
  double gamma = 2.718281828459045;
  int p_max = 50;
  double picard_tol = 1e-16;
  std::string norm = "auto";
  // spde
  double sigma = 1.0;
  double drift0 = 0.0;
  double drift1 = 0.0;
  std::string h = "square";
  double x_min = -1.0;
  double x_max = 1.0;
  int x_count = 11;
};

/// Parses `args` (without the program name), runs the subcommand and returns
/// the process exit status: 0 ok, 1 numeric failure or failed check, 2 usage.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bdsde::tools
