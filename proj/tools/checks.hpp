#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bdsde::tools {

/// One verified claim "lhs relation rhs".
struct CheckRecord {
  std::string claim;
  double lhs = 0.0;
  std::string relation = "<";
  double rhs = 0.0;
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::function<std::vector<CheckRecord>()> run;
};

/// The twelve acceptance criteria at their stated tolerances.
const std::vector<Criterion>& acceptance_criteria();

/// Runs one criterion; exceptions become a failed record.
std::vector<CheckRecord> run_criterion(const Criterion& c);

}  // namespace bdsde::tools
