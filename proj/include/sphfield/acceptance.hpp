#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace sphfield {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int max_workers = 0;       // 0: max(hardware concurrency, 4)
  std::vector<int> only;     // empty: run all
  std::ostream* log = nullptr;
};

/// Runs the property suite (criteria 1-11). Each result line is also
/// written to options.log as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

std::string format_result(const CriterionResult& r);

}  // namespace sphfield
