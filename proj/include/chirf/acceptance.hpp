#ifndef CHIRF_ACCEPTANCE_HPP
#define CHIRF_ACCEPTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace chirf::acceptance {

struct CriterionResult {
  std::string id;
  bool pass = false;
  bool ran = true;  // quick mode skips the long-running criteria
  std::string detail;
  double seconds = 0.0;
};

struct Config {
  bool quick = false;  // A1-A3 and A5 at reduced scale; skips A4/A6/A7
  std::uint64_t seed = 20250810;
  int threads = 1;
};

// Runs the acceptance criteria in order and returns one result per
// criterion.  Every tolerance is fixed here, in code.
std::vector<CriterionResult> run_acceptance(const Config& cfg);

// True when every executed criterion passed.
bool all_passed(const std::vector<CriterionResult>& results);

// One "Axx PASS/FAIL detail" line per criterion.
std::string render_report(const std::vector<CriterionResult>& results);

}  // namespace chirf::acceptance

#endif
