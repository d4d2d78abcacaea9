#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace harness {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  std::vector<std::string> diagnostics;
};

struct AcceptanceOptions {
  std::vector<int> only;        // empty: all ten
  bool so4_stretch = true;      // run the SO4 trajectory stretch target of criterion 9
  std::string cache_dir;        // period cache; empty disables it
};

/// Runs the acceptance criteria in order, printing one line per criterion to
/// `out` as it finishes, followed by indented diagnostics.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& out);

std::string format_result(const CriterionResult& r);

}  // namespace harness
