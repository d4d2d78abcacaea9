#pragma once

#include <iosfwd>
#include <string>

#include "harness/config.hpp"
#include "harness/serialize.hpp"

namespace harness {

/// 0 success, 2 config error, 3 numerical failure, 4 geometry degeneracy.
int exit_code(const std::exception& e);

/// Each command prints a short report to `log`, writes its artifacts under
/// cfg.output_dir and returns the summary it wrote.
json cmd_structure(const ExperimentConfig& cfg, std::ostream& log);
json cmd_periods(const ExperimentConfig& cfg, std::ostream& log);
json cmd_trajectory(const ExperimentConfig& cfg, Method method, std::ostream& log);

/// Tolerances as written into every emitted table.
json tolerance_json(const ExperimentConfig& cfg);
std::string tolerance_comment(const ExperimentConfig& cfg);

}  // namespace harness
