#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qmpemba/config_io.hpp"

namespace qmpemba {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitNumerical = 2,
  kExitIo = 3,
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Invariant battery behind `qmpemba verify`. Never throws: a check that
/// raises is reported as failed with the exception message.
std::vector<CheckResult> run_verify(const ExperimentConfig& cfg);

/// Entry point of the `qmpemba` executable. Summaries go to `out`, logs and
/// errors to `err`; the return value is the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qmpemba
