#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace relexp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kMissingInput = 3,
  kNoTheory = 4,
  kBelowThreshold = 5,
};

// Entry point without argv[0]: run({"gen", "--concept", "tower", ...}).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Prepends "--key value" pairs read from a flat JSON object, so explicit
// flags given later win.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace relexp::cli
