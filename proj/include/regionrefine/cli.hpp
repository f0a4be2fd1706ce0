#pragma once

#include <string>
#include <vector>

namespace rr::cli {

// Stable exit-code map, printed by --help.
enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kDecode = 4,
  kBackend = 5,
  kGeometry = 6,  // empty region, bad kernel size, shape mismatch
  kNoSamples = 7,
};

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace rr::cli
