#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace playerkern::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
  kNumericalError = 3,
};

// Subcommands: train, predict, evaluate, simulate, heatmap, elo-fit.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace playerkern::cli
