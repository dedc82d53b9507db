#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace occutime::cli {

// Exit codes: 0 success (or Markov), 1 not Markov, 2 invalid generator for the
// requested command, 3 malformed input or usage, 4 numerical failure.
enum ExitCode : int {
  kOk = 0,
  kNotMarkov = 1,
  kInvalid = 2,
  kMalformed = 3,
  kNumerical = 4,
};

// Runs one command; `args` excludes the program name. Reads OCCUTIME_SEED
// from the environment when --seed is absent.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace occutime::cli
