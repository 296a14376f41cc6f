#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hardy/config.hpp"

namespace hardy {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

/// Verbs, as "group action": tree info, tree muckenhoupt, homog lambda-b,
/// homog groundstate, loop lambda-star, loop figure1, verify hardy,
/// verify homo, verify decomposition, verify loop, verify gauge.
const std::vector<std::string>& verbs();

struct OutputOptions {
  int digits = -1;  // printed precision; -1 selects the verb default
};

/// Runs one verb on a validated configuration.  Reports go to `out`, CSV
/// goes to cfg.out when set and to `out` otherwise.
int run_command(const RunConfig& cfg, const std::string& verb, std::ostream& out,
                std::ostream& err, const OutputOptions& opts = {});

/// Command-line entry point; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hardy
