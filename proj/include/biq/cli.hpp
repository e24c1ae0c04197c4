#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biq {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,    // validation, configuration, parse or I/O error
  kExitPartial = 2,    // more prompts failed than the failure threshold allows
  kExitTransport = 3,  // the model endpoint could not be reached or kept failing
};

/// Runs one CLI invocation. Data goes to `out` or to --out files, diagnostics
/// to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biq
