#ifndef FMATCH_CLI_HPP
#define FMATCH_CLI_HPP

#include <string>
#include <vector>

namespace fmatch {

/// Command-line entry point (subcommands: validate, build-sample, frontier,
/// estimate, describe, simulate, run). Exit codes: 0 success, 1 config
/// error, 2 data error, 3 partial cell failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace fmatch

#endif  // FMATCH_CLI_HPP
