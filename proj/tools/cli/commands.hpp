#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srlab::cli {

/// Runs `srlab <command> [flags]` with `args` excluding the program name.
/// Commands: prepare, train, sr, eval, filters, curve.
/// Returns 0 on success, 1 for usage and configuration errors, 2 for data
/// errors (unreadable or unusable inputs) and 3 for I/O failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srlab::cli
