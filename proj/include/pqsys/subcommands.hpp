#pragma once

#include "pqsys/config.hpp"

#include <string>

namespace pqsys {

/// Exit-code contract shared by the CLI and tests.
enum ExitCode : int {
  EXIT_OK = 0,
  EXIT_PARSE = 1,
  EXIT_HYPOTHESIS = 2,
  EXIT_SOLVER = 3,
  EXIT_IO = 4,
};

/// Runs one of `mesh`, `eigen`, `check`, `solve`, `probe` against a parsed
/// config, writing artifacts into config.output_directory (atomically:
/// temp file + rename) and summary CSV to stdout.
int run_subcommand(const std::string& name, const RunConfig& config);

/// Atomic text-file write (temp + rename); throws on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace pqsys
