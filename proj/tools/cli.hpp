// SPDX-License-Identifier: Apache-2.0
//
// Batch front end. Subcommands: mesh, check, eigs, weyl, resolvent, trace,
// oracle. Exit codes: 0 success, 1 analysis failure, 2 usage or config error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tevlab::cli {

enum ExitCode : int { kSuccess = 0, kAnalysisFailure = 1, kUsageError = 2 };

/// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes `content` to dir/name through a temporary file and a rename.
void write_atomic(const std::string& dir, const std::string& name, const std::string& content);

}  // namespace tevlab::cli
