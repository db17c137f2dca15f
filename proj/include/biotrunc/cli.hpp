// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

#include "biotrunc/error.hpp"

namespace biotrunc::cli {

/// Process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitCrypto = 3,
  kExitIo = 4,
};

ExitCode exit_code_for(ErrorCode code);

/// Runs the `biotrunc` command line. Reports go to `out`, the resolved
/// configuration and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace biotrunc::cli
