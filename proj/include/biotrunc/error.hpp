// Copyright 2026 The biotrunc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace biotrunc {

enum class ErrorCode {
  kInvalidArgument,
  kKindMismatch,
  kDimensionMismatch,
  kDegenerate,
  kUnreachable,
  kKeyMismatch,
  kCrypto,
  kIo,
  kNotTemplateFile,
  kVersionMismatch,
  kTruncatedFile,
  kCountMismatch,
};

std::string_view to_string(ErrorCode code);

/// Every library failure is reported as an Error carrying a stable code; the
/// CLI maps codes onto process exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace biotrunc
