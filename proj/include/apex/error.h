// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_ERROR_H
#define APEX_ERROR_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace apex {

enum class ErrorKind {
  UnboundVariable,
  DimIndexOutOfRange,
  ShapeMismatch,
  ArityError,
  WindowTooLarge,
  InvalidAttribute,
  DivisionByZero,
  SyntaxError,
  UnknownForm,
  UndeclaredVariable,
  UnknownGroup,
  EmptyClass,
  NoSatisfyingShapes,
  Internal,
};

std::string_view errorKindName(ErrorKind kind);

/// Every failure in the library is reported as an apex::Error carrying a
/// machine-checkable kind. Tests match on kind(), never on message text.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string &message);

} // namespace apex

#endif // APEX_ERROR_H
