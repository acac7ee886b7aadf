// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_TEXTIO_H
#define APEX_TEXTIO_H

#include "apex/error.h"
#include "apex/expr.h"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace apex::textio {

/// Byte range [start, end) plus the 1-based line/column of `start`.
struct SourceSpan {
  size_t start = 0;
  size_t end = 0;
  int line = 1;
  int column = 1;
};

class ParseError : public Error {
public:
  ParseError(ErrorKind kind, SourceSpan span, const std::string &message)
      : Error(kind, message), span_(span) {}

  const SourceSpan &span() const { return span_; }

private:
  SourceSpan span_;
};

struct Program {
  /// Declarations in source order.
  std::vector<std::pair<std::string, Dims>> vars;
  Expr expr;
};

/// Parses a .gls program: any number of `(var NAME (shape d...))` headers and
/// exactly one expression. `;` starts a comment that runs to end of line.
/// `dot-product` and `cartesian-product` are accepted as spellings of
/// dotProd and cartProd. `(shape-of e)` in a reshape target is replaced by
/// the inferred shape of e.
Program parse(std::string_view text);

/// Canonical text of an expression. Forms nested more than three levels deep
/// break across lines with a two-space indent per level.
std::string print(const Expr &e);

/// Var declarations for every free variable followed by print(e); parses
/// back to `e`.
std::string printProgram(const Expr &e);

/// The program's declarations in order followed by print(p.expr).
std::string printProgram(const Program &p);

/// JSON form used by `--emit json`.
std::string printJson(const Expr &e);
std::string printJson(const Program &p);

/// "file:line:col: error: message".
std::string formatDiagnostic(std::string_view file, const ParseError &err);

} // namespace apex::textio

#endif // APEX_TEXTIO_H
