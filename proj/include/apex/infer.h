// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_INFER_H
#define APEX_INFER_H

#include "apex/error.h"
#include "apex/expr.h"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace apex {

using ShapeEnv = std::map<std::string, Dims>;

/// Shape rule for a single node given the shapes of its operands. This is
/// the one place the shape algebra lives; inferShape and the e-graph shape
/// analysis both call it.
AccessPatternShape inferNodeShape(NodeKind kind, const Dims &attrs,
                                  std::span<const AccessPatternShape> operands);

/// Infers using the shapes carried by the Var nodes themselves.
AccessPatternShape inferShape(const Expr &e);

/// Infers with every variable looked up in `env`. Throws UnboundVariable for
/// a missing binding and ShapeMismatch when a Var node disagrees with it.
AccessPatternShape inferShape(const Expr &e, const ShapeEnv &env);

/// Numpy-style broadcast of two plain tensor shapes.
Dims broadcastDims(const Dims &lhs, const Dims &rhs);

struct Diagnostic {
  /// Child-index path from the root, e.g. "root.0.1".
  std::string path;
  ErrorKind kind;
  std::string message;
};

struct WellFormedReport {
  std::vector<Diagnostic> errors;

  bool ok() const { return errors.empty(); }
  std::string toString() const;
};

/// Runs shape inference over every subexpression. Each diagnostic names a
/// node whose operands are well-formed but which itself fails; ancestors of
/// a failing node are not reported again.
WellFormedReport checkWellFormed(const Expr &e);
WellFormedReport checkWellFormed(const Expr &e, const ShapeEnv &env);

} // namespace apex

#endif // APEX_INFER_H
