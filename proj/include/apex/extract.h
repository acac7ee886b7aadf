// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_EXTRACT_H
#define APEX_EXTRACT_H

#include "apex/egraph.h"
#include "apex/expr.h"
#include "apex/saturate.h"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace apex::rewrite {

/// Per-category node weights. reshape_op and flatten_op are layout changes
/// and weigh as transformers; dense, bias_add and add weigh `named`. A
/// compute node weighs its operator's override if set, else `compute`.
struct CostModel {
  uint64_t accel = 1;
  uint64_t compute = 1000;
  uint64_t named = 1000;
  uint64_t transformer = 1;
  uint64_t var = 0;
  std::optional<uint64_t> reduceSum;
  std::optional<uint64_t> reduceMax;
  std::optional<uint64_t> dotProd;

  uint64_t nodeCost(NodeKind kind, const Dims &attrs = {}) const;

  /// "accel=1,compute=1000,named=1000,transformer=1,var=0", plus optional
  /// reduceSum=, reduceMax=, dotProd= overrides; omitted keys keep their
  /// defaults. Throws InvalidAttribute on a bad key or value, or if accel is
  /// not cheaper than compute.
  static CostModel parse(std::string_view text);
  std::string toString() const;
};

/// Sum of node costs over `e` as a tree.
uint64_t termCost(const Expr &e, const CostModel &cost);

/// Cheapest term of class `id`. Ties go to fewer nodes, then to the smaller
/// node in (kind, name, attrs, child class ids) order. Throws EmptyClass if
/// the class has no finite term.
Expr extractClass(const EGraph &g, ClassId id, const CostModel &cost);

Expr extract(const EquivalenceState &state, const CostModel &cost = {});

} // namespace apex::rewrite

#endif // APEX_EXTRACT_H
