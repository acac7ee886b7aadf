// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_EGRAPH_H
#define APEX_EGRAPH_H

#include "apex/expr.h"
#include "apex/shape.h"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace apex::rewrite {

using ClassId = uint32_t;

/// An operator applied to equivalence classes rather than to terms.
struct ENode {
  NodeKind kind = NodeKind::Var;
  std::string name;
  Dims attrs;
  std::vector<ClassId> children;

  friend bool operator==(const ENode &, const ENode &) = default;
  friend auto operator<=>(const ENode &, const ENode &) = default;
};

struct ENodeHash {
  size_t operator()(const ENode &n) const;
};

struct EClass {
  ClassId id = 0;
  /// Canonical and duplicate-free after rebuild(), sorted.
  std::vector<ENode> nodes;
  AccessPatternShape shape;
};

/// Hash-consed union-find of terms. Every class carries the access-pattern
/// shape shared by all its members; merging classes of different shapes is
/// an internal error, since it means an unsound rewrite.
///
/// Ids are assigned densely in insertion order and the smaller id survives a
/// union, so identical insertion sequences give identical graphs.
class EGraph {
public:
  /// Adds a node whose children are (possibly stale) class ids. Throws the
  /// shape-inference error if the node is ill-formed.
  ClassId add(ENode node);
  ClassId addExpr(const Expr &e);

  ClassId find(ClassId id) const;

  /// Returns true if the two classes were distinct.
  bool merge(ClassId a, ClassId b);

  /// Restores congruence closure and canonical node lists.
  void rebuild();

  const EClass &eclass(ClassId id) const;
  const AccessPatternShape &shape(ClassId id) const { return eclass(id).shape; }

  /// Canonical ids in ascending order.
  std::vector<ClassId> classIds() const;

  std::optional<ClassId> lookup(ENode node) const;

  /// Whether `e` is one of the terms represented by class `id`.
  bool represents(ClassId id, const Expr &e) const;

  size_t numNodes() const { return numNodes_; }
  size_t numClasses() const { return numClasses_; }

  /// Bumped on every new node and every effective merge.
  uint64_t version() const { return version_; }

private:
  ENode canonicalize(ENode node) const;

  mutable std::vector<ClassId> parent_;
  std::vector<EClass> classes_;
  std::unordered_map<ENode, ClassId, ENodeHash> memo_;
  size_t numNodes_ = 0;
  size_t numClasses_ = 0;
  uint64_t version_ = 0;
};

} // namespace apex::rewrite

#endif // APEX_EGRAPH_H
