// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_EXPR_H
#define APEX_EXPR_H

#include "apex/shape.h"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace apex {

/// Every node kind of the IR. Named kernel ops and accelerator calls are
/// flattened into this enum; nodeCategory() recovers the grouping.
enum class NodeKind : uint8_t {
  Var,
  // Access-pattern transformers.
  Access,
  Transpose,
  CartProd,
  Windows,
  Slice,
  Squeeze,
  Flatten,
  Reshape,
  Pair,
  Concat,
  // Operator application.
  Compute,
  // Named kernel ops over plain tensors.
  Dense,
  BiasAdd,
  Add,
  ReshapeOp,
  FlattenOp,
  // Accelerator calls.
  SystolicArray,
  VtaDense,
  HlscnnConv2d,
};

inline constexpr int kNumNodeKinds = 20;

enum class NodeCategory { Var, Transformer, Compute, NamedOp, AccelCall };

enum class OperatorKind : int64_t { ReduceSum = 0, ReduceMax = 1, DotProd = 2 };

NodeCategory nodeCategory(NodeKind kind);
/// Surface-syntax head symbol, e.g. "cartProd" or "vta-dense".
std::string_view nodeKindName(NodeKind kind);
std::optional<NodeKind> nodeKindFromName(std::string_view name);
/// Number of expression children the kind takes.
size_t nodeArity(NodeKind kind);

std::string_view operatorName(OperatorKind op);
std::optional<OperatorKind> operatorFromName(std::string_view name);

class Expr;

/// Attribute encoding per kind:
///   Var: name + attrs = tensor shape      Access: {numAccess}
///   Transpose: permutation                Windows: window ++ strides
///   Slice: {dim, lo, hi}                  Squeeze / Concat: {dim}
///   Reshape: {numAccess, dims...}         Compute: {OperatorKind}
///   ReshapeOp: target dims                SystolicArray: {rows, cols}
///   HlscnnConv2d: {strideH, strideW, group}
struct ExprNode {
  NodeKind kind;
  std::string name;
  Dims attrs;
  std::vector<Expr> children;
};

/// Immutable, cheaply copyable handle to an expression tree. Subtrees may
/// be shared; equality is structural.
class Expr {
public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  NodeKind kind() const { return node_->kind; }
  const std::string &name() const { return node_->name; }
  const Dims &attrs() const { return node_->attrs; }
  const std::vector<Expr> &children() const { return node_->children; }
  const Expr &child(size_t i) const { return node_->children.at(i); }
  const ExprNode *get() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

  friend bool operator==(const Expr &lhs, const Expr &rhs);

private:
  std::shared_ptr<const ExprNode> node_;
};

size_t hashExpr(const Expr &e);

Expr makeExpr(NodeKind kind, std::string name, Dims attrs,
              std::vector<Expr> children);

Expr var(std::string name, Dims shape);
Expr access(Expr e, int64_t numAccess);
Expr transpose(Expr e, Dims perm);
Expr cartProd(Expr left, Expr right);
Expr windows(Expr e, const Dims &window, const Dims &strides);
Expr slice(Expr e, int64_t dim, int64_t lo, int64_t hi);
Expr squeeze(Expr e, int64_t dim);
Expr flatten(Expr e);
Expr reshape(Expr e, const AccessPatternShape &target);
Expr pair(Expr left, Expr right);
Expr concat(Expr left, Expr right, int64_t dim);
Expr compute(OperatorKind op, Expr e);
Expr dense(Expr a, Expr b);
Expr biasAdd(Expr x, Expr bias);
Expr add(Expr x, Expr y);
Expr reshapeOp(Expr x, Dims target);
Expr flattenOp(Expr x);
Expr systolicArray(int64_t rows, int64_t cols, Expr activations, Expr weights);
Expr vtaDense(Expr x, Expr w);
Expr hlscnnConv2d(Expr act, Expr wgt, int64_t strideH, int64_t strideW,
                  int64_t group = 1);

// Attribute decoders.
AccessPatternShape reshapeTarget(const Dims &attrs);
Dims encodeReshapeTarget(const AccessPatternShape &target);
Dims windowsWindow(const Dims &attrs);
Dims windowsStrides(const Dims &attrs);

/// Free variables in first-appearance (pre-order) order.
std::vector<std::pair<std::string, Dims>> freeVars(const Expr &e);
/// Tree size, counting shared subtrees once per occurrence.
size_t treeSize(const Expr &e);
size_t countKind(const Expr &e, NodeKind kind);

} // namespace apex

#endif // APEX_EXPR_H
