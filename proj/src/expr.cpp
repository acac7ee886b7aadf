// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/expr.h"

#include "apex/error.h"

#include <array>
#include <functional>
#include <set>

namespace apex {

namespace {

struct KindInfo {
  NodeKind kind;
  std::string_view name;
  NodeCategory category;
  size_t arity;
};

constexpr std::array<KindInfo, kNumNodeKinds> kKindTable = {{
    {NodeKind::Var, "var", NodeCategory::Var, 0},
    {NodeKind::Access, "access", NodeCategory::Transformer, 1},
    {NodeKind::Transpose, "transpose", NodeCategory::Transformer, 1},
    {NodeKind::CartProd, "cartProd", NodeCategory::Transformer, 2},
    {NodeKind::Windows, "windows", NodeCategory::Transformer, 1},
    {NodeKind::Slice, "slice", NodeCategory::Transformer, 1},
    {NodeKind::Squeeze, "squeeze", NodeCategory::Transformer, 1},
    {NodeKind::Flatten, "flatten", NodeCategory::Transformer, 1},
    {NodeKind::Reshape, "reshape", NodeCategory::Transformer, 1},
    {NodeKind::Pair, "pair", NodeCategory::Transformer, 2},
    {NodeKind::Concat, "concat", NodeCategory::Transformer, 2},
    {NodeKind::Compute, "compute", NodeCategory::Compute, 1},
    {NodeKind::Dense, "dense", NodeCategory::NamedOp, 2},
    {NodeKind::BiasAdd, "bias_add", NodeCategory::NamedOp, 2},
    {NodeKind::Add, "add", NodeCategory::NamedOp, 2},
    {NodeKind::ReshapeOp, "reshape_op", NodeCategory::NamedOp, 1},
    {NodeKind::FlattenOp, "flatten_op", NodeCategory::NamedOp, 1},
    {NodeKind::SystolicArray, "systolicArray", NodeCategory::AccelCall, 2},
    {NodeKind::VtaDense, "vta-dense", NodeCategory::AccelCall, 2},
    {NodeKind::HlscnnConv2d, "hlscnn-conv2d", NodeCategory::AccelCall, 2},
}};

const KindInfo &info(NodeKind kind) {
  return kKindTable[static_cast<size_t>(kind)];
}

bool equalNodes(const ExprNode *a, const ExprNode *b) {
  if (a == b)
    return true;
  if (!a || !b)
    return false;
  if (a->kind != b->kind || a->name != b->name || a->attrs != b->attrs ||
      a->children.size() != b->children.size())
    return false;
  for (size_t i = 0; i < a->children.size(); ++i)
    if (!equalNodes(a->children[i].get(), b->children[i].get()))
      return false;
  return true;
}

} // namespace

NodeCategory nodeCategory(NodeKind kind) { return info(kind).category; }
std::string_view nodeKindName(NodeKind kind) { return info(kind).name; }
size_t nodeArity(NodeKind kind) { return info(kind).arity; }

std::optional<NodeKind> nodeKindFromName(std::string_view name) {
  for (const KindInfo &k : kKindTable)
    if (k.name == name)
      return k.kind;
  return std::nullopt;
}

std::string_view operatorName(OperatorKind op) {
  switch (op) {
  case OperatorKind::ReduceSum:
    return "reduceSum";
  case OperatorKind::ReduceMax:
    return "reduceMax";
  case OperatorKind::DotProd:
    return "dotProd";
  }
  return "?";
}

std::optional<OperatorKind> operatorFromName(std::string_view name) {
  if (name == "reduceSum")
    return OperatorKind::ReduceSum;
  if (name == "reduceMax")
    return OperatorKind::ReduceMax;
  if (name == "dotProd" || name == "dot-product")
    return OperatorKind::DotProd;
  return std::nullopt;
}

bool operator==(const Expr &lhs, const Expr &rhs) {
  return equalNodes(lhs.get(), rhs.get());
}

size_t hashExpr(const Expr &e) {
  size_t h = std::hash<int>()(static_cast<int>(e.kind()));
  auto mix = [&h](size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(std::hash<std::string>()(e.name()));
  for (int64_t a : e.attrs())
    mix(std::hash<int64_t>()(a));
  for (const Expr &c : e.children())
    mix(hashExpr(c));
  return h;
}

Expr makeExpr(NodeKind kind, std::string name, Dims attrs,
              std::vector<Expr> children) {
  if (children.size() != nodeArity(kind))
    fail(ErrorKind::ArityError,
         std::string(nodeKindName(kind)) + " expects " +
             std::to_string(nodeArity(kind)) + " operands, got " +
             std::to_string(children.size()));
  for (const Expr &c : children)
    if (!c)
      fail(ErrorKind::Internal, "null operand");
  return Expr(std::make_shared<const ExprNode>(
      ExprNode{kind, std::move(name), std::move(attrs), std::move(children)}));
}

Expr var(std::string name, Dims shape) {
  return makeExpr(NodeKind::Var, std::move(name), std::move(shape), {});
}
Expr access(Expr e, int64_t numAccess) {
  return makeExpr(NodeKind::Access, "", {numAccess}, {std::move(e)});
}
Expr transpose(Expr e, Dims perm) {
  return makeExpr(NodeKind::Transpose, "", std::move(perm), {std::move(e)});
}
Expr cartProd(Expr left, Expr right) {
  return makeExpr(NodeKind::CartProd, "", {}, {std::move(left), std::move(right)});
}
Expr windows(Expr e, const Dims &window, const Dims &strides) {
  Dims attrs = window;
  attrs.insert(attrs.end(), strides.begin(), strides.end());
  return makeExpr(NodeKind::Windows, "", std::move(attrs), {std::move(e)});
}
Expr slice(Expr e, int64_t dim, int64_t lo, int64_t hi) {
  return makeExpr(NodeKind::Slice, "", {dim, lo, hi}, {std::move(e)});
}
Expr squeeze(Expr e, int64_t dim) {
  return makeExpr(NodeKind::Squeeze, "", {dim}, {std::move(e)});
}
Expr flatten(Expr e) {
  return makeExpr(NodeKind::Flatten, "", {}, {std::move(e)});
}
Expr reshape(Expr e, const AccessPatternShape &target) {
  return makeExpr(NodeKind::Reshape, "", encodeReshapeTarget(target),
                  {std::move(e)});
}
Expr pair(Expr left, Expr right) {
  return makeExpr(NodeKind::Pair, "", {}, {std::move(left), std::move(right)});
}
Expr concat(Expr left, Expr right, int64_t dim) {
  return makeExpr(NodeKind::Concat, "", {dim},
                  {std::move(left), std::move(right)});
}
Expr compute(OperatorKind op, Expr e) {
  return makeExpr(NodeKind::Compute, "", {static_cast<int64_t>(op)},
                  {std::move(e)});
}
Expr dense(Expr a, Expr b) {
  return makeExpr(NodeKind::Dense, "", {}, {std::move(a), std::move(b)});
}
Expr biasAdd(Expr x, Expr bias) {
  return makeExpr(NodeKind::BiasAdd, "", {}, {std::move(x), std::move(bias)});
}
Expr add(Expr x, Expr y) {
  return makeExpr(NodeKind::Add, "", {}, {std::move(x), std::move(y)});
}
Expr reshapeOp(Expr x, Dims target) {
  return makeExpr(NodeKind::ReshapeOp, "", std::move(target), {std::move(x)});
}
Expr flattenOp(Expr x) {
  return makeExpr(NodeKind::FlattenOp, "", {}, {std::move(x)});
}
Expr systolicArray(int64_t rows, int64_t cols, Expr activations,
                   Expr weights) {
  return makeExpr(NodeKind::SystolicArray, "", {rows, cols},
                  {std::move(activations), std::move(weights)});
}
Expr vtaDense(Expr x, Expr w) {
  return makeExpr(NodeKind::VtaDense, "", {}, {std::move(x), std::move(w)});
}
Expr hlscnnConv2d(Expr act, Expr wgt, int64_t strideH, int64_t strideW,
                  int64_t group) {
  return makeExpr(NodeKind::HlscnnConv2d, "", {strideH, strideW, group},
                  {std::move(act), std::move(wgt)});
}

AccessPatternShape reshapeTarget(const Dims &attrs) {
  if (attrs.empty() || attrs[0] < 0 ||
      static_cast<size_t>(attrs[0]) > attrs.size() - 1)
    fail(ErrorKind::InvalidAttribute, "malformed reshape target");
  return AccessPatternShape::split(std::span(attrs).subspan(1),
                                   static_cast<size_t>(attrs[0]));
}

Dims encodeReshapeTarget(const AccessPatternShape &target) {
  Dims attrs{static_cast<int64_t>(target.access.size())};
  Dims all = target.dims();
  attrs.insert(attrs.end(), all.begin(), all.end());
  return attrs;
}

Dims windowsWindow(const Dims &attrs) {
  return Dims(attrs.begin(), attrs.begin() + attrs.size() / 2);
}

Dims windowsStrides(const Dims &attrs) {
  return Dims(attrs.begin() + attrs.size() / 2, attrs.end());
}

std::vector<std::pair<std::string, Dims>> freeVars(const Expr &e) {
  std::vector<std::pair<std::string, Dims>> out;
  std::set<std::string> seen;
  std::function<void(const Expr &)> visit = [&](const Expr &n) {
    if (n.kind() == NodeKind::Var) {
      if (seen.insert(n.name()).second)
        out.emplace_back(n.name(), n.attrs());
      return;
    }
    for (const Expr &c : n.children())
      visit(c);
  };
  visit(e);
  return out;
}

size_t treeSize(const Expr &e) {
  size_t n = 1;
  for (const Expr &c : e.children())
    n += treeSize(c);
  return n;
}

size_t countKind(const Expr &e, NodeKind kind) {
  size_t n = e.kind() == kind ? 1 : 0;
  for (const Expr &c : e.children())
    n += countKind(c, kind);
  return n;
}

} // namespace apex
