// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/infer.h"

#include <algorithm>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace apex {

namespace {

std::string kindStr(NodeKind kind) { return std::string(nodeKindName(kind)); }

void requirePositive(NodeKind kind, const Dims &dims) {
  for (int64_t d : dims)
    if (d < 1)
      fail(ErrorKind::InvalidAttribute,
           kindStr(kind) + ": dimensions must be positive, got " +
               dimsToString(dims));
}

void requireDimIndex(NodeKind kind, int64_t dim, size_t rank) {
  if (dim < 0 || static_cast<size_t>(dim) >= rank)
    fail(ErrorKind::DimIndexOutOfRange,
         kindStr(kind) + ": dimension " + std::to_string(dim) +
             " out of range for rank " + std::to_string(rank));
}

void requireRank(NodeKind kind, const Dims &dims, size_t rank,
                 const char *what) {
  if (dims.size() != rank)
    fail(ErrorKind::ShapeMismatch, kindStr(kind) + ": " + what +
                                       " must have rank " +
                                       std::to_string(rank) + ", got " +
                                       dimsToString(dims));
}

AccessPatternShape plain(Dims dims) { return AccessPatternShape({}, std::move(dims)); }

AccessPatternShape denseShape(NodeKind kind, const AccessPatternShape &a,
                              const AccessPatternShape &b) {
  Dims ad = a.dims(), bd = b.dims();
  requireRank(kind, ad, 2, "data operand");
  requireRank(kind, bd, 2, "weight operand");
  if (ad[1] != bd[1])
    fail(ErrorKind::ShapeMismatch, kindStr(kind) + ": reduction dims differ: " +
                                       dimsToString(ad) + " vs " +
                                       dimsToString(bd));
  return plain({ad[0], bd[0]});
}

} // namespace

Dims broadcastDims(const Dims &lhs, const Dims &rhs) {
  size_t rank = std::max(lhs.size(), rhs.size());
  Dims out(rank);
  for (size_t i = 0; i < rank; ++i) {
    int64_t l = i < rank - lhs.size() ? 1 : lhs[i - (rank - lhs.size())];
    int64_t r = i < rank - rhs.size() ? 1 : rhs[i - (rank - rhs.size())];
    if (l != r && l != 1 && r != 1)
      fail(ErrorKind::ShapeMismatch, "add: cannot broadcast " +
                                         dimsToString(lhs) + " with " +
                                         dimsToString(rhs));
    out[i] = std::max(l, r);
  }
  return out;
}

AccessPatternShape inferNodeShape(NodeKind kind, const Dims &attrs,
                                  std::span<const AccessPatternShape> ops) {
  if (ops.size() != nodeArity(kind))
    fail(ErrorKind::ArityError, kindStr(kind) + ": wrong number of operands");
  switch (kind) {
  case NodeKind::Var:
    requirePositive(kind, attrs);
    return plain(attrs);

  case NodeKind::Access: {
    if (attrs.size() != 1)
      fail(ErrorKind::ArityError, "access: expects one index");
    int64_t n = attrs[0];
    if (n < 0 || static_cast<size_t>(n) > ops[0].rank())
      fail(ErrorKind::DimIndexOutOfRange,
           "access: index " + std::to_string(n) + " out of range for rank " +
               std::to_string(ops[0].rank()));
    return AccessPatternShape::split(ops[0].dims(), static_cast<size_t>(n));
  }

  case NodeKind::Transpose: {
    const AccessPatternShape &in = ops[0];
    if (attrs.size() != in.rank())
      fail(ErrorKind::ArityError, "transpose: permutation " +
                                      dimsToString(attrs) +
                                      " does not cover rank " +
                                      std::to_string(in.rank()));
    std::vector<bool> seen(in.rank(), false);
    Dims dims(in.rank());
    for (size_t i = 0; i < attrs.size(); ++i) {
      requireDimIndex(kind, attrs[i], in.rank());
      if (seen[attrs[i]])
        fail(ErrorKind::DimIndexOutOfRange,
             "transpose: " + dimsToString(attrs) + " is not a permutation");
      seen[attrs[i]] = true;
      dims[i] = in.dim(attrs[i]);
    }
    return AccessPatternShape::split(dims, in.access.size());
  }

  case NodeKind::CartProd: {
    const AccessPatternShape &l = ops[0], &r = ops[1];
    if (l.compute != r.compute)
      fail(ErrorKind::ShapeMismatch,
           "cartProd: compute dims differ: " + l.toString() + " vs " +
               r.toString());
    Dims a = l.access;
    a.insert(a.end(), r.access.begin(), r.access.end());
    Dims c{2};
    c.insert(c.end(), l.compute.begin(), l.compute.end());
    return {a, c};
  }

  case NodeKind::Windows: {
    const AccessPatternShape &in = ops[0];
    if (attrs.size() % 2 != 0 || attrs.size() / 2 != in.compute.size())
      fail(ErrorKind::ArityError,
           "windows: window/stride rank must equal compute rank of " +
               in.toString());
    Dims window = windowsWindow(attrs);
    Dims out = windowsOutputDims(in.compute, window, windowsStrides(attrs));
    Dims a = in.access;
    a.insert(a.end(), out.begin(), out.end());
    return {a, window};
  }

  case NodeKind::Slice: {
    if (attrs.size() != 3)
      fail(ErrorKind::ArityError, "slice: expects dim, lo, hi");
    const AccessPatternShape &in = ops[0];
    requireDimIndex(kind, attrs[0], in.rank());
    int64_t lo = attrs[1], hi = attrs[2];
    if (lo < 0 || hi <= lo || hi > in.dim(attrs[0]))
      fail(ErrorKind::DimIndexOutOfRange,
           "slice: bounds [" + std::to_string(lo) + ", " + std::to_string(hi) +
               ") invalid for dimension of size " +
               std::to_string(in.dim(attrs[0])));
    Dims dims = in.dims();
    dims[attrs[0]] = hi - lo;
    return AccessPatternShape::split(dims, in.access.size());
  }

  case NodeKind::Squeeze: {
    if (attrs.size() != 1)
      fail(ErrorKind::ArityError, "squeeze: expects one index");
    const AccessPatternShape &in = ops[0];
    requireDimIndex(kind, attrs[0], in.rank());
    if (in.dim(attrs[0]) != 1)
      fail(ErrorKind::ShapeMismatch,
           "squeeze of non-1 dim " + std::to_string(attrs[0]) + " in " +
               in.toString());
    Dims dims = in.dims();
    dims.erase(dims.begin() + attrs[0]);
    size_t numAccess = in.access.size();
    if (static_cast<size_t>(attrs[0]) < numAccess)
      --numAccess;
    return AccessPatternShape::split(dims, numAccess);
  }

  case NodeKind::Flatten:
    return {{product(ops[0].access)}, {product(ops[0].compute)}};

  case NodeKind::Reshape: {
    AccessPatternShape target = reshapeTarget(attrs);
    requirePositive(kind, target.dims());
    const AccessPatternShape &in = ops[0];
    if (product(in.access) != product(target.access) ||
        product(in.compute) != product(target.compute))
      fail(ErrorKind::ShapeMismatch, "reshape: cannot reshape " +
                                         in.toString() + " to " +
                                         target.toString());
    return target;
  }

  case NodeKind::Pair: {
    if (ops[0] != ops[1])
      fail(ErrorKind::ShapeMismatch, "pair: operand shapes differ: " +
                                         ops[0].toString() + " vs " +
                                         ops[1].toString());
    Dims c{2};
    c.insert(c.end(), ops[0].compute.begin(), ops[0].compute.end());
    return {ops[0].access, c};
  }

  case NodeKind::Concat: {
    if (attrs.size() != 1)
      fail(ErrorKind::ArityError, "concat: expects one dimension");
    const AccessPatternShape &l = ops[0], &r = ops[1];
    if (l.rank() != r.rank() || l.access.size() != r.access.size())
      fail(ErrorKind::ShapeMismatch, "concat: operand ranks differ: " +
                                         l.toString() + " vs " + r.toString());
    requireDimIndex(kind, attrs[0], l.rank());
    Dims dims = l.dims();
    for (size_t i = 0; i < dims.size(); ++i) {
      if (static_cast<int64_t>(i) == attrs[0])
        dims[i] += r.dim(i);
      else if (dims[i] != r.dim(i))
        fail(ErrorKind::ShapeMismatch,
             "concat: operands differ off the concatenation axis: " +
                 l.toString() + " vs " + r.toString());
    }
    return AccessPatternShape::split(dims, l.access.size());
  }

  case NodeKind::Compute: {
    if (attrs.size() != 1 || attrs[0] < 0 || attrs[0] > 2)
      fail(ErrorKind::InvalidAttribute, "compute: unknown operator");
    const AccessPatternShape &in = ops[0];
    if (static_cast<OperatorKind>(attrs[0]) == OperatorKind::DotProd &&
        (in.compute.empty() || in.compute[0] < 2))
      fail(ErrorKind::ArityError,
           "compute dotProd: first compute dim must be a tuple of arity >= 2, "
           "got " + in.toString());
    return {in.access, {}};
  }

  case NodeKind::Dense:
  case NodeKind::VtaDense:
    return denseShape(kind, ops[0], ops[1]);

  case NodeKind::BiasAdd: {
    Dims x = ops[0].dims(), c = ops[1].dims();
    if (x.empty() || c.size() != 1 || c[0] != x.back())
      fail(ErrorKind::ShapeMismatch, "bias_add: bias " + dimsToString(c) +
                                         " does not match last dim of " +
                                         dimsToString(x));
    return plain(x);
  }

  case NodeKind::Add:
    return plain(broadcastDims(ops[0].dims(), ops[1].dims()));

  case NodeKind::ReshapeOp:
    requirePositive(kind, attrs);
    if (product(attrs) != ops[0].elementCount())
      fail(ErrorKind::ShapeMismatch, "reshape_op: cannot reshape " +
                                         dimsToString(ops[0].dims()) +
                                         " to " + dimsToString(attrs));
    return plain(attrs);

  case NodeKind::FlattenOp:
    return plain({ops[0].elementCount()});

  case NodeKind::SystolicArray: {
    if (attrs.size() != 2)
      fail(ErrorKind::ArityError, "systolicArray: expects rows and cols");
    int64_t rows = attrs[0], cols = attrs[1];
    const AccessPatternShape &a = ops[0];
    if (a.access.size() != 1 || a.compute.size() != 1 || a.compute[0] != rows)
      fail(ErrorKind::ShapeMismatch,
           "systolicArray: activations must have shape ((batch), (" +
               std::to_string(rows) + ")), got " + a.toString());
    if (ops[1].dims() != Dims{rows, cols})
      fail(ErrorKind::ShapeMismatch,
           "systolicArray: weights must be " + std::to_string(rows) + "x" +
               std::to_string(cols) + ", got " + ops[1].toString());
    return {{a.access[0], cols}, {}};
  }

  case NodeKind::HlscnnConv2d: {
    if (attrs.size() != 3)
      fail(ErrorKind::ArityError, "hlscnn-conv2d: expects strides and group");
    if (attrs[2] != 1)
      fail(ErrorKind::InvalidAttribute,
           "hlscnn-conv2d: only group=1 is supported");
    Dims act = ops[0].dims(), wgt = ops[1].dims();
    requireRank(kind, act, 4, "activations");
    requireRank(kind, wgt, 4, "weights");
    if (act[1] != wgt[1])
      fail(ErrorKind::ShapeMismatch, "hlscnn-conv2d: channel mismatch " +
                                         dimsToString(act) + " vs " +
                                         dimsToString(wgt));
    Dims spatial = windowsOutputDims(Dims{act[2], act[3]},
                                     Dims{wgt[2], wgt[3]},
                                     Dims{attrs[0], attrs[1]});
    return {{act[0], wgt[0], spatial[0], spatial[1]}, {}};
  }
  }
  fail(ErrorKind::Internal, "unhandled node kind");
}

namespace {

class ShapeInference {
public:
  explicit ShapeInference(const ShapeEnv *env) : env_(env) {}

  const AccessPatternShape &visit(const Expr &e) {
    auto it = cache_.find(e.get());
    if (it != cache_.end())
      return it->second;
    std::vector<AccessPatternShape> ops;
    ops.reserve(e.children().size());
    for (const Expr &c : e.children())
      ops.push_back(visit(c));
    if (e.kind() == NodeKind::Var && env_) {
      auto bound = env_->find(e.name());
      if (bound == env_->end())
        fail(ErrorKind::UnboundVariable, "unbound variable '" + e.name() + "'");
      if (bound->second != e.attrs())
        fail(ErrorKind::ShapeMismatch,
             "variable '" + e.name() + "' declared " +
                 dimsToString(e.attrs()) + " but bound to " +
                 dimsToString(bound->second));
    }
    return cache_.emplace(e.get(), inferNodeShape(e.kind(), e.attrs(), ops))
        .first->second;
  }

private:
  const ShapeEnv *env_;
  std::unordered_map<const ExprNode *, AccessPatternShape> cache_;
};

std::optional<AccessPatternShape> checkNode(const Expr &e, const ShapeEnv *env,
                                            const std::string &path,
                                            WellFormedReport &report) {
  std::vector<AccessPatternShape> ops;
  bool operandsOk = true;
  for (size_t i = 0; i < e.children().size(); ++i) {
    auto s = checkNode(e.child(i), env, path + "." + std::to_string(i), report);
    if (!s)
      operandsOk = false;
    else
      ops.push_back(*s);
  }
  if (!operandsOk)
    return std::nullopt;
  try {
    if (e.kind() == NodeKind::Var && env) {
      ShapeInference single(env);
      return single.visit(e);
    }
    return inferNodeShape(e.kind(), e.attrs(), ops);
  } catch (const Error &err) {
    report.errors.push_back({path, err.kind(), err.what()});
    return std::nullopt;
  }
}

} // namespace

AccessPatternShape inferShape(const Expr &e) {
  ShapeInference inference(nullptr);
  return inference.visit(e);
}

AccessPatternShape inferShape(const Expr &e, const ShapeEnv &env) {
  ShapeInference inference(&env);
  return inference.visit(e);
}

std::string WellFormedReport::toString() const {
  std::ostringstream os;
  for (const Diagnostic &d : errors)
    os << d.path << ": " << errorKindName(d.kind) << ": " << d.message << '\n';
  return os.str();
}

WellFormedReport checkWellFormed(const Expr &e) {
  WellFormedReport report;
  checkNode(e, nullptr, "root", report);
  return report;
}

WellFormedReport checkWellFormed(const Expr &e, const ShapeEnv &env) {
  WellFormedReport report;
  checkNode(e, &env, "root", report);
  return report;
}

} // namespace apex
