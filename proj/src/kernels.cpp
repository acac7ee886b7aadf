// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/kernels.h"

#include "apex/error.h"
#include "apex/infer.h"

namespace apex {

namespace {

Dims plainDims(const Expr &e, size_t rank, const char *what) {
  Dims dims = inferShape(e).dims();
  if (dims.size() != rank)
    fail(ErrorKind::ShapeMismatch, std::string(what) + " must have rank " +
                                       std::to_string(rank) + ", got " +
                                       dimsToString(dims));
  return dims;
}

} // namespace

Expr conv2dTerm(const Expr &act, const Expr &wgt, int64_t strideH,
                int64_t strideW) {
  Dims a = plainDims(act, 4, "conv2d activations");
  Dims w = plainDims(wgt, 4, "conv2d weights");
  return transpose(
      squeeze(compute(OperatorKind::DotProd,
                      cartProd(windows(access(act, 1), {a[1], w[2], w[3]},
                                       {1, strideH, strideW}),
                               access(wgt, 1))),
              1),
      {0, 3, 1, 2});
}

Expr matmulTerm(const Expr &p, const Expr &q) {
  plainDims(p, 2, "matmul lhs");
  plainDims(q, 2, "matmul rhs");
  return compute(OperatorKind::DotProd,
                 cartProd(access(p, 1), transpose(access(q, 1), {1, 0})));
}

Expr maxpoolTerm(const Expr &act, int64_t windowH, int64_t windowW,
                 int64_t strideH, int64_t strideW) {
  plainDims(act, 4, "maxpool activations");
  return compute(OperatorKind::ReduceMax,
                 windows(access(act, 2), {windowH, windowW}, {strideH, strideW}));
}

} // namespace apex
