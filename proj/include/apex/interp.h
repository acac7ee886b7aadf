// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_INTERP_H
#define APEX_INTERP_H

#include "apex/expr.h"
#include "apex/tensor.h"

#include <map>
#include <random>
#include <span>
#include <string>

namespace apex::interp {

template <typename Scalar> using Bindings = std::map<std::string, Tensor<Scalar>>;

/// Reference semantics. The result has shape access ++ compute of
/// inferShape(e). Throws UnboundVariable or ShapeMismatch when a binding is
/// missing or disagrees with its Var declaration.
///
/// dense follows the weight-transposed convention:
///   dense(a, b)[i, j] = sum_k a[i, k] * b[j, k].
template <typename Scalar>
Tensor<Scalar> eval(const Expr &e, const Bindings<Scalar> &bindings);

/// The expression an accelerator call stands for, written over placeholder
/// variables "arg0", "arg1" with the given plain shapes. eval() of an
/// accelerator call is eval() of this expression on the call's operands.
Expr acceleratorReference(NodeKind kind, const Dims &attrs,
                          std::span<const Dims> operandDims);

// Independent nested-loop oracles. None of them goes through eval().

/// R[i, j] = sum_k P[i, k] * Q[k, j].
template <typename Scalar>
Tensor<Scalar> oracleMatmul(const Tensor<Scalar> &p, const Tensor<Scalar> &q);

/// Valid-padding, group=1 convolution of act (N,C,H,W) with wgt (O,C,Kh,Kw).
template <typename Scalar>
Tensor<Scalar> oracleConv2d(const Tensor<Scalar> &act, const Tensor<Scalar> &wgt,
                            int64_t strideH, int64_t strideW);

template <typename Scalar>
Tensor<Scalar> oracleMaxpool(const Tensor<Scalar> &act, int64_t windowH,
                             int64_t windowW, int64_t strideH, int64_t strideW);

/// ||ref - out||_F / ||ref||_F. Throws DivisionByZero for an all-zero ref.
template <typename Scalar>
double frobeniusRelativeError(const Tensor<Scalar> &ref,
                              const Tensor<Scalar> &out);

/// Random integer-valued tensors for every free variable of `e`.
template <typename Scalar>
Bindings<Scalar> randomBindings(const Expr &e, std::mt19937_64 &rng,
                                int64_t lo = -4, int64_t hi = 4);

} // namespace apex::interp

#endif // APEX_INTERP_H
