// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_KERNELS_H
#define APEX_KERNELS_H

#include "apex/expr.h"

namespace apex {

// Common kernels written as access-pattern terms. Operand dimensions are read
// from the operands' inferred shapes.

/// act (N, C, H, W), wgt (O, C, Kh, Kw) -> (N, O, H', W'). Valid padding.
Expr conv2dTerm(const Expr &act, const Expr &wgt, int64_t strideH,
                int64_t strideW);

/// p (M, N), q (N, O) -> (M, O).
Expr matmulTerm(const Expr &p, const Expr &q);

/// act (N, C, H, W) -> (N, C, H', W').
Expr maxpoolTerm(const Expr &act, int64_t windowH, int64_t windowW,
                 int64_t strideH, int64_t strideW);

} // namespace apex

#endif // APEX_KERNELS_H
