// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/interp.h"

#include "apex/infer.h"
#include "apex/kernels.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace apex::interp {

namespace {

template <typename Scalar> struct Value {
  Tensor<Scalar> tensor;
  AccessPatternShape shape;
};

/// Builds a tensor of `outShape` where each element is read from `in` at the
/// index produced by `mapIndex(outIndex, inIndex)`.
template <typename Scalar, typename F>
Tensor<Scalar> gather(const Tensor<Scalar> &in, const Dims &outShape,
                      F &&mapIndex) {
  Tensor<Scalar> out(outShape);
  Dims inIndex(in.rank());
  int64_t flat = 0;
  forEachIndex(outShape, [&](std::span<const int64_t> outIndex) {
    mapIndex(outIndex, inIndex);
    out[flat++] = in.at(inIndex);
  });
  return out;
}

template <typename Scalar>
Tensor<Scalar> evalCompute(OperatorKind op, const Tensor<Scalar> &in,
                           const AccessPatternShape &shape) {
  const int64_t outer = product(shape.access);
  const int64_t block = product(shape.compute);
  Tensor<Scalar> out(shape.access);
  for (int64_t a = 0; a < outer; ++a) {
    const Scalar *x = in.data().data() + a * block;
    Scalar acc{};
    switch (op) {
    case OperatorKind::ReduceSum:
      for (int64_t i = 0; i < block; ++i)
        acc += x[i];
      break;
    case OperatorKind::ReduceMax:
      acc = *std::max_element(x, x + block);
      break;
    case OperatorKind::DotProd: {
      const int64_t arity = shape.compute[0];
      const int64_t stride = block / arity;
      for (int64_t r = 0; r < stride; ++r) {
        Scalar prod = x[r];
        for (int64_t t = 1; t < arity; ++t)
          prod *= x[t * stride + r];
        acc += prod;
      }
      break;
    }
    }
    out[a] = acc;
  }
  return out;
}

template <typename Scalar> class Evaluator {
public:
  explicit Evaluator(const Bindings<Scalar> &bindings) : bindings_(bindings) {}

  const Value<Scalar> &visit(const Expr &e) {
    auto it = cache_.find(e.get());
    if (it != cache_.end())
      return it->second;
    std::vector<const Value<Scalar> *> ops;
    std::vector<AccessPatternShape> shapes;
    for (const Expr &c : e.children()) {
      ops.push_back(&visit(c));
      shapes.push_back(ops.back()->shape);
    }
    AccessPatternShape shape = inferNodeShape(e.kind(), e.attrs(), shapes);
    Tensor<Scalar> result = evalNode(e, ops, shape);
    return cache_.emplace(e.get(), Value<Scalar>{std::move(result), shape})
        .first->second;
  }

private:
  Tensor<Scalar> evalNode(const Expr &e,
                          const std::vector<const Value<Scalar> *> &ops,
                          const AccessPatternShape &shape) {
    const Dims &attrs = e.attrs();
    const Dims outDims = shape.dims();
    switch (e.kind()) {
    case NodeKind::Var: {
      auto bound = bindings_.find(e.name());
      if (bound == bindings_.end())
        fail(ErrorKind::UnboundVariable, "no tensor bound to '" + e.name() + "'");
      if (bound->second.shape() != attrs)
        fail(ErrorKind::ShapeMismatch,
             "tensor bound to '" + e.name() + "' has shape " +
                 dimsToString(bound->second.shape()) + ", declared " +
                 dimsToString(attrs));
      return bound->second;
    }

    case NodeKind::Access:
    case NodeKind::Squeeze:
    case NodeKind::Flatten:
    case NodeKind::Reshape:
    case NodeKind::ReshapeOp:
    case NodeKind::FlattenOp:
      return ops[0]->tensor.reshaped(outDims);

    case NodeKind::Transpose:
      return gather(ops[0]->tensor, outDims,
                    [&](std::span<const int64_t> out, Dims &in) {
                      for (size_t k = 0; k < attrs.size(); ++k)
                        in[attrs[k]] = out[k];
                    });

    case NodeKind::CartProd: {
      const Tensor<Scalar> &l = ops[0]->tensor, &r = ops[1]->tensor;
      const int64_t numL = product(ops[0]->shape.access);
      const int64_t numR = product(ops[1]->shape.access);
      const int64_t block = product(ops[0]->shape.compute);
      Tensor<Scalar> out(outDims);
      int64_t flat = 0;
      for (int64_t a = 0; a < numL; ++a)
        for (int64_t b = 0; b < numR; ++b) {
          for (int64_t c = 0; c < block; ++c)
            out[flat++] = l[a * block + c];
          for (int64_t c = 0; c < block; ++c)
            out[flat++] = r[b * block + c];
        }
      return out;
    }

    case NodeKind::Pair: {
      const Tensor<Scalar> &l = ops[0]->tensor, &r = ops[1]->tensor;
      const int64_t outer = product(ops[0]->shape.access);
      const int64_t block = product(ops[0]->shape.compute);
      Tensor<Scalar> out(outDims);
      int64_t flat = 0;
      for (int64_t a = 0; a < outer; ++a) {
        for (int64_t c = 0; c < block; ++c)
          out[flat++] = l[a * block + c];
        for (int64_t c = 0; c < block; ++c)
          out[flat++] = r[a * block + c];
      }
      return out;
    }

    case NodeKind::Windows: {
      const AccessPatternShape &in = ops[0]->shape;
      const size_t numAccess = in.access.size();
      const size_t n = in.compute.size();
      const Dims strides = windowsStrides(attrs);
      return gather(ops[0]->tensor, outDims,
                    [&](std::span<const int64_t> out, Dims &idx) {
                      for (size_t i = 0; i < numAccess; ++i)
                        idx[i] = out[i];
                      for (size_t i = 0; i < n; ++i)
                        idx[numAccess + i] = out[numAccess + i] * strides[i] +
                                             out[numAccess + n + i];
                    });
    }

    case NodeKind::Slice: {
      const int64_t dim = attrs[0], lo = attrs[1];
      return gather(ops[0]->tensor, outDims,
                    [&](std::span<const int64_t> out, Dims &in) {
                      std::copy(out.begin(), out.end(), in.begin());
                      in[dim] += lo;
                    });
    }

    case NodeKind::Concat: {
      const int64_t dim = attrs[0];
      const Tensor<Scalar> &l = ops[0]->tensor, &r = ops[1]->tensor;
      const int64_t split = l.shape()[dim];
      Tensor<Scalar> out(outDims);
      Dims in(outDims.size());
      int64_t flat = 0;
      forEachIndex(outDims, [&](std::span<const int64_t> idx) {
        std::copy(idx.begin(), idx.end(), in.begin());
        if (idx[dim] < split) {
          out[flat++] = l.at(in);
        } else {
          in[dim] -= split;
          out[flat++] = r.at(in);
        }
      });
      return out;
    }

    case NodeKind::Compute:
      return evalCompute(static_cast<OperatorKind>(attrs[0]), ops[0]->tensor,
                         ops[0]->shape);

    case NodeKind::Dense: {
      const Tensor<Scalar> &a = ops[0]->tensor, &b = ops[1]->tensor;
      const int64_t m = a.shape()[0], k = a.shape()[1], o = b.shape()[0];
      Tensor<Scalar> out(Dims{m, o});
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < o; ++j) {
          Scalar acc{};
          for (int64_t x = 0; x < k; ++x)
            acc += a[i * k + x] * b[j * k + x];
          out[i * o + j] = acc;
        }
      return out;
    }

    case NodeKind::BiasAdd: {
      Tensor<Scalar> out = ops[0]->tensor.reshaped(outDims);
      const Tensor<Scalar> &bias = ops[1]->tensor;
      for (int64_t i = 0; i < out.size(); ++i)
        out[i] += bias[i % bias.size()];
      return out;
    }

    case NodeKind::Add: {
      const Tensor<Scalar> &l = ops[0]->tensor, &r = ops[1]->tensor;
      auto broadcastIndex = [&outDims](const Tensor<Scalar> &t,
                                       std::span<const int64_t> idx) {
        const size_t lead = outDims.size() - t.rank();
        int64_t flat = 0;
        for (size_t i = 0; i < t.rank(); ++i)
          flat = flat * t.shape()[i] +
                 (t.shape()[i] == 1 ? 0 : idx[lead + i]);
        return flat;
      };
      Tensor<Scalar> out(outDims);
      int64_t flat = 0;
      forEachIndex(outDims, [&](std::span<const int64_t> idx) {
        out[flat++] = l[broadcastIndex(l, idx)] + r[broadcastIndex(r, idx)];
      });
      return out;
    }

    case NodeKind::SystolicArray:
    case NodeKind::VtaDense:
    case NodeKind::HlscnnConv2d: {
      std::vector<Dims> operandDims;
      Bindings<Scalar> args;
      for (size_t i = 0; i < ops.size(); ++i) {
        operandDims.push_back(ops[i]->tensor.shape());
        args.emplace("arg" + std::to_string(i), ops[i]->tensor);
      }
      Expr reference = acceleratorReference(e.kind(), attrs, operandDims);
      return eval<Scalar>(reference, args);
    }
    }
    fail(ErrorKind::Internal, "unhandled node kind in eval");
  }

  const Bindings<Scalar> &bindings_;
  std::unordered_map<const ExprNode *, Value<Scalar>> cache_;
};

} // namespace

Expr acceleratorReference(NodeKind kind, const Dims &attrs,
                          std::span<const Dims> operandDims) {
  if (operandDims.size() != 2)
    fail(ErrorKind::ArityError, "accelerator calls take two operands");
  Expr arg0 = var("arg0", operandDims[0]);
  Expr arg1 = var("arg1", operandDims[1]);
  switch (kind) {
  case NodeKind::SystolicArray:
    // Undo the transposed weight layout and multiply as the rewrite's LHS.
    return matmulTerm(arg0, arg1);
  case NodeKind::VtaDense:
    return dense(arg0, arg1);
  case NodeKind::HlscnnConv2d:
    if (attrs.size() != 3)
      fail(ErrorKind::ArityError, "hlscnn-conv2d: expects strides and group");
    return conv2dTerm(arg0, arg1, attrs[0], attrs[1]);
  default:
    fail(ErrorKind::Internal, "not an accelerator call");
  }
}

template <typename Scalar>
Tensor<Scalar> eval(const Expr &e, const Bindings<Scalar> &bindings) {
  Evaluator<Scalar> evaluator(bindings);
  return evaluator.visit(e).tensor;
}

template <typename Scalar>
Tensor<Scalar> oracleMatmul(const Tensor<Scalar> &p, const Tensor<Scalar> &q) {
  if (p.rank() != 2 || q.rank() != 2 || p.shape()[1] != q.shape()[0])
    fail(ErrorKind::ShapeMismatch, "matmul: incompatible shapes " +
                                       dimsToString(p.shape()) + " and " +
                                       dimsToString(q.shape()));
  const int64_t m = p.shape()[0], n = p.shape()[1], o = q.shape()[1];
  Tensor<Scalar> r(Dims{m, o});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < o; ++j)
      for (int64_t k = 0; k < n; ++k)
        r.at({i, j}) += p.at({i, k}) * q.at({k, j});
  return r;
}

template <typename Scalar>
Tensor<Scalar> oracleConv2d(const Tensor<Scalar> &act, const Tensor<Scalar> &wgt,
                            int64_t strideH, int64_t strideW) {
  if (act.rank() != 4 || wgt.rank() != 4 || act.shape()[1] != wgt.shape()[1])
    fail(ErrorKind::ShapeMismatch, "conv2d: incompatible shapes " +
                                       dimsToString(act.shape()) + " and " +
                                       dimsToString(wgt.shape()));
  const int64_t n = act.shape()[0], c = act.shape()[1];
  const int64_t o = wgt.shape()[0], kh = wgt.shape()[2], kw = wgt.shape()[3];
  Dims spatial = windowsOutputDims(Dims{act.shape()[2], act.shape()[3]},
                                   Dims{kh, kw}, Dims{strideH, strideW});
  Tensor<Scalar> out(Dims{n, o, spatial[0], spatial[1]});
  for (int64_t b = 0; b < n; ++b)
    for (int64_t f = 0; f < o; ++f)
      for (int64_t x = 0; x < spatial[0]; ++x)
        for (int64_t y = 0; y < spatial[1]; ++y) {
          Scalar acc{};
          for (int64_t dx = 0; dx < kh; ++dx)
            for (int64_t dy = 0; dy < kw; ++dy)
              for (int64_t ch = 0; ch < c; ++ch)
                acc += act.at({b, ch, strideH * x + dx, strideW * y + dy}) *
                       wgt.at({f, ch, dx, dy});
          out.at({b, f, x, y}) = acc;
        }
  return out;
}

template <typename Scalar>
Tensor<Scalar> oracleMaxpool(const Tensor<Scalar> &act, int64_t windowH,
                             int64_t windowW, int64_t strideH, int64_t strideW) {
  if (act.rank() != 4)
    fail(ErrorKind::ShapeMismatch,
         "maxpool: activations must be 4-d, got " + dimsToString(act.shape()));
  const int64_t n = act.shape()[0], c = act.shape()[1];
  Dims spatial = windowsOutputDims(Dims{act.shape()[2], act.shape()[3]},
                                   Dims{windowH, windowW},
                                   Dims{strideH, strideW});
  Tensor<Scalar> out(Dims{n, c, spatial[0], spatial[1]});
  for (int64_t b = 0; b < n; ++b)
    for (int64_t ch = 0; ch < c; ++ch)
      for (int64_t x = 0; x < spatial[0]; ++x)
        for (int64_t y = 0; y < spatial[1]; ++y) {
          Scalar best = act.at({b, ch, strideH * x, strideW * y});
          for (int64_t dx = 0; dx < windowH; ++dx)
            for (int64_t dy = 0; dy < windowW; ++dy)
              best = std::max(best,
                              act.at({b, ch, strideH * x + dx, strideW * y + dy}));
          out.at({b, ch, x, y}) = best;
        }
  return out;
}

template <typename Scalar>
double frobeniusRelativeError(const Tensor<Scalar> &ref,
                              const Tensor<Scalar> &out) {
  if (ref.shape() != out.shape())
    fail(ErrorKind::ShapeMismatch, "error metric: shapes differ " +
                                       dimsToString(ref.shape()) + " vs " +
                                       dimsToString(out.shape()));
  double diff = 0.0, norm = 0.0;
  for (int64_t i = 0; i < ref.size(); ++i) {
    const double r = static_cast<double>(ref[i]);
    const double d = r - static_cast<double>(out[i]);
    diff += d * d;
    norm += r * r;
  }
  if (norm == 0.0)
    fail(ErrorKind::DivisionByZero,
         "error metric: reference tensor is all zeros");
  return std::sqrt(diff) / std::sqrt(norm);
}

template <typename Scalar>
Bindings<Scalar> randomBindings(const Expr &e, std::mt19937_64 &rng,
                                int64_t lo, int64_t hi) {
  Bindings<Scalar> out;
  for (const auto &[name, dims] : freeVars(e))
    out.emplace(name, randomTensor<Scalar>(dims, rng, lo, hi));
  return out;
}

#define APEX_INSTANTIATE(Scalar)                                               \
  template Tensor<Scalar> eval(const Expr &, const Bindings<Scalar> &);        \
  template Tensor<Scalar> oracleMatmul(const Tensor<Scalar> &,                 \
                                       const Tensor<Scalar> &);                \
  template Tensor<Scalar> oracleConv2d(const Tensor<Scalar> &,                 \
                                       const Tensor<Scalar> &, int64_t,        \
                                       int64_t);                               \
  template Tensor<Scalar> oracleMaxpool(const Tensor<Scalar> &, int64_t,       \
                                        int64_t, int64_t, int64_t);            \
  template double frobeniusRelativeError(const Tensor<Scalar> &,               \
                                         const Tensor<Scalar> &);              \
  template Bindings<Scalar> randomBindings(const Expr &, std::mt19937_64 &,    \
                                           int64_t, int64_t);

APEX_INSTANTIATE(int64_t)
APEX_INSTANTIATE(double)

#undef APEX_INSTANTIATE

} // namespace apex::interp
