// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "apex/interp.h"
#include "apex/kernels.h"
#include "support.h"

using namespace apex;
using interp::Bindings;
using interp::eval;

namespace {

int64_t draw(std::mt19937_64 &rng, int64_t lo, int64_t hi) {
  return std::uniform_int_distribution<int64_t>(lo, hi)(rng);
}

template <typename F> ErrorKind errorOf(F &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Internal;
}

} // namespace

TEST_CASE("matmul example") {
  IntTensor p({2, 2}, {1, 2, 3, 4}), q({2, 2}, {5, 6, 7, 8});
  Expr e = matmulTerm(var("P", {2, 2}), var("Q", {2, 2}));
  IntTensor want({2, 2}, {19, 22, 43, 50});
  CHECK(eval<int64_t>(e, {{"P", p}, {"Q", q}}) == want);
  CHECK(interp::oracleMatmul(p, q) == want);
}

TEST_CASE("matmul oracle trivia") {
  IntTensor id({2, 2}, {1, 0, 0, 1}), q({2, 3}, {1, -2, 3, 4, 5, -6});
  CHECK(interp::oracleMatmul(id, q) == q);
  CHECK(interp::oracleMatmul(IntTensor({1, 1}, {7}), IntTensor({1, 1}, {-3})) ==
        IntTensor({1, 1}, {-21}));
  CHECK(errorOf([&] { interp::oracleMatmul(q, q); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("reshape of flatten restores the input") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    Dims d{draw(rng, 1, 4), draw(rng, 1, 4), draw(rng, 1, 4)};
    Expr x = access(var("x", d), draw(rng, 0, 3));
    Expr r = reshape(flatten(x), inferShape(x));
    Bindings<int64_t> b{{"x", randomTensor<int64_t>(d, rng)}};
    CHECK(eval<int64_t>(r, b) == eval<int64_t>(x, b));
    CHECK(eval<int64_t>(x, b) == b.at("x"));
  }
}

TEST_CASE("maxpool examples") {
  IntTensor act({1, 1, 2, 2}, {1, 2, 3, 4});
  IntTensor want({1, 1, 1, 1}, {4});
  CHECK(eval<int64_t>(maxpoolTerm(var("act", {1, 1, 2, 2}), 2, 2, 1, 1),
                      {{"act", act}}) == want);
  CHECK(interp::oracleMaxpool(act, 2, 2, 1, 1) == want);

  IntTensor constant({1, 2, 4, 4}, int64_t{7});
  CHECK(interp::oracleMaxpool(constant, 3, 2, 1, 1) == IntTensor({1, 2, 2, 3}, int64_t{7}));

  std::mt19937_64 rng(1);
  IntTensor r = randomTensor<int64_t>({2, 3, 4, 5}, rng);
  CHECK(interp::oracleMaxpool(r, 1, 1, 1, 1) == r);
  CHECK(errorOf([&] { interp::oracleMaxpool(r, 5, 1, 1, 1); }) ==
        ErrorKind::WindowTooLarge);
}

TEST_CASE("conv2d oracle examples") {
  IntTensor ones({1, 1, 3, 3}, int64_t{1});
  CHECK(interp::oracleConv2d(ones, ones, 1, 1) == IntTensor({1, 1, 1, 1}, {9}));
  CHECK(eval<int64_t>(conv2dTerm(var("a", {1, 1, 3, 3}), var("w", {1, 1, 3, 3}), 1, 1),
                      {{"a", ones}, {"w", ones}}) == IntTensor({1, 1, 1, 1}, {9}));

  // A 1x1 kernel over one channel scales every pixel.
  std::mt19937_64 rng(2);
  IntTensor act = randomTensor<int64_t>({2, 1, 3, 4}, rng);
  IntTensor out = interp::oracleConv2d(act, IntTensor({1, 1, 1, 1}, {3}), 1, 1);
  REQUIRE(out.shape() == act.shape());
  for (int64_t i = 0; i < act.size(); ++i)
    CHECK(out[i] == 3 * act[i]);

  CHECK(errorOf([&] { interp::oracleConv2d(act, IntTensor({1, 2, 1, 1}), 1, 1); }) ==
        ErrorKind::ShapeMismatch);
  CHECK(errorOf([&] { interp::oracleConv2d(act, IntTensor({1, 1, 4, 1}), 1, 1); }) ==
        ErrorKind::WindowTooLarge);
}

TEST_CASE("frobenius relative error") {
  RealTensor a({2}, {3.0, 4.0});
  CHECK(interp::frobeniusRelativeError(a, a) == 0.0);
  CHECK(interp::frobeniusRelativeError(a, RealTensor({2}, {0.0, 0.0})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(interp::frobeniusRelativeError(RealTensor({2}, {1.0, 0.0}),
                                       RealTensor({2}, {1.0, 1.0})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(errorOf([] {
          interp::frobeniusRelativeError(RealTensor({2}, {0.0, 0.0}),
                                         RealTensor({2}, {1.0, 1.0}));
        }) == ErrorKind::DivisionByZero);
  CHECK(errorOf([&] { interp::frobeniusRelativeError(a, RealTensor({3})); }) ==
        ErrorKind::ShapeMismatch);
}

TEST_CASE("kernel terms agree with the oracles on random inputs") {
  std::mt19937_64 rng(20261016);
  for (int i = 0; i < 100; ++i) {
    int64_t n = draw(rng, 1, 6), c = draw(rng, 1, 6), h = draw(rng, 1, 6),
            w = draw(rng, 1, 6), o = draw(rng, 1, 6);
    int64_t kh = draw(rng, 1, h), kw = draw(rng, 1, w);
    int64_t sh = draw(rng, 1, 3), sw = draw(rng, 1, 3);
    IntTensor act = randomTensor<int64_t>({n, c, h, w}, rng);
    IntTensor wgt = randomTensor<int64_t>({o, c, kh, kw}, rng);
    Expr conv = conv2dTerm(var("act", act.shape()), var("wgt", wgt.shape()), sh, sw);
    CHECK(eval<int64_t>(conv, {{"act", act}, {"wgt", wgt}}) ==
          interp::oracleConv2d(act, wgt, sh, sw));
  }
  for (int i = 0; i < 100; ++i) {
    int64_t m = draw(rng, 1, 6), k = draw(rng, 1, 6), o = draw(rng, 1, 6);
    IntTensor p = randomTensor<int64_t>({m, k}, rng);
    IntTensor q = randomTensor<int64_t>({k, o}, rng);
    CHECK(eval<int64_t>(matmulTerm(var("P", p.shape()), var("Q", q.shape())),
                        {{"P", p}, {"Q", q}}) == interp::oracleMatmul(p, q));
  }
  for (int i = 0; i < 100; ++i) {
    int64_t n = draw(rng, 1, 6), c = draw(rng, 1, 6), h = draw(rng, 1, 6),
            w = draw(rng, 1, 6);
    int64_t kh = draw(rng, 1, h), kw = draw(rng, 1, w);
    int64_t sh = draw(rng, 1, 3), sw = draw(rng, 1, 3);
    IntTensor act = randomTensor<int64_t>({n, c, h, w}, rng);
    CHECK(eval<int64_t>(maxpoolTerm(var("act", act.shape()), kh, kw, sh, sw),
                        {{"act", act}}) == interp::oracleMaxpool(act, kh, kw, sh, sw));
  }
}

TEST_CASE("eval shape agrees with inferred shape, and eval is pure") {
  testing::AstGen gen(99);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    Expr e = gen.generate(3);
    Bindings<int64_t> b = interp::randomBindings<int64_t>(e, rng);
    IntTensor first = eval<int64_t>(e, b);
    CHECK(first.shape() == inferShape(e).dims());
    CHECK(eval<int64_t>(e, b) == first);
    Bindings<double> real = interp::randomBindings<double>(e, rng);
    CHECK(eval<double>(e, real).shape() == first.shape());
  }
}

TEST_CASE("accelerator calls evaluate like the terms they replace") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    int64_t n = draw(rng, 1, 2), c = draw(rng, 1, 3), h = draw(rng, 2, 6),
            w = draw(rng, 2, 6), o = draw(rng, 1, 3);
    int64_t kh = draw(rng, 1, h), kw = draw(rng, 1, w);
    int64_t sh = draw(rng, 1, 2), sw = draw(rng, 1, 2);
    IntTensor act = randomTensor<int64_t>({n, c, h, w}, rng);
    IntTensor wgt = randomTensor<int64_t>({o, c, kh, kw}, rng);
    Expr call = hlscnnConv2d(var("act", act.shape()), var("wgt", wgt.shape()), sh, sw);
    CHECK(eval<int64_t>(call, {{"act", act}, {"wgt", wgt}}) ==
          interp::oracleConv2d(act, wgt, sh, sw));
  }
  for (int i = 0; i < 30; ++i) {
    int64_t b = draw(rng, 1, 5), r = draw(rng, 1, 5), c = draw(rng, 1, 5);
    IntTensor a0 = randomTensor<int64_t>({b, r}, rng);
    IntTensor a1 = randomTensor<int64_t>({r, c}, rng);
    Expr call = systolicArray(r, c, access(var("a0", a0.shape()), 1), var("a1", a1.shape()));
    CHECK(eval<int64_t>(call, {{"a0", a0}, {"a1", a1}}) == interp::oracleMatmul(a0, a1));

    IntTensor x = randomTensor<int64_t>({b, r}, rng);
    IntTensor wt = randomTensor<int64_t>({c, r}, rng);
    Bindings<int64_t> bind{{"x", x}, {"w", wt}};
    CHECK(eval<int64_t>(vtaDense(var("x", x.shape()), var("w", wt.shape())), bind) ==
          eval<int64_t>(dense(var("x", x.shape()), var("w", wt.shape())), bind));
  }
}

TEST_CASE("named op semantics") {
  IntTensor x({2, 3}, {1, 2, 3, 4, 5, 6});
  IntTensor w({2, 3}, {1, 0, 0, 0, 1, 1});
  IntTensor c({2}, {10, 20});
  Bindings<int64_t> b{{"x", x}, {"w", w}, {"c", c}};
  Expr ex = var("x", {2, 3}), ew = var("w", {2, 3}), ec = var("c", {2});
  CHECK(eval<int64_t>(dense(ex, ew), b) == IntTensor({2, 2}, {1, 5, 4, 11}));
  CHECK(eval<int64_t>(biasAdd(dense(ex, ew), ec), b) ==
        IntTensor({2, 2}, {11, 25, 14, 31}));
  CHECK(eval<int64_t>(add(reshapeOp(dense(ex, ew), {2, 2}), ec), b) ==
        IntTensor({2, 2}, {11, 25, 14, 31}));
  CHECK(eval<int64_t>(flattenOp(ex), b) == IntTensor({6}, {1, 2, 3, 4, 5, 6}));
}

TEST_CASE("binding errors") {
  Expr e = access(var("x", {2, 3}), 1);
  CHECK(errorOf([&] { eval<int64_t>(e, {}); }) == ErrorKind::UnboundVariable);
  CHECK(errorOf([&] { eval<int64_t>(e, {{"x", IntTensor({3, 2})}}); }) ==
        ErrorKind::ShapeMismatch);
  CHECK(errorOf([] { IntTensor({2, 2}, std::vector<int64_t>{1, 2, 3}); }) ==
        ErrorKind::ShapeMismatch);
}

TEST_CASE("transformer denotations") {
  IntTensor x({2, 3}, {1, 2, 3, 4, 5, 6});
  Bindings<int64_t> b{{"x", x}};
  Expr ex = access(var("x", {2, 3}), 1);
  CHECK(eval<int64_t>(transpose(ex, {1, 0}), b) == IntTensor({3, 2}, {1, 4, 2, 5, 3, 6}));
  CHECK(eval<int64_t>(slice(ex, 1, 1, 3), b) == IntTensor({2, 2}, {2, 3, 5, 6}));
  CHECK(eval<int64_t>(pair(ex, ex), b).shape() == Dims{2, 2, 3});
  CHECK(eval<int64_t>(concat(ex, ex, 0), b) ==
        IntTensor({4, 3}, {1, 2, 3, 4, 5, 6, 1, 2, 3, 4, 5, 6}));
  CHECK(eval<int64_t>(compute(OperatorKind::ReduceSum, ex), b) == IntTensor({2}, {6, 15}));
  CHECK(eval<int64_t>(compute(OperatorKind::ReduceMax, ex), b) == IntTensor({2}, {3, 6}));
  // cartProd of rows with themselves, then dotProd: the Gram matrix.
  CHECK(eval<int64_t>(compute(OperatorKind::DotProd, cartProd(ex, ex)), b) ==
        IntTensor({2, 2}, {14, 32, 32, 77}));
  // windows: out[j, w] = in[j * s + w].
  IntTensor v({5}, {1, 2, 3, 4, 5});
  CHECK(eval<int64_t>(windows(access(var("v", {5}), 0), {3}, {2}), {{"v", v}}) ==
        IntTensor({2, 3}, {1, 2, 3, 3, 4, 5}));
}
