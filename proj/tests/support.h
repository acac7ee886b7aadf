// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the test binaries.

#ifndef APEX_TESTS_SUPPORT_H
#define APEX_TESTS_SUPPORT_H

#include "apex/cli.h"
#include "apex/error.h"
#include "apex/expr.h"
#include "apex/infer.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef APEX_SAMPLES_DIR
#define APEX_SAMPLES_DIR "samples"
#endif

namespace apex::testing {

inline std::string samplePath(const std::string &name) {
  return std::string(APEX_SAMPLES_DIR) + "/" + name;
}

inline std::string readText(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void writeText(const std::string &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult runCli(std::vector<std::string> args) {
  args.insert(args.begin(), "apex");
  std::vector<char *> argv;
  for (std::string &a : args)
    argv.push_back(a.data());
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// Random well-formed programs over every node kind. Each variable gets a
/// fresh name, so any generated tree is a valid program on its own.
class AstGen {
public:
  explicit AstGen(uint64_t seed, int64_t maxElements = 2048)
      : rng_(seed), maxElements_(maxElements) {}

  Expr generate(int depth) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      NodeKind kind = static_cast<NodeKind>(between(0, kNumNodeKinds - 1));
      try {
        Expr e = build(kind, depth);
        AccessPatternShape s = inferShape(e);
        if (s.elementCount() <= maxElements_ && treeSize(e) <= 40)
          return e;
      } catch (const Error &) {
      }
    }
    return access(freshVar(dims(between(1, 3), 1, 4)), 1);
  }

  /// Builds one node of `kind`; throws apex::Error when the draw misfits.
  Expr build(NodeKind kind, int depth) {
    auto sub = [&] { return depth <= 0 ? leaf() : generate(depth - 1); };
    switch (kind) {
    case NodeKind::Var:
      return freshVar(dims(between(1, 3), 1, 4));
    case NodeKind::Access: {
      Expr c = sub();
      return access(c, between(0, static_cast<int64_t>(inferShape(c).rank())));
    }
    case NodeKind::Transpose: {
      Expr c = sub();
      Dims perm(inferShape(c).rank());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng_);
      return transpose(c, perm);
    }
    case NodeKind::CartProd: {
      Expr l = sub();
      AccessPatternShape s = inferShape(l);
      return cartProd(l, matching(dims(between(0, 1), 1, 3), s.compute));
    }
    case NodeKind::Windows: {
      Expr c = sub();
      AccessPatternShape s = inferShape(c);
      if (s.compute.empty())
        fail(ErrorKind::ArityError, "no compute dims");
      Dims w, st;
      for (int64_t d : s.compute) {
        w.push_back(between(1, d));
        st.push_back(between(1, 2));
      }
      return windows(c, w, st);
    }
    case NodeKind::Slice: {
      Expr c = sub();
      AccessPatternShape s = inferShape(c);
      if (s.rank() == 0)
        fail(ErrorKind::ArityError, "rank 0");
      int64_t d = between(0, static_cast<int64_t>(s.rank()) - 1);
      int64_t lo = between(0, s.dim(d) - 1);
      return slice(c, d, lo, between(lo + 1, s.dim(d)));
    }
    case NodeKind::Squeeze: {
      Expr c = sub();
      AccessPatternShape s = inferShape(c);
      Dims ones;
      for (size_t i = 0; i < s.rank(); ++i)
        if (s.dim(i) == 1)
          ones.push_back(static_cast<int64_t>(i));
      if (ones.empty())
        fail(ErrorKind::ShapeMismatch, "no unit dim");
      return squeeze(c, ones[between(0, static_cast<int64_t>(ones.size()) - 1)]);
    }
    case NodeKind::Flatten:
      return flatten(sub());
    case NodeKind::Reshape: {
      Expr c = sub();
      AccessPatternShape s = inferShape(c);
      return reshape(c, {factorize(product(s.access)), factorize(product(s.compute))});
    }
    case NodeKind::Pair: {
      Expr l = sub();
      AccessPatternShape s = inferShape(l);
      return pair(l, matching(s.access, s.compute));
    }
    case NodeKind::Concat: {
      Expr l = sub();
      AccessPatternShape s = inferShape(l);
      if (s.rank() == 0)
        fail(ErrorKind::ArityError, "rank 0");
      int64_t d = between(0, static_cast<int64_t>(s.rank()) - 1);
      Dims all = s.dims();
      all[d] = between(1, 3);
      AccessPatternShape r = AccessPatternShape::split(all, s.access.size());
      return concat(l, matching(r.access, r.compute), d);
    }
    case NodeKind::Compute: {
      Expr c = sub();
      return compute(static_cast<OperatorKind>(between(0, 2)), c);
    }
    case NodeKind::Dense:
    case NodeKind::VtaDense: {
      Expr x = sub();
      Dims xd = inferShape(x).dims();
      if (xd.size() != 2)
        fail(ErrorKind::ShapeMismatch, "dense wants rank 2");
      Expr w = freshVar({between(1, 4), xd[1]});
      return kind == NodeKind::Dense ? dense(x, w) : vtaDense(x, w);
    }
    case NodeKind::BiasAdd: {
      Expr x = sub();
      Dims xd = inferShape(x).dims();
      if (xd.empty())
        fail(ErrorKind::ShapeMismatch, "rank 0");
      return biasAdd(x, freshVar({xd.back()}));
    }
    case NodeKind::Add: {
      Expr x = sub();
      Dims xd = inferShape(x).dims();
      Dims yd(xd.begin() + between(0, static_cast<int64_t>(xd.size())), xd.end());
      if (yd.empty())
        yd = {1};
      return coin() ? add(x, freshVar(yd)) : add(freshVar(yd), x);
    }
    case NodeKind::ReshapeOp: {
      Expr x = sub();
      return reshapeOp(x, factorize(inferShape(x).elementCount()));
    }
    case NodeKind::FlattenOp:
      return flattenOp(sub());
    case NodeKind::SystolicArray: {
      Expr a = flatten(sub());
      AccessPatternShape s = inferShape(a);
      int64_t rows = s.compute[0], cols = between(1, 4);
      return systolicArray(rows, cols, a, freshVar({rows, cols}));
    }
    case NodeKind::HlscnnConv2d: {
      int64_t c = between(1, 2), kh = between(1, 3), kw = between(1, 3);
      Expr act = freshVar({1, c, between(kh, 5), between(kw, 5)});
      Expr wgt = freshVar({between(1, 3), c, kh, kw});
      return hlscnnConv2d(act, wgt, between(1, 2), between(1, 2));
    }
    }
    fail(ErrorKind::Internal, "unhandled kind");
  }

  std::mt19937_64 &rng() { return rng_; }

private:
  int64_t between(int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(rng_);
  }
  bool coin() { return between(0, 1) == 1; }

  Dims dims(int64_t rank, int64_t lo, int64_t hi) {
    Dims d;
    for (int64_t i = 0; i < rank; ++i)
      d.push_back(between(lo, hi));
    return d;
  }

  /// A random ordered factorization of n, possibly with unit factors.
  Dims factorize(int64_t n) {
    Dims out;
    while (n > 1 && out.size() < 3) {
      std::vector<int64_t> divisors;
      for (int64_t d = 2; d <= n; ++d)
        if (n % d == 0)
          divisors.push_back(d);
      int64_t d = divisors[between(0, static_cast<int64_t>(divisors.size()) - 1)];
      out.push_back(d);
      n /= d;
    }
    if (n > 1)
      out.back() *= n;
    if (out.empty() || coin())
      out.insert(out.begin() + between(0, static_cast<int64_t>(out.size())), 1);
    return out;
  }

  Expr freshVar(Dims shape) {
    return var("x" + std::to_string(next_++), std::move(shape));
  }

  Expr leaf() {
    Dims d = dims(between(1, 3), 1, 4);
    Expr v = freshVar(d);
    return coin() ? v : access(v, between(0, static_cast<int64_t>(d.size())));
  }

  /// An access pattern over a fresh variable with the given shape.
  Expr matching(const Dims &acc, const Dims &comp) {
    Dims all = acc;
    all.insert(all.end(), comp.begin(), comp.end());
    if (all.empty())
      all = {1};
    Expr v = freshVar(all);
    if (acc.size() + comp.size() == 0)
      return squeeze(access(v, 0), 0);
    return access(v, static_cast<int64_t>(acc.size()));
  }

  std::mt19937_64 rng_;
  int64_t maxElements_;
  int next_ = 0;
};

} // namespace apex::testing

#endif // APEX_TESTS_SUPPORT_H
