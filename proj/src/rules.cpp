// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/rules.h"

#include "apex/error.h"
#include "apex/infer.h"
#include "apex/kernels.h"

#include <algorithm>
#include <numeric>

namespace apex::rewrite {

namespace {

using K = NodeKind;

Pattern v(const char *name) { return pvar(name); }

Pattern dotP(Pattern e) {
  return pnode(K::Compute, {static_cast<int64_t>(OperatorKind::DotProd)},
               {std::move(e)});
}

Pattern accessP(Pattern e, int64_t n) {
  return pnode(K::Access, {n}, {std::move(e)});
}

Pattern reshapeP(Pattern e, const AccessPatternShape &target) {
  return pnode(K::Reshape, encodeReshapeTarget(target), {std::move(e)});
}

Pattern concatP(Pattern a, Pattern b, int64_t dim) {
  return pnode(K::Concat, {dim}, {std::move(a), std::move(b)});
}

Pattern cartProdP(Pattern a, Pattern b) {
  return pnode(K::CartProd, {}, {std::move(a), std::move(b)});
}

const AccessPatternShape &shapeOf(const EGraph &g, const Match &m,
                                  const std::string &name) {
  return g.shape(m.vars.at(name));
}

int64_t attrOf(const Match &m, const std::string &name) {
  return m.attrs.at(name).at(0);
}

int64_t accessRank(const AccessPatternShape &s) {
  return static_cast<int64_t>(s.access.size());
}

AccessPatternShape flatShape(const AccessPatternShape &s) {
  return {{product(s.access)}, {product(s.compute)}};
}

/// Whether the class holds an access-pattern transformer other than the
/// flatten/reshape pair that the exploratory rules introduce themselves.
bool hasAccessTransformer(const EGraph &g, ClassId id) {
  for (const ENode &n : g.eclass(id).nodes)
    if (nodeCategory(n.kind) == NodeCategory::Transformer &&
        n.kind != K::Flatten && n.kind != K::Reshape)
      return true;
  return false;
}

bool within(int64_t value, int64_t bound) { return bound == 0 || value <= bound; }

Dims joined(const Dims &a, const Dims &b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Dims prepended(int64_t head, const Dims &rest) { return joined({head}, rest); }

//===----------------------------------------------------------------------===//
// Random operands for the soundness fuzzer
//===----------------------------------------------------------------------===//

class Gen {
public:
  explicit Gen(std::mt19937_64 &rng) : rng_(rng) {}

  int64_t between(int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(rng_);
  }
  bool coin() { return between(0, 1) == 1; }

  Dims dims(int64_t rankLo, int64_t rankHi, int64_t lo = 1, int64_t hi = 6) {
    Dims out(between(rankLo, rankHi));
    for (int64_t &d : out)
      d = between(lo, hi);
    return out;
  }

  /// Random dims whose product is n.
  Dims factorize(int64_t n) {
    Dims out;
    while (n > 1) {
      Dims divisors;
      for (int64_t d = 2; d <= n; ++d)
        if (n % d == 0)
          divisors.push_back(d);
      int64_t d = between(0, 2) == 0
                      ? n
                      : divisors[between(0, static_cast<int64_t>(divisors.size()) - 1)];
      out.push_back(d);
      n /= d;
    }
    if (out.empty() && coin())
      out.push_back(1);
    return out;
  }

  Expr tensor(const Dims &dims) {
    return var("x" + std::to_string(next_++), dims);
  }

  /// An access pattern of shape (access, compute), sometimes behind a
  /// transpose so rules see more than bare accesses.
  Expr leaf(const Dims &access, const Dims &compute) {
    Dims total = joined(access, compute);
    auto n = static_cast<int64_t>(access.size());
    if (total.size() < 2 || between(0, 2) != 0)
      return apex::access(tensor(total), n);
    Dims perm(total.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng_);
    Dims in(total.size());
    for (size_t i = 0; i < perm.size(); ++i)
      in[perm[i]] = total[i];
    return transpose(apex::access(tensor(in), n), perm);
  }

  /// Replaces entry i by a fresh value in [lo, hi].
  Dims vary(Dims dims, size_t i, int64_t lo = 1, int64_t hi = 4) {
    dims[i] = between(lo, hi);
    return dims;
  }

  size_t index(size_t size) { return static_cast<size_t>(between(0, static_cast<int64_t>(size) - 1)); }

private:
  std::mt19937_64 &rng_;
  int next_ = 0;
};

//===----------------------------------------------------------------------===//
// generic / im2col
//===----------------------------------------------------------------------===//

RuleAlternative reshapePastDotProd() {
  return {dotP(pnodeAny(K::Reshape, "s", {v("a")})),
          [](const EGraph &g, const Match &m) -> std::vector<Pattern> {
            const AccessPatternShape &a = shapeOf(g, m, "a");
            AccessPatternShape t = reshapeTarget(m.attrs.at("s"));
            if (a.compute.empty() || t.compute.empty() ||
                a.compute[0] != t.compute[0] ||
                product(a.compute) != product(t.compute))
              return {};
            return {reshapeP(dotP(v("a")), {t.access, {}})};
          }};
}

Expr sampleReshapePastDotProd(std::mt19937_64 &rng) {
  Gen gen(rng);
  Dims access = gen.dims(0, 2);
  int64_t t = gen.between(2, 3);
  Dims rest = gen.dims(0, 2, 1, 4);
  Expr a = gen.leaf(access, prepended(t, rest));
  AccessPatternShape target(gen.factorize(product(access)),
                            prepended(t, gen.factorize(product(rest))));
  return compute(OperatorKind::DotProd, reshape(a, target));
}

Rule ruleG1() {
  return {"G1", "generic", "", {reshapePastDotProd()}, sampleReshapePastDotProd};
}

Rule ruleG2() {
  // Both directions; %s must be the dense output shape and %c its bias.
  auto denseOk = [](const EGraph &g, const Match &m) {
    Dims out{shapeOf(g, m, "a").dims().at(0), shapeOf(g, m, "b").dims().at(0)};
    return m.attrs.at("s") == out && shapeOf(g, m, "c").dims() == Dims{out[1]};
  };
  Pattern denseAB = pnode(K::Dense, {}, {v("a"), v("b")});
  RuleAlternative forward{
      pnode(K::Add, {}, {pnodeAny(K::ReshapeOp, "s", {denseAB}), v("c")}),
      [denseOk, denseAB](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        if (!denseOk(g, m))
          return {};
        return {pnode(K::ReshapeOp, m.attrs.at("s"),
                      {pnode(K::BiasAdd, {}, {denseAB, v("c")})})};
      }};
  RuleAlternative backward{
      pnodeAny(K::ReshapeOp, "s", {pnode(K::BiasAdd, {}, {denseAB, v("c")})}),
      [denseOk, denseAB](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        if (!denseOk(g, m))
          return {};
        return {pnode(K::Add, {},
                      {pnode(K::ReshapeOp, m.attrs.at("s"), {denseAB}), v("c")})};
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    int64_t m = gen.between(1, 5), k = gen.between(1, 5), o = gen.between(1, 5);
    Expr d = dense(gen.tensor({m, k}), gen.tensor({o, k}));
    Expr c = gen.tensor({o});
    if (gen.coin())
      return add(reshapeOp(d, {m, o}), c);
    return reshapeOp(biasAdd(d, c), {m, o});
  };
  return {"G2", "generic", "", {forward, backward}, sample};
}

RuleAlternative flattenIdentity(bool accessPatternsOnly) {
  return {v("x"),
          [accessPatternsOnly](const EGraph &g,
                               const Match &m) -> std::vector<Pattern> {
            const AccessPatternShape &s = g.shape(m.root);
            if (s == flatShape(s))
              return {};
            if (accessPatternsOnly && !hasAccessTransformer(g, m.root))
              return {};
            return {reshapeP(pnode(K::Flatten, {}, {v("x")}), s)};
          }};
}

Expr sampleNonFlatLeaf(Gen &gen) {
  while (true) {
    Dims access = gen.dims(0, 2), compute = gen.dims(0, 2);
    AccessPatternShape s(access, compute);
    if (s != flatShape(s))
      return gen.leaf(access, compute);
  }
}

Rule ruleG3() {
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    switch (gen.between(0, 2)) {
    case 0:
      return gen.tensor(gen.dims(2, 3));
    case 1: {
      int64_t m = gen.between(1, 4), k = gen.between(1, 4), o = gen.between(1, 4);
      return dense(gen.tensor({m, k}), gen.tensor({o, k}));
    }
    default:
      return sampleNonFlatLeaf(gen);
    }
  };
  return {"G3", "generic", "", {flattenIdentity(false)}, sample};
}

Rule ruleI1() {
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    return sampleNonFlatLeaf(gen);
  };
  return {"I1", "im2col", "", {flattenIdentity(true)}, sample};
}

Rule ruleI2() {
  RuleAlternative alt{
      cartProdP(pnodeAny(K::Reshape, "s0", {v("a0")}),
                pnodeAny(K::Reshape, "s1", {v("a1")})),
      [](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        const AccessPatternShape &a0 = shapeOf(g, m, "a0");
        const AccessPatternShape &a1 = shapeOf(g, m, "a1");
        AccessPatternShape t0 = reshapeTarget(m.attrs.at("s0"));
        AccessPatternShape t1 = reshapeTarget(m.attrs.at("s1"));
        if (a0.compute != a1.compute ||
            product(a0.compute) != product(t0.compute))
          return {};
        return {reshapeP(cartProdP(v("a0"), v("a1")),
                         {joined(t0.access, t1.access),
                          prepended(2, t0.compute)})};
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    Dims c = gen.dims(1, 2, 1, 4);
    Dims a0 = gen.dims(0, 2, 1, 4), a1 = gen.dims(0, 2, 1, 4);
    Dims tc = gen.factorize(product(c));
    return cartProd(
        reshape(gen.leaf(a0, c), {gen.factorize(product(a0)), tc}),
        reshape(gen.leaf(a1, c), {gen.factorize(product(a1)), tc}));
  };
  return {"I2", "im2col", "", {alt}, sample};
}

Rule ruleI3() {
  return {"I3", "im2col", "", {reshapePastDotProd()}, sampleReshapePastDotProd};
}

//===----------------------------------------------------------------------===//
// blocking
//===----------------------------------------------------------------------===//

Rule ruleB1(int64_t blockMin) {
  RuleAlternative alt{
      v("a"), [blockMin](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        if (!hasAccessTransformer(g, m.root))
          return {};
        Dims dims = g.shape(m.root).dims();
        std::vector<Pattern> out;
        for (size_t i = 0; i < dims.size(); ++i) {
          int64_t n = dims[i];
          if (n < 2 || n % 2 != 0 || n <= blockMin)
            continue;
          auto d = static_cast<int64_t>(i);
          out.push_back(concatP(pnode(K::Slice, {d, 0, n / 2}, {v("a")}),
                                pnode(K::Slice, {d, n / 2, n}, {v("a")}), d));
        }
        return out;
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    Dims access = gen.dims(0, 2), compute = gen.dims(0, 2);
    Dims all = joined(access, compute);
    if (std::none_of(all.begin(), all.end(), [](int64_t d) { return d % 2 == 0; })) {
      if (all.empty()) {
        compute = {2 * gen.between(1, 3)};
      } else {
        size_t i = gen.index(all.size());
        int64_t even = 2 * gen.between(1, 3);
        if (i < access.size())
          access[i] = even;
        else
          compute[i - access.size()] = even;
      }
    }
    return gen.leaf(access, compute);
  };
  return {"B1", "blocking", "", {alt}, sample};
}

Rule ruleB2() {
  RuleAlternative left{
      cartProdP(pnodeAny(K::Concat, "d", {v("a"), v("b")}), v("c")),
      [](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        int64_t d = attrOf(m, "d");
        if (d >= accessRank(shapeOf(g, m, "a")))
          return {};
        return {concatP(cartProdP(v("a"), v("c")), cartProdP(v("b"), v("c")), d)};
      }};
  RuleAlternative right{
      cartProdP(v("c"), pnodeAny(K::Concat, "d", {v("a"), v("b")})),
      [](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        int64_t d = attrOf(m, "d");
        if (d >= accessRank(shapeOf(g, m, "a")))
          return {};
        return {concatP(cartProdP(v("c"), v("a")), cartProdP(v("c"), v("b")),
                        d + accessRank(shapeOf(g, m, "c")))};
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    Dims access = gen.dims(1, 2, 1, 4);
    size_t d = gen.index(access.size());
    Dims compute = gen.dims(0, 2, 1, 4);
    Expr a = gen.leaf(access, compute);
    Expr b = gen.leaf(gen.vary(access, d), compute);
    Expr c = gen.leaf(gen.dims(0, 2, 1, 4), compute);
    Expr cat = concat(a, b, static_cast<int64_t>(d));
    return gen.coin() ? cartProd(cat, c) : cartProd(c, cat);
  };
  return {"B2", "blocking", "", {left, right}, sample};
}

Rule ruleB3() {
  RuleAlternative alt{
      cartProdP(pnodeAny(K::Concat, "d0", {v("a0"), v("a1")}),
                pnodeAny(K::Concat, "d1", {v("a2"), v("a3")})),
      [](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        const AccessPatternShape &a0 = shapeOf(g, m, "a0");
        const AccessPatternShape &a2 = shapeOf(g, m, "a2");
        int64_t nl = accessRank(a0), nr = accessRank(a2);
        int64_t d0 = attrOf(m, "d0"), d1 = attrOf(m, "d1");
        if (d0 < nl || d1 < nr || d0 - nl != d1 - nr)
          return {};
        if (a0.compute != a2.compute ||
            shapeOf(g, m, "a1").compute != shapeOf(g, m, "a3").compute)
          return {};
        return {concatP(cartProdP(v("a0"), v("a2")), cartProdP(v("a1"), v("a3")),
                        nl + nr + 1 + (d0 - nl))};
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    Dims al = gen.dims(0, 2, 1, 3), ar = gen.dims(0, 2, 1, 3);
    Dims c = gen.dims(1, 2, 1, 3);
    size_t k = gen.index(c.size());
    Dims cq = gen.vary(c, k, 1, 3);
    auto nl = static_cast<int64_t>(al.size()), nr = static_cast<int64_t>(ar.size());
    auto kk = static_cast<int64_t>(k);
    return cartProd(concat(gen.leaf(al, c), gen.leaf(al, cq), nl + kk),
                    concat(gen.leaf(ar, c), gen.leaf(ar, cq), nr + kk));
  };
  return {"B3", "blocking", "", {alt}, sample};
}

Rule ruleB4() {
  RuleAlternative alt{
      dotP(pnodeAny(K::Concat, "d", {v("a"), v("b")})),
      [](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        int64_t d = attrOf(m, "d");
        if (d >= accessRank(shapeOf(g, m, "a")))
          return {};
        return {concatP(dotP(v("a")), dotP(v("b")), d)};
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    Dims access = gen.dims(1, 2, 1, 4);
    size_t d = gen.index(access.size());
    Dims inner = prepended(gen.between(2, 3), gen.dims(0, 2, 1, 3));
    Expr a = gen.leaf(access, inner);
    Expr b = gen.leaf(gen.vary(access, d), inner);
    return compute(OperatorKind::DotProd, concat(a, b, static_cast<int64_t>(d)));
  };
  return {"B4", "blocking", "", {alt}, sample};
}

Rule ruleB5() {
  RuleAlternative alt{
      dotP(pnodeAny(K::Concat, "d", {v("a"), v("b")})),
      [](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        // Only a reduced dim: not an access dim and not the tuple dim.
        if (attrOf(m, "d") < accessRank(shapeOf(g, m, "a")) + 1)
          return {};
        return {pnode(K::Compute, {static_cast<int64_t>(OperatorKind::ReduceSum)},
                      {pnode(K::Pair, {}, {dotP(v("a")), dotP(v("b"))})})};
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    Dims access = gen.dims(0, 2, 1, 4);
    int64_t t = gen.between(2, 3);
    Dims rest = gen.dims(1, 2, 1, 4);
    size_t k = gen.index(rest.size());
    Expr a = gen.leaf(access, prepended(t, rest));
    Expr b = gen.leaf(access, prepended(t, gen.vary(rest, k)));
    auto dim = static_cast<int64_t>(access.size() + 1 + k);
    return compute(OperatorKind::DotProd, concat(a, b, dim));
  };
  return {"B5", "blocking", "", {alt}, sample};
}

//===----------------------------------------------------------------------===//
// mapping
//===----------------------------------------------------------------------===//

Rule ruleM1(const RuleOptions &options) {
  RuleAlternative alt{
      dotP(cartProdP(v("a0"), v("a1"))),
      [options](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        const AccessPatternShape &a0 = shapeOf(g, m, "a0");
        const AccessPatternShape &a1 = shapeOf(g, m, "a1");
        if (a0.access.size() != 1 || a0.compute.size() != 1 ||
            a1.access.size() != 1 || a1.compute.size() != 1)
          return {};
        int64_t batch = a0.access[0], rows = a0.compute[0], cols = a1.access[0];
        if (a1.compute[0] != rows || !within(rows, options.systolicRows) ||
            !within(cols, options.systolicCols) ||
            !within(batch, options.systolicBatch))
          return {};
        return {pnode(K::SystolicArray, {rows, cols},
                      {v("a0"),
                       accessP(pnode(K::Transpose, {1, 0}, {v("a1")}), 0)})};
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    int64_t batch = gen.between(1, 6), rows = gen.between(1, 6),
            cols = gen.between(1, 6);
    return compute(OperatorKind::DotProd,
                   cartProd(gen.leaf({batch}, {rows}), gen.leaf({cols}, {rows})));
  };
  return {"M1", "mapping", "systolic", {alt}, sample};
}

Rule ruleM2() {
  RuleAlternative alt{
      pnode(K::BiasAdd, {}, {pnode(K::Dense, {}, {v("a"), v("b")}), v("c")}),
      [](const EGraph &, const Match &) -> std::vector<Pattern> {
        return {pnode(K::BiasAdd, {},
                      {pnode(K::VtaDense, {}, {v("a"), v("b")}), v("c")})};
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    int64_t m = gen.between(1, 6), k = gen.between(1, 6), o = gen.between(1, 6);
    return biasAdd(dense(gen.tensor({m, k}), gen.tensor({o, k})),
                   gen.tensor({o}));
  };
  return {"M2", "mapping", "vta", {alt}, sample};
}

Rule ruleM3() {
  Pattern lhs = pnode(
      K::Transpose, {0, 3, 1, 2},
      {pnode(K::Squeeze, {1},
             {dotP(cartProdP(pnodeAny(K::Windows, "w", {accessP(v("act"), 1)}),
                             accessP(v("wgt"), 1)))})});
  RuleAlternative alt{
      lhs, [](const EGraph &g, const Match &m) -> std::vector<Pattern> {
        Dims act = shapeOf(g, m, "act").dims();
        Dims wgt = shapeOf(g, m, "wgt").dims();
        const Dims &w = m.attrs.at("w");
        if (act.size() != 4 || wgt.size() != 4 || act[1] != wgt[1])
          return {};
        if (windowsWindow(w) != Dims{act[1], wgt[2], wgt[3]})
          return {};
        Dims strides = windowsStrides(w);
        if (strides[0] != 1)
          return {};
        return {pnode(K::HlscnnConv2d, {strides[1], strides[2], 1},
                      {v("act"), v("wgt")})};
      }};
  auto sample = [](std::mt19937_64 &rng) {
    Gen gen(rng);
    int64_t n = gen.between(1, 2), c = gen.between(1, 3), h = gen.between(1, 6),
            w = gen.between(1, 6), o = gen.between(1, 3);
    int64_t kh = gen.between(1, std::min<int64_t>(h, 3));
    int64_t kw = gen.between(1, std::min<int64_t>(w, 3));
    return conv2dTerm(gen.tensor({n, c, h, w}), gen.tensor({o, c, kh, kw}),
                      gen.between(1, 2), gen.between(1, 2));
  };
  return {"M3", "mapping", "hlscnn", {alt}, sample};
}

} // namespace

const std::vector<std::string> &ruleGroups() {
  static const std::vector<std::string> groups = {"generic", "im2col",
                                                  "blocking", "mapping"};
  return groups;
}

const std::vector<std::string> &acceleratorTargets() {
  static const std::vector<std::string> targets = {"systolic", "vta", "hlscnn"};
  return targets;
}

std::vector<Rule> buildRuleLibrary(const std::set<std::string> &groups,
                                   const RuleOptions &options) {
  if (groups.empty())
    fail(ErrorKind::UnknownGroup, "no rule group selected");
  for (const std::string &g : groups)
    if (std::find(ruleGroups().begin(), ruleGroups().end(), g) ==
        ruleGroups().end())
      fail(ErrorKind::UnknownGroup, "unknown rule group '" + g + "'");
  for (const std::string &t : options.targets)
    if (std::find(acceleratorTargets().begin(), acceleratorTargets().end(), t) ==
        acceleratorTargets().end())
      fail(ErrorKind::InvalidAttribute, "unknown accelerator target '" + t + "'");

  std::vector<Rule> all = {ruleG1(), ruleG2(),  ruleG3(),
                           ruleI1(), ruleI2(),  ruleI3(),
                           ruleB1(options.blockMin), ruleB2(), ruleB3(),
                           ruleB4(), ruleB5(),
                           ruleM1(options), ruleM2(), ruleM3()};
  std::vector<Rule> out;
  for (Rule &r : all) {
    if (!groups.count(r.group))
      continue;
    if (!r.target.empty() && !options.targets.count(r.target))
      continue;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Rule> buildAllRules(const RuleOptions &options) {
  return buildRuleLibrary({ruleGroups().begin(), ruleGroups().end()}, options);
}

} // namespace apex::rewrite
