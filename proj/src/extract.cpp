// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/extract.h"

#include "apex/error.h"

#include <charconv>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace apex::rewrite {

namespace {

constexpr uint64_t kCostCap = std::numeric_limits<uint64_t>::max() / 4;

uint64_t addCapped(uint64_t a, uint64_t b) {
  return a >= kCostCap - b ? kCostCap : a + b;
}

struct Best {
  uint64_t cost = 0;
  uint64_t nodes = 0;
  const ENode *node = nullptr;

  bool betterThan(const Best &o) const {
    return std::tie(cost, nodes) < std::tie(o.cost, o.nodes) ||
           (std::tie(cost, nodes) == std::tie(o.cost, o.nodes) && *node < *o.node);
  }
};

} // namespace

uint64_t CostModel::nodeCost(NodeKind kind, const Dims &attrs) const {
  switch (nodeCategory(kind)) {
  case NodeCategory::Var:
    return var;
  case NodeCategory::Transformer:
    return transformer;
  case NodeCategory::Compute: {
    std::optional<uint64_t> op;
    if (!attrs.empty()) {
      switch (static_cast<OperatorKind>(attrs[0])) {
      case OperatorKind::ReduceSum:
        op = reduceSum;
        break;
      case OperatorKind::ReduceMax:
        op = reduceMax;
        break;
      case OperatorKind::DotProd:
        op = dotProd;
        break;
      }
    }
    return op.value_or(compute);
  }
  case NodeCategory::NamedOp:
    return kind == NodeKind::ReshapeOp || kind == NodeKind::FlattenOp
               ? transformer
               : named;
  case NodeCategory::AccelCall:
    return accel;
  }
  return 0;
}

CostModel CostModel::parse(std::string_view text) {
  CostModel model;
  while (!text.empty()) {
    size_t comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{}
                                            : text.substr(comma + 1);
    if (item.empty())
      continue;
    size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      fail(ErrorKind::InvalidAttribute,
           "cost entry '" + std::string(item) + "' is not key=value");
    std::string_view key = item.substr(0, eq), value = item.substr(eq + 1);
    uint64_t weight = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), weight);
    if (ec != std::errc() || ptr != value.data() + value.size())
      fail(ErrorKind::InvalidAttribute,
           "cost weight '" + std::string(value) + "' is not a non-negative integer");
    if (key == "accel")
      model.accel = weight;
    else if (key == "compute")
      model.compute = weight;
    else if (key == "named")
      model.named = weight;
    else if (key == "transformer")
      model.transformer = weight;
    else if (key == "var")
      model.var = weight;
    else if (key == "reduceSum")
      model.reduceSum = weight;
    else if (key == "reduceMax")
      model.reduceMax = weight;
    else if (key == "dotProd")
      model.dotProd = weight;
    else
      fail(ErrorKind::InvalidAttribute, "unknown cost key '" + std::string(key) + "'");
  }
  if (model.accel >= model.compute)
    fail(ErrorKind::InvalidAttribute,
         "accelerator calls must cost less than compute nodes");
  return model;
}

std::string CostModel::toString() const {
  std::ostringstream os;
  os << "accel=" << accel << ",compute=" << compute << ",named=" << named
     << ",transformer=" << transformer << ",var=" << var;
  if (reduceSum)
    os << ",reduceSum=" << *reduceSum;
  if (reduceMax)
    os << ",reduceMax=" << *reduceMax;
  if (dotProd)
    os << ",dotProd=" << *dotProd;
  return os.str();
}

uint64_t termCost(const Expr &e, const CostModel &cost) {
  uint64_t total = cost.nodeCost(e.kind(), e.attrs());
  for (const Expr &c : e.children())
    total = addCapped(total, termCost(c, cost));
  return total;
}

Expr extractClass(const EGraph &g, ClassId id, const CostModel &cost) {
  if (g.numClasses() == 0)
    fail(ErrorKind::EmptyClass, "cannot extract from an empty e-graph");
  std::unordered_map<ClassId, Best> best;
  const std::vector<ClassId> ids = g.classIds();
  bool changed = true;
  while (changed) {
    changed = false;
    for (ClassId cls : ids) {
      for (const ENode &node : g.eclass(cls).nodes) {
        Best candidate{cost.nodeCost(node.kind, node.attrs), 1, &node};
        bool complete = true;
        for (ClassId child : node.children) {
          auto it = best.find(g.find(child));
          if (it == best.end()) {
            complete = false;
            break;
          }
          candidate.cost = addCapped(candidate.cost, it->second.cost);
          candidate.nodes = addCapped(candidate.nodes, it->second.nodes);
        }
        if (!complete)
          continue;
        auto [it, inserted] = best.try_emplace(cls, candidate);
        if (inserted || candidate.betterThan(it->second)) {
          it->second = candidate;
          changed = true;
        }
      }
    }
  }

  std::unordered_map<ClassId, Expr> built;
  std::function<Expr(ClassId)> build = [&](ClassId c) -> Expr {
    c = g.find(c);
    if (auto it = built.find(c); it != built.end())
      return it->second;
    auto it = best.find(c);
    if (it == best.end())
      fail(ErrorKind::EmptyClass,
           "class " + std::to_string(c) + " has no finite term");
    const ENode &node = *it->second.node;
    std::vector<Expr> children;
    for (ClassId child : node.children)
      children.push_back(build(child));
    Expr e = makeExpr(node.kind, node.name, node.attrs, std::move(children));
    built.emplace(c, e);
    return e;
  };
  return build(id);
}

Expr extract(const EquivalenceState &state, const CostModel &cost) {
  if (state.egraph.numClasses() == 0)
    fail(ErrorKind::EmptyClass, "cannot extract from an empty e-graph");
  return extractClass(state.egraph, state.rootClass(), cost);
}

} // namespace apex::rewrite
