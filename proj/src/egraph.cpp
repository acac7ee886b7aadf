// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/egraph.h"

#include "apex/error.h"
#include "apex/infer.h"

#include <algorithm>

namespace apex::rewrite {

size_t ENodeHash::operator()(const ENode &n) const {
  size_t h = std::hash<int>()(static_cast<int>(n.kind));
  auto mix = [&h](size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(std::hash<std::string>()(n.name));
  for (int64_t a : n.attrs)
    mix(std::hash<int64_t>()(a));
  for (ClassId c : n.children)
    mix(std::hash<ClassId>()(c) * 31);
  return h;
}

ClassId EGraph::find(ClassId id) const {
  ClassId root = id;
  while (parent_[root] != root)
    root = parent_[root];
  while (parent_[id] != root) {
    ClassId next = parent_[id];
    parent_[id] = root;
    id = next;
  }
  return root;
}

ENode EGraph::canonicalize(ENode node) const {
  for (ClassId &c : node.children)
    c = find(c);
  return node;
}

std::optional<ClassId> EGraph::lookup(ENode node) const {
  auto it = memo_.find(canonicalize(std::move(node)));
  if (it == memo_.end())
    return std::nullopt;
  return find(it->second);
}

ClassId EGraph::add(ENode node) {
  node = canonicalize(std::move(node));
  if (auto it = memo_.find(node); it != memo_.end())
    return find(it->second);

  std::vector<AccessPatternShape> operands;
  operands.reserve(node.children.size());
  for (ClassId c : node.children)
    operands.push_back(classes_[c].shape);
  AccessPatternShape shape = inferNodeShape(node.kind, node.attrs, operands);

  auto id = static_cast<ClassId>(classes_.size());
  parent_.push_back(id);
  EClass cls;
  cls.id = id;
  cls.nodes.push_back(node);
  cls.shape = std::move(shape);
  classes_.push_back(std::move(cls));
  memo_.emplace(std::move(node), id);
  ++numNodes_;
  ++numClasses_;
  ++version_;
  return id;
}

ClassId EGraph::addExpr(const Expr &e) {
  ENode node{e.kind(), e.name(), e.attrs(), {}};
  node.children.reserve(e.children().size());
  for (const Expr &c : e.children())
    node.children.push_back(addExpr(c));
  return add(std::move(node));
}

bool EGraph::merge(ClassId a, ClassId b) {
  a = find(a);
  b = find(b);
  if (a == b)
    return false;
  if (classes_[a].shape != classes_[b].shape)
    fail(ErrorKind::Internal, "merging classes of different shapes " +
                                  classes_[a].shape.toString() + " and " +
                                  classes_[b].shape.toString());
  if (b < a)
    std::swap(a, b);
  parent_[b] = a;
  auto &into = classes_[a].nodes;
  auto &from = classes_[b].nodes;
  into.insert(into.end(), std::make_move_iterator(from.begin()),
              std::make_move_iterator(from.end()));
  from.clear();
  from.shrink_to_fit();
  --numClasses_;
  ++version_;
  return true;
}

void EGraph::rebuild() {
  while (true) {
    memo_.clear();
    std::vector<std::pair<ClassId, ClassId>> congruent;
    for (EClass &cls : classes_) {
      if (parent_[cls.id] != cls.id)
        continue;
      for (ENode &node : cls.nodes) {
        node = canonicalize(std::move(node));
        auto [it, inserted] = memo_.emplace(node, cls.id);
        if (!inserted && it->second != cls.id)
          congruent.emplace_back(it->second, cls.id);
      }
    }
    bool changed = false;
    for (auto [a, b] : congruent)
      changed |= merge(a, b);
    if (!changed)
      break;
  }

  numNodes_ = 0;
  for (EClass &cls : classes_) {
    if (parent_[cls.id] != cls.id)
      continue;
    std::sort(cls.nodes.begin(), cls.nodes.end());
    cls.nodes.erase(std::unique(cls.nodes.begin(), cls.nodes.end()),
                    cls.nodes.end());
    numNodes_ += cls.nodes.size();
  }
}

const EClass &EGraph::eclass(ClassId id) const { return classes_[find(id)]; }

std::vector<ClassId> EGraph::classIds() const {
  std::vector<ClassId> ids;
  ids.reserve(numClasses_);
  for (const EClass &cls : classes_)
    if (parent_[cls.id] == cls.id)
      ids.push_back(cls.id);
  return ids;
}

namespace {

std::optional<ClassId> lookupExpr(const EGraph &g, const Expr &e) {
  ENode node{e.kind(), e.name(), e.attrs(), {}};
  for (const Expr &c : e.children()) {
    auto id = lookupExpr(g, c);
    if (!id)
      return std::nullopt;
    node.children.push_back(*id);
  }
  return g.lookup(std::move(node));
}

} // namespace

bool EGraph::represents(ClassId id, const Expr &e) const {
  auto found = lookupExpr(*this, e);
  return found && *found == find(id);
}

} // namespace apex::rewrite
