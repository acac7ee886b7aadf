// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_PATTERN_H
#define APEX_PATTERN_H

#include "apex/egraph.h"
#include "apex/expr.h"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace apex::rewrite {

/// A term with holes. Either a variable `?var` or an operator node whose
/// attributes are fixed, or left open (`attrs == nullopt`) and optionally
/// bound to `attrVar`.
struct Pattern {
  std::string var;
  NodeKind kind = NodeKind::Var;
  std::optional<Dims> attrs;
  std::string attrVar;
  std::vector<Pattern> children;

  bool isVar() const { return !var.empty(); }
};

Pattern pvar(std::string name);
Pattern pnode(NodeKind kind, Dims attrs, std::vector<Pattern> children);
/// Node with open attributes bound to `attrVar`.
Pattern pnodeAny(NodeKind kind, std::string attrVar,
                 std::vector<Pattern> children);

std::string toString(const Pattern &p);

struct Match {
  ClassId root = 0;
  std::map<std::string, ClassId> vars;
  std::map<std::string, Dims> attrs;
};

/// All matches of `p` rooted at class `id`, in deterministic order.
std::vector<Match> searchClass(const EGraph &g, const Pattern &p, ClassId id);

/// Adds the instantiated pattern. Every node of `p` needs concrete attrs.
ClassId instantiate(EGraph &g, const Pattern &p, const Match &m);

/// Pattern instantiated over terms instead of classes.
Expr instantiateExpr(const Pattern &p, const std::map<std::string, Expr> &vars);

/// Purely syntactic matching of `p` against the term `e` itself.
std::optional<std::map<std::string, Expr>> matchExpr(const Pattern &p,
                                                     const Expr &e);

/// Number of subterm positions of `e` (counted as a tree) that `p` matches.
size_t countExactMatches(const Expr &e, const Pattern &p);

} // namespace apex::rewrite

#endif // APEX_PATTERN_H
