// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/pattern.h"

#include "apex/error.h"

namespace apex::rewrite {

Pattern pvar(std::string name) {
  Pattern p;
  p.var = std::move(name);
  return p;
}

Pattern pnode(NodeKind kind, Dims attrs, std::vector<Pattern> children) {
  Pattern p;
  p.kind = kind;
  p.attrs = std::move(attrs);
  p.children = std::move(children);
  return p;
}

Pattern pnodeAny(NodeKind kind, std::string attrVar,
                 std::vector<Pattern> children) {
  Pattern p;
  p.kind = kind;
  p.attrVar = std::move(attrVar);
  p.children = std::move(children);
  return p;
}

std::string toString(const Pattern &p) {
  if (p.isVar())
    return "?" + p.var;
  std::string out = "(" + std::string(nodeKindName(p.kind));
  if (p.attrs)
    out += " " + dimsToString(*p.attrs);
  else if (!p.attrVar.empty())
    out += " ?" + p.attrVar;
  for (const Pattern &c : p.children)
    out += " " + toString(c);
  return out + ")";
}

namespace {

void matchIn(const EGraph &g, const Pattern &p, ClassId id, const Match &m,
             const std::function<void(const Match &)> &k) {
  id = g.find(id);
  if (p.isVar()) {
    auto it = m.vars.find(p.var);
    if (it != m.vars.end()) {
      if (g.find(it->second) == id)
        k(m);
      return;
    }
    Match next = m;
    next.vars.emplace(p.var, id);
    k(next);
    return;
  }
  for (const ENode &node : g.eclass(id).nodes) {
    if (node.kind != p.kind || node.children.size() != p.children.size())
      continue;
    if (p.attrs && node.attrs != *p.attrs)
      continue;
    Match base = m;
    if (!p.attrVar.empty()) {
      auto it = m.attrs.find(p.attrVar);
      if (it != m.attrs.end() && it->second != node.attrs)
        continue;
      base.attrs.emplace(p.attrVar, node.attrs);
    }
    // Thread the substitution through the children left to right.
    std::function<void(size_t, const Match &)> step =
        [&](size_t i, const Match &cur) {
          if (i == p.children.size()) {
            k(cur);
            return;
          }
          matchIn(g, p.children[i], node.children[i], cur,
                  [&](const Match &nxt) { step(i + 1, nxt); });
        };
    step(0, base);
  }
}

std::optional<Dims> requireAttrs(const Pattern &p) {
  if (!p.attrs)
    fail(ErrorKind::Internal,
         "pattern node without attributes on a right-hand side: " + toString(p));
  return p.attrs;
}

bool matchExprInto(const Pattern &p, const Expr &e,
                   std::map<std::string, Expr> &vars,
                   std::map<std::string, Dims> &attrVars) {
  if (p.isVar()) {
    auto [it, inserted] = vars.emplace(p.var, e);
    return inserted || it->second == e;
  }
  if (e.kind() != p.kind || e.children().size() != p.children.size())
    return false;
  if (p.attrs && e.attrs() != *p.attrs)
    return false;
  if (!p.attrVar.empty()) {
    auto [it, inserted] = attrVars.emplace(p.attrVar, e.attrs());
    if (!inserted && it->second != e.attrs())
      return false;
  }
  for (size_t i = 0; i < p.children.size(); ++i)
    if (!matchExprInto(p.children[i], e.child(i), vars, attrVars))
      return false;
  return true;
}

} // namespace

std::vector<Match> searchClass(const EGraph &g, const Pattern &p, ClassId id) {
  std::vector<Match> out;
  Match seed;
  seed.root = g.find(id);
  matchIn(g, p, id, seed, [&out](const Match &m) { out.push_back(m); });
  return out;
}

ClassId instantiate(EGraph &g, const Pattern &p, const Match &m) {
  if (p.isVar()) {
    auto it = m.vars.find(p.var);
    if (it == m.vars.end())
      fail(ErrorKind::Internal, "unbound pattern variable ?" + p.var);
    return it->second;
  }
  ENode node{p.kind, "", *requireAttrs(p), {}};
  for (const Pattern &c : p.children)
    node.children.push_back(instantiate(g, c, m));
  return g.add(std::move(node));
}

Expr instantiateExpr(const Pattern &p, const std::map<std::string, Expr> &vars) {
  if (p.isVar()) {
    auto it = vars.find(p.var);
    if (it == vars.end())
      fail(ErrorKind::Internal, "unbound pattern variable ?" + p.var);
    return it->second;
  }
  std::vector<Expr> children;
  for (const Pattern &c : p.children)
    children.push_back(instantiateExpr(c, vars));
  return makeExpr(p.kind, "", *requireAttrs(p), std::move(children));
}

std::optional<std::map<std::string, Expr>> matchExpr(const Pattern &p,
                                                     const Expr &e) {
  std::map<std::string, Expr> vars;
  std::map<std::string, Dims> attrVars;
  if (!matchExprInto(p, e, vars, attrVars))
    return std::nullopt;
  return vars;
}

size_t countExactMatches(const Expr &e, const Pattern &p) {
  size_t n = matchExpr(p, e) ? 1 : 0;
  for (const Expr &c : e.children())
    n += countExactMatches(c, p);
  return n;
}

} // namespace apex::rewrite
