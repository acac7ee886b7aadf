// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/saturate.h"

#include "apex/error.h"

#include <chrono>

namespace apex::rewrite {

namespace {

struct PendingMatch {
  const Rule *rule;
  const RuleAlternative *alt;
  Match match;
};

} // namespace

EquivalenceState saturate(const Expr &e, const std::vector<Rule> &rules,
                          const SaturationConfig &config) {
  if (config.iterLimit == 0 || config.nodeLimit == 0 ||
      !(config.timeLimitSeconds > 0))
    fail(ErrorKind::InvalidAttribute, "saturation limits must be positive");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  EquivalenceState state;
  EGraph &g = state.egraph;
  state.root = g.addExpr(e);
  g.rebuild();
  SaturationReport &report = state.report;
  for (const Rule &r : rules)
    report.applied.emplace(r.name, 0);

  auto hitLimit = [&]() -> const char * {
    if (g.numNodes() > config.nodeLimit)
      return "nodes";
    if (elapsed() > config.timeLimitSeconds)
      return "time";
    return nullptr;
  };

  const char *limit = nullptr;
  bool fixpoint = rules.empty();
  while (!fixpoint && !limit) {
    if (report.iterations == config.iterLimit) {
      limit = "iterations";
      break;
    }
    ++report.iterations;
    const uint64_t before = g.version();

    std::vector<PendingMatch> pending;
    for (ClassId id : g.classIds()) {
      for (const Rule &rule : rules)
        for (const RuleAlternative &alt : rule.alternatives)
          for (Match &m : searchClass(g, alt.lhs, id))
            pending.push_back({&rule, &alt, std::move(m)});
      if ((limit = hitLimit()))
        break;
    }

    for (const PendingMatch &p : pending) {
      if (limit)
        break;
      for (const Pattern &rhs : p.alt->apply(g, p.match)) {
        uint64_t v = g.version();
        ClassId id = instantiate(g, rhs, p.match);
        g.merge(p.match.root, id);
        if (g.version() != v)
          ++report.applied[p.rule->name];
      }
      limit = hitLimit();
    }

    g.rebuild();
    fixpoint = !limit && g.version() == before;
  }

  report.nodes = g.numNodes();
  report.classes = g.numClasses();
  report.seconds = elapsed();
  if (fixpoint) {
    report.stop = "fixpoint";
  } else {
    report.stop = "limit";
    report.limit = limit ? limit : "iterations";
  }
  return state;
}

} // namespace apex::rewrite
