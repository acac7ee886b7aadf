// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_SATURATE_H
#define APEX_SATURATE_H

#include "apex/egraph.h"
#include "apex/rules.h"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace apex::rewrite {

struct SaturationConfig {
  size_t iterLimit = 30;
  size_t nodeLimit = 100000;
  double timeLimitSeconds = 60.0;
  /// Carried for reproducible callers; saturation itself is deterministic.
  uint64_t seed = 0;
};

struct SaturationReport {
  size_t iterations = 0;
  size_t nodes = 0;
  size_t classes = 0;
  /// "fixpoint" or "limit".
  std::string stop;
  /// "iterations", "nodes" or "time" when stop == "limit", else empty.
  std::string limit;
  double seconds = 0.0;
  /// Rewrites that changed the graph, by rule name.
  std::map<std::string, size_t> applied;

  bool reachedFixpoint() const { return stop == "fixpoint"; }
};

struct EquivalenceState {
  EGraph egraph;
  ClassId root = 0;
  SaturationReport report;

  ClassId rootClass() const { return egraph.find(root); }
  /// Whether `e` is represented in the root class.
  bool rootContains(const Expr &e) const { return egraph.represents(root, e); }
};

/// Applies `rules` until nothing changes or a limit is hit. Each iteration
/// collects every match first and then applies them, so rule order within an
/// iteration does not change what is found. Throws InvalidAttribute for a
/// zero limit.
EquivalenceState saturate(const Expr &e, const std::vector<Rule> &rules,
                          const SaturationConfig &config = {});

} // namespace apex::rewrite

#endif // APEX_SATURATE_H
