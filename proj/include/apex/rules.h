// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_RULES_H
#define APEX_RULES_H

#include "apex/pattern.h"

#include <functional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace apex::rewrite {

/// Right-hand sides for one match. Empty when the side condition fails; more
/// than one when the rule has several valid rewrites for the same match.
using RuleApply =
    std::function<std::vector<Pattern>(const EGraph &, const Match &)>;

struct RuleAlternative {
  Pattern lhs;
  RuleApply apply;
};

struct Rule {
  std::string name;
  std::string group;
  /// Mapping rules only: the accelerator they target.
  std::string target;
  std::vector<RuleAlternative> alternatives;
  /// Draws a random term that some alternative's LHS matches at the root.
  std::function<Expr(std::mt19937_64 &)> sample;
};

struct RuleOptions {
  /// Largest systolic array the mapping accepts. 0 leaves a bound open.
  int64_t systolicRows = 16;
  int64_t systolicCols = 16;
  int64_t systolicBatch = 16;
  /// The blocking split only halves even dims larger than this.
  int64_t blockMin = 16;
  /// Accelerators the mapping group may target: systolic, vta, hlscnn.
  std::set<std::string> targets = {"systolic", "vta", "hlscnn"};
};

/// generic, im2col, blocking, mapping.
const std::vector<std::string> &ruleGroups();
const std::vector<std::string> &acceleratorTargets();

/// Rules in library order G1-G3, I1-I3, B1-B5, M1-M3, restricted to
/// `groups`. Throws UnknownGroup for an empty set or an unknown name.
std::vector<Rule> buildRuleLibrary(const std::set<std::string> &groups,
                                   const RuleOptions &options = {});

/// Every rule of every group.
std::vector<Rule> buildAllRules(const RuleOptions &options = {});

} // namespace apex::rewrite

#endif // APEX_RULES_H
