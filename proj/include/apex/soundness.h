// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_SOUNDNESS_H
#define APEX_SOUNDNESS_H

#include "apex/rules.h"

#include <cstdint>
#include <string>
#include <vector>

namespace apex::rewrite {

struct SoundnessFailure {
  std::string lhs;
  std::string rhs;
  std::string message;
};

struct SoundnessReport {
  std::string rule;
  size_t trials = 0;
  size_t passed = 0;
  /// Right-hand sides checked; a trial may produce several.
  size_t rewrites = 0;
  std::vector<SoundnessFailure> failures;

  bool ok() const { return failures.empty() && passed == trials; }
  std::string toString() const;
};

/// Each trial draws terms from the rule's sampler until one matches at the
/// root with its condition satisfied, then evaluates the LHS and every RHS
/// on the same random integer inputs and requires exact equality. Throws
/// NoSatisfyingShapes when 1000 draws in a row fail the condition.
SoundnessReport checkRuleSoundness(const Rule &rule, size_t trials,
                                   uint64_t seed);

} // namespace apex::rewrite

#endif // APEX_SOUNDNESS_H
