// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#ifndef APEX_CLI_H
#define APEX_CLI_H

#include "apex/extract.h"
#include "apex/rules.h"
#include "apex/saturate.h"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace apex::cli {

enum ExitCode : int {
  kOk = 0,
  kCompileError = 1,
  kVerifyFailed = 2,
  kLimitNoGain = 3,
};

struct CompileOptions {
  std::string input;
  /// Empty writes to the output stream.
  std::string output;
  std::set<std::string> groups = {"generic", "im2col", "blocking", "mapping"};
  rewrite::RuleOptions rules;
  /// Appended to the library rules, e.g. project-specific mappings.
  std::vector<rewrite::Rule> extraRules;
  rewrite::SaturationConfig saturation;
  rewrite::CostModel cost;
  /// "sexpr" or "json".
  std::string emit = "sexpr";
  std::string statsPath;
  size_t check = 0;
  /// "exact" (int64, bit equality) or "float" (double, Frobenius error).
  std::string checkMode = "exact";
  uint64_t seed = 0;
};

struct RunReport {
  uint64_t inputCost = 0;
  uint64_t extractedCost = 0;
  std::map<std::string, size_t> offloads;
  /// Per accelerator kind, count by call configuration, e.g. "16x16".
  std::map<std::string, std::map<std::string, size_t>> offloadDetails;
  rewrite::SaturationReport saturation;
  std::vector<std::string> rules;
  /// "skipped", "exact-equal", "mismatch" or "max-relative-error".
  std::string verdict = "skipped";
  size_t checked = 0;
  double maxRelativeError = 0.0;
  double wallSeconds = 0.0;
  int exitCode = kOk;
};

/// Byte-stable JSON; wall time is left out so equal runs give equal files.
std::string statsJson(const RunReport &report, const CompileOptions &options);

/// parse -> well-formedness -> saturate -> extract -> print, plus optional
/// verification and stats. Diagnostics go to `err`.
RunReport compile(const CompileOptions &options, std::ostream &out,
                  std::ostream &err);

/// Parses "generic,mapping" / "all" / "" (no rules).
std::set<std::string> parseGroups(const std::string &text);

/// Entry point of the `apex` tool.
int main(int argc, char **argv, std::ostream &out, std::ostream &err);

} // namespace apex::cli

#endif // APEX_CLI_H
