// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/soundness.h"

#include "apex/error.h"
#include "apex/extract.h"
#include "apex/infer.h"
#include "apex/interp.h"
#include "apex/textio.h"

#include <random>
#include <sstream>

namespace apex::rewrite {

namespace {

constexpr size_t kDrawBudget = 1000;

struct Instance {
  Expr lhs;
  std::vector<Expr> rhs;
};

/// Right-hand sides of every alternative that fires at the root of `lhs`.
std::vector<Expr> rewritesAtRoot(const Rule &rule, const Expr &lhs) {
  EGraph g;
  ClassId root = g.addExpr(lhs);
  g.rebuild();
  // The graph holds a single tree, so every class has exactly one term.
  const CostModel cost;
  std::vector<Expr> out;
  for (const RuleAlternative &alt : rule.alternatives) {
    for (const Match &m : searchClass(g, alt.lhs, root)) {
      std::map<std::string, Expr> vars;
      for (const auto &[name, id] : m.vars)
        vars.emplace(name, extractClass(g, id, cost));
      for (const Pattern &rhs : alt.apply(g, m))
        out.push_back(instantiateExpr(rhs, vars));
    }
  }
  return out;
}

} // namespace

std::string SoundnessReport::toString() const {
  std::ostringstream os;
  os << rule << ": " << passed << "/" << trials << " trials passed, "
     << rewrites << " rewrites checked";
  for (const SoundnessFailure &f : failures)
    os << "\n  " << f.message << "\n    lhs: " << f.lhs << "\n    rhs: " << f.rhs;
  return os.str();
}

SoundnessReport checkRuleSoundness(const Rule &rule, size_t trials,
                                   uint64_t seed) {
  if (trials == 0)
    fail(ErrorKind::InvalidAttribute, "soundness check needs at least one trial");
  SoundnessReport report;
  report.rule = rule.name;
  report.trials = trials;
  std::mt19937_64 rng(seed);

  for (size_t trial = 0; trial < trials; ++trial) {
    Instance inst;
    for (size_t draw = 0; draw < kDrawBudget && inst.rhs.empty(); ++draw) {
      inst.lhs = rule.sample(rng);
      inst.rhs = rewritesAtRoot(rule, inst.lhs);
    }
    if (inst.rhs.empty())
      fail(ErrorKind::NoSatisfyingShapes,
           rule.name + ": no sampled term satisfied the rule's condition in " +
               std::to_string(kDrawBudget) + " draws");

    auto bindings = interp::randomBindings<int64_t>(inst.lhs, rng);
    IntTensor expected = interp::eval(inst.lhs, bindings);
    bool trialOk = true;
    for (const Expr &rhs : inst.rhs) {
      ++report.rewrites;
      std::string message;
      try {
        if (inferShape(rhs) != inferShape(inst.lhs))
          message = "shape changed: " + inferShape(inst.lhs).toString() +
                    " -> " + inferShape(rhs).toString();
        else if (interp::eval(rhs, bindings) != expected)
          message = "values differ";
      } catch (const Error &err) {
        message = std::string("rewrite is ill-formed: ") + err.what();
      }
      if (!message.empty()) {
        trialOk = false;
        report.failures.push_back(
            {textio::print(inst.lhs), textio::print(rhs), message});
      }
    }
    if (trialOk)
      ++report.passed;
  }
  return report;
}

} // namespace apex::rewrite
