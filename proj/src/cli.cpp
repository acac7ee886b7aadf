// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/cli.h"

#include "apex/error.h"
#include "apex/infer.h"
#include "apex/interp.h"
#include "apex/soundness.h"
#include "apex/textio.h"

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace apex::cli {

namespace {

using nlohmann::ordered_json;

std::string joinDims(const Dims &dims) {
  std::string out;
  for (size_t i = 0; i < dims.size(); ++i)
    out += (i ? "x" : "") + std::to_string(dims[i]);
  return out;
}

/// "16x16" for a systolic array; operand dims (and strides) otherwise.
std::string callConfiguration(const Expr &call) {
  if (call.kind() == NodeKind::SystolicArray)
    return joinDims(call.attrs());
  std::string key;
  for (const Expr &c : call.children())
    key += (key.empty() ? "" : ",") + joinDims(inferShape(c).dims());
  if (call.kind() == NodeKind::HlscnnConv2d)
    key += ",s" + joinDims({call.attrs()[0], call.attrs()[1]});
  return key;
}

void countOffloads(const Expr &e, RunReport &report) {
  if (nodeCategory(e.kind()) == NodeCategory::AccelCall) {
    std::string kind(nodeKindName(e.kind()));
    ++report.offloads[kind];
    ++report.offloadDetails[kind][callConfiguration(e)];
  }
  for (const Expr &c : e.children())
    countOffloads(c, report);
}

bool readFile(const std::string &path, std::string &text) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  text = buf.str();
  return true;
}

void verify(const Expr &input, const Expr &extracted,
            const CompileOptions &options, RunReport &report) {
  if (options.check == 0)
    return;
  std::mt19937_64 rng(options.seed);
  report.checked = options.check;
  if (options.checkMode == "exact") {
    report.verdict = "exact-equal";
    for (size_t i = 0; i < options.check; ++i) {
      auto bindings = interp::randomBindings<int64_t>(input, rng);
      if (interp::eval(input, bindings) != interp::eval(extracted, bindings)) {
        report.verdict = "mismatch";
        return;
      }
    }
    return;
  }
  constexpr double kTolerance = 1e-9;
  report.verdict = "max-relative-error";
  for (size_t i = 0; i < options.check; ++i) {
    auto bindings = interp::randomBindings<double>(input, rng);
    RealTensor ref = interp::eval(input, bindings);
    RealTensor got = interp::eval(extracted, bindings);
    double err = 0.0;
    try {
      err = interp::frobeniusRelativeError(ref, got);
    } catch (const Error &) {
      // All-zero reference: only an all-zero result is acceptable.
      err = ref == got ? 0.0 : std::numeric_limits<double>::infinity();
    }
    report.maxRelativeError = std::max(report.maxRelativeError, err);
  }
  if (report.maxRelativeError > kTolerance)
    report.verdict = "mismatch";
}

Dims parseSystolic(const std::string &text) {
  Dims dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, 'x')) {
    try {
      size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used != item.size() || v < 0)
        throw std::invalid_argument(item);
      dims.push_back(v);
    } catch (const std::exception &) {
      fail(ErrorKind::InvalidAttribute,
           "--systolic expects RxC or RxCxB with non-negative integers, got '" +
               text + "'");
    }
  }
  if (dims.size() != 2 && dims.size() != 3)
    fail(ErrorKind::InvalidAttribute,
         "--systolic expects RxC or RxCxB, got '" + text + "'");
  if (dims.size() == 2)
    dims.push_back(0);
  return dims;
}

std::set<std::string> parseTargets(const std::string &text) {
  if (text == "all")
    return {rewrite::acceleratorTargets().begin(),
            rewrite::acceleratorTargets().end()};
  return {text};
}

void writeSummary(const RunReport &r, std::ostream &err) {
  err << "apex: cost " << r.inputCost << " -> " << r.extractedCost
      << "; offloads";
  if (r.offloads.empty())
    err << " none";
  for (const auto &[kind, n] : r.offloads)
    err << ' ' << kind << '=' << n;
  err << "; saturation " << r.saturation.stop;
  if (!r.saturation.limit.empty())
    err << " (" << r.saturation.limit << ")";
  err << " after " << r.saturation.iterations << " iterations, "
      << r.saturation.nodes << " nodes; verify " << r.verdict;
  if (r.checked)
    err << " (" << r.checked << " trials)";
  err << "; " << r.wallSeconds << " s\n";
}

} // namespace

std::set<std::string> parseGroups(const std::string &text) {
  if (text == "all")
    return {rewrite::ruleGroups().begin(), rewrite::ruleGroups().end()};
  std::set<std::string> groups;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      groups.insert(item);
  for (const std::string &g : groups)
    if (std::find(rewrite::ruleGroups().begin(), rewrite::ruleGroups().end(),
                  g) == rewrite::ruleGroups().end())
      fail(ErrorKind::UnknownGroup, "unknown rule group '" + g + "'");
  return groups;
}

std::string statsJson(const RunReport &report, const CompileOptions &options) {
  ordered_json j;
  j["schema"] = 1;
  j["rules"] = report.rules;
  j["offloads"] = ordered_json::object();
  for (const auto &[kind, n] : report.offloads)
    j["offloads"][kind] = n;
  j["offload_details"] = ordered_json::object();
  for (const auto &[kind, byConfig] : report.offloadDetails)
    for (const auto &[config, n] : byConfig)
      j["offload_details"][kind][config] = n;
  j["cost"] = {{"model", options.cost.toString()},
               {"input", report.inputCost},
               {"extracted", report.extractedCost}};
  j["saturation"] = {{"iterations", report.saturation.iterations},
                     {"nodes", report.saturation.nodes},
                     {"classes", report.saturation.classes},
                     {"stop", report.saturation.stop},
                     {"limit", report.saturation.limit}};
  ordered_json v;
  v["mode"] = options.checkMode;
  v["trials"] = report.checked;
  v["seed"] = options.seed;
  v["verdict"] = report.verdict;
  if (report.verdict == "max-relative-error" ||
      (options.checkMode == "float" && report.checked))
    v["max_relative_error"] = report.maxRelativeError;
  j["verify"] = std::move(v);
  return j.dump(2) + "\n";
}

RunReport compile(const CompileOptions &options, std::ostream &out,
                  std::ostream &err) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  RunReport report;
  auto finish = [&](int code) {
    report.exitCode = code;
    report.wallSeconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    return report;
  };

  std::string text;
  if (!readFile(options.input, text)) {
    err << options.input << ": error: cannot read file\n";
    return finish(kCompileError);
  }
  textio::Program program;
  try {
    program = textio::parse(text);
  } catch (const textio::ParseError &e) {
    err << textio::formatDiagnostic(options.input, e) << "\n";
    return finish(kCompileError);
  }
  WellFormedReport wf = checkWellFormed(program.expr);
  if (!wf.ok()) {
    for (const auto &d : wf.errors)
      err << options.input << ": error: at " << d.path << ": "
          << errorKindName(d.kind) << ": " << d.message << "\n";
    return finish(kCompileError);
  }

  Expr extracted;
  try {
    std::vector<rewrite::Rule> rules;
    if (!options.groups.empty())
      rules = rewrite::buildRuleLibrary(options.groups, options.rules);
    rules.insert(rules.end(), options.extraRules.begin(), options.extraRules.end());
    for (const rewrite::Rule &r : rules)
      report.rules.push_back(r.name);
    rewrite::EquivalenceState state =
        rewrite::saturate(program.expr, rules, options.saturation);
    report.saturation = state.report;
    extracted = rewrite::extract(state, options.cost);
  } catch (const Error &e) {
    err << options.input << ": error: " << errorKindName(e.kind()) << ": "
        << e.what() << "\n";
    return finish(kCompileError);
  }

  report.inputCost = rewrite::termCost(program.expr, options.cost);
  report.extractedCost = rewrite::termCost(extracted, options.cost);
  countOffloads(extracted, report);
  verify(program.expr, extracted, options, report);

  textio::Program result{program.vars, extracted};
  std::string emitted = options.emit == "json"
                            ? textio::printJson(result) + "\n"
                            : textio::printProgram(result);
  if (options.output.empty()) {
    out << emitted;
  } else {
    std::ofstream file(options.output, std::ios::binary);
    file << emitted;
    if (!file) {
      err << options.output << ": error: cannot write file\n";
      return finish(kCompileError);
    }
  }
  if (!options.statsPath.empty()) {
    std::ofstream file(options.statsPath, std::ios::binary);
    file << statsJson(report, options);
    if (!file) {
      err << options.statsPath << ": error: cannot write file\n";
      return finish(kCompileError);
    }
  }

  int code = kOk;
  if (report.verdict == "mismatch")
    code = kVerifyFailed;
  else if (report.saturation.stop == "limit" &&
           report.extractedCost >= report.inputCost)
    code = kLimitNoGain;
  return finish(code);
}

int main(int argc, char **argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"apex: rewrite access-pattern tensor programs onto accelerators"};
  app.require_subcommand(1);

  CompileOptions opts;
  std::string rulesText = "all", target = "systolic", systolic = "16x16x16",
              costText;
  bool verbose = false;
  auto *comp = app.add_subcommand("compile", "Saturate, extract and print a program");
  comp->add_option("file", opts.input, "Input .gls program")->required();
  comp->add_option("-o,--output", opts.output, "Write the program here instead of stdout");
  comp->add_option("--rules", rulesText,
                   "Rule groups: generic,im2col,blocking,mapping; all; or \"\"")
      ->capture_default_str();
  comp->add_option("--target", target, "Accelerator the mapping rules target")
      ->check(CLI::IsMember({"systolic", "vta", "hlscnn", "all"}))
      ->capture_default_str();
  comp->add_option("--systolic", systolic,
                   "Largest systolic array RxC[xB]; 0 leaves a bound open")
      ->capture_default_str();
  comp->add_option("--block-min", opts.rules.blockMin,
                   "Blocking halves even dims larger than this")
      ->capture_default_str();
  comp->add_option("--iter-limit", opts.saturation.iterLimit)->capture_default_str();
  comp->add_option("--node-limit", opts.saturation.nodeLimit)->capture_default_str();
  comp->add_option("--time-limit", opts.saturation.timeLimitSeconds, "Seconds")
      ->capture_default_str();
  comp->add_option("--cost", costText,
                   "Weights, e.g. accel=1,compute=1000,named=1000,transformer=1,var=0");
  comp->add_option("--emit", opts.emit)
      ->check(CLI::IsMember({"sexpr", "json"}))
      ->capture_default_str();
  comp->add_option("--stats", opts.statsPath, "Write run statistics as JSON");
  comp->add_option("--check", opts.check,
                   "Compare extracted and input programs on N random inputs");
  comp->add_option("--check-mode", opts.checkMode)
      ->check(CLI::IsMember({"exact", "float"}))
      ->capture_default_str();
  comp->add_option("--seed", opts.seed)->envname("APEX_SEED")->capture_default_str();
  comp->add_flag("-v,--verbose", verbose, "Print a one-line summary to stderr");

  std::string fuzzRules = "all";
  size_t trials = 100;
  uint64_t fuzzSeed = 0;
  int64_t fuzzBlockMin = 1;
  auto *fuzz = app.add_subcommand("fuzz-rules",
                                  "Check rules against the interpreter on random terms");
  fuzz->add_option("--rules", fuzzRules)->capture_default_str();
  fuzz->add_option("--trials", trials)->capture_default_str();
  fuzz->add_option("--seed", fuzzSeed)->envname("APEX_SEED")->capture_default_str();
  fuzz->add_option("--block-min", fuzzBlockMin)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? kOk : kCompileError;
  }

  try {
    if (*fuzz) {
      rewrite::RuleOptions options;
      options.blockMin = fuzzBlockMin;
      bool ok = true;
      for (const rewrite::Rule &rule :
           rewrite::buildRuleLibrary(parseGroups(fuzzRules), options)) {
        rewrite::SoundnessReport r = rewrite::checkRuleSoundness(rule, trials, fuzzSeed);
        out << r.toString() << "\n";
        ok = ok && r.ok();
      }
      return ok ? kOk : kVerifyFailed;
    }

    opts.groups = parseGroups(rulesText);
    opts.rules.targets = parseTargets(target);
    Dims limits = parseSystolic(systolic);
    opts.rules.systolicRows = limits[0];
    opts.rules.systolicCols = limits[1];
    opts.rules.systolicBatch = limits[2];
    if (!costText.empty())
      opts.cost = rewrite::CostModel::parse(costText);
  } catch (const Error &e) {
    err << "apex: error: " << e.what() << "\n";
    return kCompileError;
  }

  RunReport report = compile(opts, out, err);
  if (verbose)
    writeSummary(report, err);
  return report.exitCode;
}

} // namespace apex::cli
